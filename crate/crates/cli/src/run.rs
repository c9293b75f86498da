use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use aigsyn::aig::Rule;
use aigsyn::aiger::{parse_ascii_with, parse_raw, ParseDiagnostic, ParseOptions};
use aigsyn::check::check_solution;
use aigsyn::game::{synthesize, GameError, Synthesis};
use aigsyn::model_check::{
    check_safety, explicit_reach, ExplicitLimits, ModelCheckError, SafetyStatus,
};
use aigsyn::spec::{classify, mark_controllable, InputSelector, SynthesisSpec};
use aigsyn::{write_ascii, Aig, Limits};

/// Process exit status. Larger values win when combining results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Code {
    /// Valid, safe, realizable or passing.
    Positive = 0,
    /// Invalid, unsafe, unrealizable or failing.
    Negative = 1,
    /// Usage or parse error.
    Usage = 2,
    /// Resource limit reached.
    Resource = 3,
}

/// Result of one command on one file.
#[derive(Debug)]
pub struct Outcome {
    pub code: Code,
    /// Verdict word, the first line of machine output.
    pub verdict: String,
    /// Machine output following the verdict line.
    pub body: String,
    /// Human-readable notes.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(code: Code, verdict: impl Into<String>) -> Self {
        Outcome {
            code,
            verdict: verdict.into(),
            body: String::new(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    fn error(message: impl Into<String>) -> Self {
        Outcome::new(Code::Usage, "ERROR").note(message)
    }

    fn parse_failure(path: &Path, diagnostics: &[ParseDiagnostic]) -> Self {
        let mut out = Outcome::new(Code::Usage, "ERROR");
        for d in diagnostics {
            out.notes.push(format!("{}: {d}", path.display()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Bdd,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn lexical(rule: Rule) -> bool {
    matches!(
        rule,
        Rule::BadMagic
            | Rule::MalformedHeader
            | Rule::MalformedLine
            | Rule::CountMismatch
            | Rule::InvalidUtf8
            | Rule::MalformedReset
            | Rule::MalformedSymbol
            | Rule::UnsupportedProperty
    )
}

fn load(path: &Path, options: ParseOptions) -> Result<std::result::Result<Aig, Outcome>> {
    let text = read(path)?;
    Ok(parse_ascii_with(&text, options).map_err(|d| Outcome::parse_failure(path, &d)))
}

fn load_spec(path: &Path) -> Result<std::result::Result<SynthesisSpec, Outcome>> {
    Ok(match load(path, ParseOptions::STRICT)? {
        Ok(aig) => classify(aig).map_err(|e| Outcome::error(format!("{}: {e}", path.display()))),
        Err(out) => Err(out),
    })
}

macro_rules! try_outcome {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(out) => return Ok(out),
        }
    };
}

/// Strict well-formedness check. Structural defects such as undefined
/// literals or cycles give `INVALID`; unreadable files give `ERROR`.
pub fn validate(path: &Path) -> Result<Outcome> {
    let text = read(path)?;
    let aig = match parse_ascii_with(&text, ParseOptions::STRICT) {
        Ok(aig) => aig,
        Err(diags) => {
            let mut out = Outcome::parse_failure(path, &diags);
            if !diags.iter().any(|d| lexical(d.rule)) {
                out.code = Code::Negative;
                out.verdict = "INVALID".into();
            }
            return Ok(out);
        }
    };
    let header = aig.header();
    match classify(aig) {
        Ok(spec) => {
            let mut out = Outcome::new(Code::Positive, "VALID").note(format!(
                "{}: {header}; {} controllable, {} uncontrollable inputs",
                path.display(),
                spec.controllable().len(),
                spec.uncontrollable().len()
            ));
            for w in spec.warnings() {
                out.notes.push(format!("{}: warning: {w}", path.display()));
            }
            Ok(out)
        }
        Err(e) => Ok(Outcome::new(Code::Negative, "INVALID").note(format!(
            "{}: well-formed, but not a synthesis spec: {e}",
            path.display()
        ))),
    }
}

pub fn mark(path: &Path, inputs: &[String]) -> Result<Outcome> {
    let aig = try_outcome!(load(path, ParseOptions::STRICT)?);
    let selection: Vec<InputSelector> = inputs.iter().map(|s| s.parse().unwrap()).collect();
    match mark_controllable(aig, &selection) {
        Ok((aig, warnings)) => {
            let mut out = Outcome::new(Code::Positive, "");
            out.body = write_ascii(aig.raw());
            out.notes = warnings.iter().map(|w| format!("warning: {w}")).collect();
            Ok(out)
        }
        Err(e) => Ok(Outcome::error(e.to_string())),
    }
}

pub fn check_syntax(spec_path: &Path, solution_path: &Path, format: Format) -> Result<Outcome> {
    let spec = try_outcome!(load_spec(spec_path)?);
    let text = read(solution_path)?;
    let candidate = match parse_raw(&text) {
        Ok(raw) => raw,
        Err(d) => return Ok(Outcome::parse_failure(solution_path, &d)),
    };
    let report = check_solution(&spec, &candidate);
    let code = if report.passed() {
        Code::Positive
    } else {
        Code::Negative
    };
    let mut out = Outcome::new(code, "");
    out.body = match format {
        Format::Text => report.to_string(),
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    Ok(out)
}

pub fn model_check(path: &Path, engine: Engine, limits: &Limits) -> Result<Outcome> {
    let aig = try_outcome!(load(path, ParseOptions::SOLUTION)?);
    let verdict = match engine {
        Engine::Bdd => check_safety(&aig, limits),
        Engine::Explicit => explicit_reach(
            &aig,
            &ExplicitLimits {
                limits: *limits,
                ..ExplicitLimits::default()
            },
        ),
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(e @ ModelCheckError::LimitExceeded { .. }) => {
            return Ok(Outcome::new(Code::Resource, "RESOURCE-OUT").note(e.to_string()))
        }
        Err(e) => return Ok(Outcome::error(format!("{}: {e}", path.display()))),
    };
    let code = match verdict.status {
        SafetyStatus::Safe => Code::Positive,
        SafetyStatus::Unsafe => Code::Negative,
        SafetyStatus::ResourceOut => Code::Resource,
    };
    let mut out = Outcome::new(code, verdict.status.to_string());
    if let Some(trace) = &verdict.trace {
        out.body = trace.to_string();
    }
    if let Some(reason) = verdict.reason {
        out.notes.push(reason);
    }
    Ok(out)
}

fn game_failure(path: &Path, e: GameError) -> Outcome {
    let code = if e.is_resource_limit() {
        Code::Resource
    } else {
        Code::Usage
    };
    let verdict = if code == Code::Resource {
        "RESOURCE-OUT"
    } else {
        "ERROR"
    };
    Outcome::new(code, verdict).note(format!("{}: {e}", path.display()))
}

pub fn realizability(path: &Path, limits: &Limits) -> Result<Outcome> {
    let spec = try_outcome!(load_spec(path)?);
    Ok(match aigsyn::game::realizable(&spec, limits) {
        Ok(true) => Outcome::new(Code::Positive, "REALIZABLE"),
        Ok(false) => Outcome::new(Code::Negative, "UNREALIZABLE"),
        Err(e) => game_failure(path, e),
    })
}

/// Synthesizes a solution. With `verify`, the emitted file is also run
/// through the solution checker and the model checker.
pub fn synthesize_file(path: &Path, limits: &Limits, verify: bool) -> Result<Outcome> {
    let spec = try_outcome!(load_spec(path)?);
    let solution = match synthesize(&spec, limits) {
        Ok(Synthesis::Realizable(raw)) => raw,
        Ok(Synthesis::Unrealizable) => return Ok(Outcome::new(Code::Negative, "UNREALIZABLE")),
        Err(e) => return Ok(game_failure(path, e)),
    };
    let mut out = Outcome::new(Code::Positive, "REALIZABLE");
    out.body = write_ascii(&solution);
    let header = solution.header();
    out.notes.push(format!("solution header: {header}"));
    if verify {
        let report = check_solution(&spec, &solution);
        let safety = Aig::new(solution)
            .ok()
            .and_then(|aig| check_safety(&aig, limits).ok());
        let safe = safety
            .as_ref()
            .is_some_and(|v| v.status == SafetyStatus::Safe);
        out.notes.push(format!(
            "self-check: {}; model check {}",
            report.to_string().lines().next().unwrap_or_default(),
            safety.map_or("not applicable".to_string(), |v| v.status.to_string())
        ));
        if !(report.passed() && safe) {
            out.code = Code::Usage;
            out.notes
                .push("emitted solution failed its self-check".into());
        }
    }
    Ok(out)
}
