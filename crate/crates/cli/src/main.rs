//! Command-line front end. Verdicts, traces and circuits go to standard
//! output, everything else to standard error. Exit codes: 0 valid, safe,
//! realizable or passing; 1 invalid, unsafe, unrealizable or failing;
//! 2 usage or parse error; 3 resource limit.

mod run;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use aigsyn::bdd::DEFAULT_NODE_CAP;
use aigsyn::Limits;

use run::{Code, Engine, Format, Outcome};

#[derive(Parser)]
#[command(
    name = "aigsyn",
    version,
    about = "Safety synthesis toolchain for ASCII AIGER circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Resources {
    /// Maximum number of BDD nodes.
    #[arg(long, env = "AIGSYN_NODE_CAP", default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Wall-clock limit per file, in seconds.
    #[arg(long)]
    limit_seconds: Option<f64>,
}

impl Resources {
    fn limits(&self) -> Limits {
        let limits = Limits::default().with_node_cap(self.node_cap);
        match self.limit_seconds {
            Some(s) => limits.with_time_limit(Duration::from_secs_f64(s.max(0.0))),
            None => limits,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct Batch {
    /// Worker threads when the path is a directory.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and check that it is a well-formed synthesis spec.
    Validate {
        /// File, or directory of .aag files.
        path: PathBuf,
        #[command(flatten)]
        batch: Batch,
    },
    /// Mark inputs as controllable by renaming them.
    Mark {
        file: PathBuf,
        /// Input positions or symbol names, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the syntactic rules a solution has to satisfy.
    CheckSyntax {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check that the output of a circuit stays 0 forever.
    ModelCheck {
        /// File, or directory of .aag files.
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Bdd)]
        engine: Engine,
        #[command(flatten)]
        resources: Resources,
        #[command(flatten)]
        batch: Batch,
    },
    /// Decide whether a controller exists for a spec.
    Realizability {
        /// File, or directory of .aag files.
        path: PathBuf,
        #[command(flatten)]
        resources: Resources,
        #[command(flatten)]
        batch: Batch,
    },
    /// Decide realizability and print a solution.
    Synthesize {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Run the solution checker and the model checker on the result.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        resources: Resources,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Code::Usage as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<Code> {
    match command {
        Command::Validate { path, batch } => per_file(&path, batch, run::validate),
        Command::Mark {
            file,
            inputs,
            output,
        } => emit(run::mark(&file, &inputs)?, output.as_deref()),
        Command::CheckSyntax {
            spec,
            solution,
            format,
        } => emit(run::check_syntax(&spec, &solution, format)?, None),
        Command::ModelCheck {
            path,
            engine,
            resources,
            batch,
        } => per_file(&path, batch, |p| {
            run::model_check(p, engine, &resources.limits())
        }),
        Command::Realizability {
            path,
            resources,
            batch,
        } => per_file(&path, batch, |p| run::realizability(p, &resources.limits())),
        Command::Synthesize {
            spec,
            output,
            verify,
            resources,
        } => emit(
            run::synthesize_file(&spec, &resources.limits(), verify)?,
            output.as_deref(),
        ),
    }
}

/// Prints an outcome. The body goes to `output` when given.
fn emit(outcome: Outcome, output: Option<&Path>) -> Result<Code> {
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    let mut stdout = io::stdout().lock();
    if !outcome.verdict.is_empty() {
        writeln!(stdout, "{}", outcome.verdict)?;
    }
    match output {
        Some(path) if outcome.code == Code::Positive => {
            fs::write(path, &outcome.body)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        _ => stdout.write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome.code)
}

/// Runs `f` on a file, or on every `.aag` file of a directory, printing
/// one `name VERDICT millis` line per file. The worst code wins.
fn per_file<F>(path: &Path, batch: Batch, f: F) -> Result<Code>
where
    F: Fn(&Path) -> Result<Outcome> + Sync,
{
    if !path.is_dir() {
        return emit(f(path)?, None);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("cannot read directory {}", path.display()))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "aag"));
    files.sort();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(batch.jobs.max(1))
        .build()?;
    let results: Vec<(Outcome, u128)> = pool.install(|| {
        files
            .par_iter()
            .map(|p| {
                let start = Instant::now();
                let outcome = f(p).unwrap_or_else(|e| Outcome {
                    code: Code::Usage,
                    verdict: "ERROR".into(),
                    body: String::new(),
                    notes: vec![format!("{e:#}")],
                });
                (outcome, start.elapsed().as_millis())
            })
            .collect()
    });

    let mut stdout = io::stdout().lock();
    let mut worst = Code::Positive;
    for (file, (outcome, millis)) in files.iter().zip(&results) {
        for note in &outcome.notes {
            eprintln!("{note}");
        }
        let name = file.file_name().unwrap_or_default().to_string_lossy();
        writeln!(stdout, "{name} {} {millis}", outcome.verdict)?;
        worst = worst.max(outcome.code);
    }
    Ok(worst)
}
