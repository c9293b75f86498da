//! Syntactic check of a candidate solution against its specification.
//!
//! A solution keeps every line of the specification in order, drops the
//! controllable inputs, and redefines each of their variables exactly once
//! as a new latch or a new AND-gate placed after the original ones. New
//! definitions may read uncontrollable inputs, latches, new gates and
//! constants but never an original gate. Rules:
//!
//! | rule | requirement |
//! |------|-------------|
//! | R1 | `I' = I - c`, `L' = L + l`, `A' = A + a`, `M' = I' + L' + A'`, same `O`, no extension counts |
//! | R2 | uncontrollable inputs unchanged and in order, controllable inputs removed |
//! | R3 | original latches unchanged and first; new latches define fresh variables |
//! | R4 | same outputs |
//! | R5 | original gates unchanged and first; new gates define fresh variables |
//! | R6 | each controllable variable redefined exactly once |
//! | R7 | new definitions only read uncontrollable inputs, latches, new gates, constants |
//! | R8 | new gates are free of combinational loops |
//! | R9 | symbol table unchanged |
//!
//! R6 to R8 need the line alignment of R2, R3 and R5; they are reported as
//! unchecked when the alignment fails.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::aig::{topological_order, RawAig};
use crate::literal::{Literal, Var};
use crate::spec::SynthesisSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CheckRule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

impl CheckRule {
    pub const ALL: [CheckRule; 9] = [
        CheckRule::R1,
        CheckRule::R2,
        CheckRule::R3,
        CheckRule::R4,
        CheckRule::R5,
        CheckRule::R6,
        CheckRule::R7,
        CheckRule::R8,
        CheckRule::R9,
    ];

    pub fn summary(self) -> &'static str {
        match self {
            CheckRule::R1 => "header arithmetic",
            CheckRule::R2 => "inputs",
            CheckRule::R3 => "latches",
            CheckRule::R4 => "outputs",
            CheckRule::R5 => "and-gates",
            CheckRule::R6 => "controllable inputs redefined exactly once",
            CheckRule::R7 => "new definitions avoid original and-gates",
            CheckRule::R8 => "no combinational loops among new gates",
            CheckRule::R9 => "symbol table unchanged",
        }
    }
}

impl fmt::Display for CheckRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: CheckRule,
    pub message: String,
    /// 1-based lines of the candidate file, when the violation has a
    /// location.
    pub lines: Vec<usize>,
}

/// Removed controllable inputs, added latches and added gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct HeaderDelta {
    pub c: usize,
    pub l: usize,
    pub a: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub delta: HeaderDelta,
    pub violations: Vec<Violation>,
    /// Rules that could not be evaluated because the line alignment failed.
    pub unchecked: Vec<CheckRule>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed_rules(&self) -> Vec<CheckRule> {
        let mut rules: Vec<_> = self.violations.iter().map(|v| v.rule).collect();
        rules.dedup();
        rules
    }

    pub fn violates(&self, rule: CheckRule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let HeaderDelta { c, l, a } = self.delta;
        match self.verdict {
            Verdict::Pass => writeln!(f, "PASS c={c} l={l} a={a}")?,
            Verdict::Fail => writeln!(f, "FAIL c={c} l={l} a={a}")?,
        }
        for v in &self.violations {
            write!(f, "{} ({}): {}", v.rule, v.rule.summary(), v.message)?;
            if !v.lines.is_empty() {
                let lines: Vec<String> = v.lines.iter().map(|l| l.to_string()).collect();
                write!(f, " [line {}]", lines.join(", "))?;
            }
            writeln!(f)?;
        }
        for rule in &self.unchecked {
            writeln!(
                f,
                "{rule} ({}): not checked, lines do not align",
                rule.summary()
            )?;
        }
        Ok(())
    }
}

/// Role of a variable in a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarClass {
    Constant,
    OriginalInput,
    OriginalLatch,
    OriginalGate,
    NewLatch,
    NewGate,
    /// A controllable input variable of the specification, now defined by a
    /// new latch or a new gate.
    RedefinedControllable {
        as_latch: bool,
    },
    Undefined,
}

impl VarClass {
    /// Whether new latches and gates may read this variable.
    pub fn readable_by_controller(self) -> bool {
        !matches!(self, VarClass::OriginalGate | VarClass::Undefined)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("candidate lines do not align with the specification")]
    UnalignedCandidate,
}

struct Layout {
    inputs: usize,
    latches: usize,
    outputs: usize,
    gates: usize,
}

impl Layout {
    fn of(raw: &RawAig) -> Layout {
        let inputs = 2;
        let latches = inputs + raw.inputs.len();
        let outputs = latches + raw.latches.len();
        let gates = outputs + raw.outputs.len() + raw.bad.len() + raw.constraints.len();
        Layout {
            inputs,
            latches,
            outputs,
            gates,
        }
    }
}

pub fn check_solution(spec: &SynthesisSpec, candidate: &RawAig) -> CheckReport {
    Checker::new(spec, candidate).run()
}

/// Classifies every variable up to the largest one the candidate mentions.
pub fn merged_dependency_closure(
    candidate: &RawAig,
    spec: &SynthesisSpec,
) -> Result<Vec<VarClass>, ClosureError> {
    let checker = Checker::new(spec, candidate);
    if !checker.aligned() {
        return Err(ClosureError::UnalignedCandidate);
    }
    Ok(checker.classify())
}

struct Checker<'a> {
    spec: &'a SynthesisSpec,
    orig: &'a RawAig,
    cand: &'a RawAig,
    controllable: HashSet<Var>,
    layout: Layout,
    violations: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn new(spec: &'a SynthesisSpec, cand: &'a RawAig) -> Self {
        Checker {
            spec,
            orig: spec.aig().raw(),
            cand,
            controllable: spec.controllable_vars().collect(),
            layout: Layout::of(cand),
            violations: Vec::new(),
        }
    }

    fn violation(&mut self, rule: CheckRule, message: impl Into<String>, lines: Vec<usize>) {
        self.violations.push(Violation {
            rule,
            message: message.into(),
            lines,
        });
    }

    fn delta(&self) -> HeaderDelta {
        HeaderDelta {
            c: self.controllable.len(),
            l: self
                .cand
                .latches
                .len()
                .saturating_sub(self.orig.latches.len()),
            a: self.cand.gates.len().saturating_sub(self.orig.gates.len()),
        }
    }

    fn expected_inputs(&self) -> Vec<Literal> {
        self.spec
            .uncontrollable()
            .iter()
            .map(|&k| self.orig.inputs[k])
            .collect()
    }

    fn run(mut self) -> CheckReport {
        self.header();
        let inputs_ok = self.inputs();
        let latches_ok = self.latches();
        self.outputs();
        let gates_ok = self.gates();
        let mut unchecked = Vec::new();
        if inputs_ok && latches_ok && gates_ok {
            let classes = self.classify();
            self.redefinitions();
            self.dependencies(&classes);
            self.loops();
        } else {
            unchecked = vec![CheckRule::R6, CheckRule::R7, CheckRule::R8];
        }
        self.symbols();

        self.violations.sort_by_key(|v| v.rule);
        CheckReport {
            verdict: if self.violations.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            delta: self.delta(),
            violations: self.violations,
            unchecked,
        }
    }

    fn aligned(&self) -> bool {
        self.cand.inputs == self.expected_inputs()
            && self.originals_kept(&self.orig.latches, &self.cand.latches)
            && self.originals_kept(&self.orig.gates, &self.cand.gates)
            && self.fresh_definitions().is_empty()
    }

    fn originals_kept<T: PartialEq>(&self, orig: &[T], cand: &[T]) -> bool {
        cand.len() >= orig.len() && cand[..orig.len()] == *orig
    }

    fn header(&mut self) {
        let (orig, cand) = (self.orig, self.cand);
        let c = self.controllable.len();
        let (i, l, a) = (orig.inputs.len(), orig.latches.len(), orig.gates.len());
        let (i2, l2, a2) = (cand.inputs.len(), cand.latches.len(), cand.gates.len());
        let mut problems = Vec::new();
        if i.checked_sub(c) != Some(i2) {
            problems.push(format!("I' = {i2} but I - c = {i} - {c}"));
        }
        if l2 < l {
            problems.push(format!("L' = {l2} is below L = {l}"));
        }
        if a2 < a {
            problems.push(format!("A' = {a2} is below A = {a}"));
        }
        let sum = i2 + l2 + a2;
        if cand.max_var as usize != sum {
            problems.push(format!(
                "M' = {} but I' + L' + A' = {i2} + {l2} + {a2} = {sum}",
                cand.max_var
            ));
        }
        if cand.outputs.len() != orig.outputs.len() {
            problems.push(format!(
                "O' = {} but O = {}",
                cand.outputs.len(),
                orig.outputs.len()
            ));
        }
        if !cand.bad.is_empty() || !cand.constraints.is_empty() {
            problems.push("extension counts B and C must be absent".to_string());
        }
        if !problems.is_empty() {
            self.violation(CheckRule::R1, problems.join("; "), vec![1]);
        }
    }

    fn inputs(&mut self) -> bool {
        let expected = self.expected_inputs();
        if self.cand.inputs == expected {
            return true;
        }
        let k = expected
            .iter()
            .zip(&self.cand.inputs)
            .position(|(e, c)| e != c)
            .unwrap_or(expected.len().min(self.cand.inputs.len()));
        let line = self.layout.inputs + k;
        let message = match (expected.get(k), self.cand.inputs.get(k)) {
            (Some(e), Some(c)) if self.controllable.contains(&c.var()) => {
                format!("controllable input {c} must be removed (expected {e})")
            }
            (Some(e), Some(c)) => format!("expected uncontrollable input {e}, found {c}"),
            (Some(e), None) => format!("uncontrollable input {e} is missing"),
            (None, Some(c)) => format!("unexpected input {c}"),
            (None, None) => unreachable!(),
        };
        self.violation(CheckRule::R2, message, vec![line]);
        false
    }

    fn prefix_mismatch<T: PartialEq>(orig: &[T], cand: &[T]) -> Option<usize> {
        (0..orig.len()).find(|&k| cand.get(k) != Some(&orig[k]))
    }

    /// Variables that survive from the specification as definitions other
    /// than the controllable inputs.
    fn retained_definitions(&self) -> HashSet<Var> {
        let inputs = self.expected_inputs().into_iter().map(|l| l.var());
        let latches = self.orig.latches.iter().map(|l| l.lit.var());
        let gates = self.orig.gates.iter().map(|g| g.lhs.var());
        inputs.chain(latches).chain(gates).collect()
    }

    /// New latches and gates whose variable clashes with a retained
    /// definition or with an earlier new definition of a variable that is
    /// not controllable. Entries are `(rule, line, message)`.
    fn fresh_definitions(&self) -> Vec<(CheckRule, usize, String)> {
        let retained = self.retained_definitions();
        let mut seen = HashSet::new();
        let mut clashes = Vec::new();
        let new_latches = self
            .cand
            .latches
            .iter()
            .enumerate()
            .skip(self.orig.latches.len())
            .map(|(k, l)| (CheckRule::R3, self.layout.latches + k, l.lit.var()));
        let new_gates = self
            .cand
            .gates
            .iter()
            .enumerate()
            .skip(self.orig.gates.len())
            .map(|(k, g)| (CheckRule::R5, self.layout.gates + k, g.lhs.var()));
        for (rule, line, var) in new_latches.chain(new_gates) {
            if retained.contains(&var) {
                clashes.push((
                    rule,
                    line,
                    format!("new definition of variable {var} clashes with an original definition"),
                ));
            } else if !seen.insert(var) && !self.controllable.contains(&var) {
                clashes.push((rule, line, format!("variable {var} is defined twice")));
            }
        }
        clashes
    }

    fn latches(&mut self) -> bool {
        let mut ok = true;
        if let Some(k) = Self::prefix_mismatch(&self.orig.latches, &self.cand.latches) {
            let line = self.layout.latches + k.min(self.cand.latches.len());
            self.violation(
                CheckRule::R3,
                format!(
                    "original latch {} is missing or changed",
                    self.orig.latches[k].lit
                ),
                vec![line],
            );
            ok = false;
        }
        for (rule, line, message) in self.fresh_definitions() {
            if rule == CheckRule::R3 {
                self.violation(rule, message, vec![line]);
                ok = false;
            }
        }
        ok
    }

    fn outputs(&mut self) {
        if self.cand.outputs != self.orig.outputs {
            let lines = (0..self.cand.outputs.len().max(1))
                .map(|k| self.layout.outputs + k)
                .collect();
            self.violation(
                CheckRule::R4,
                format!(
                    "outputs {:?} differ from the specification's {:?}",
                    codes(&self.cand.outputs),
                    codes(&self.orig.outputs)
                ),
                lines,
            );
        }
    }

    fn gates(&mut self) -> bool {
        let mut ok = true;
        if let Some(k) = Self::prefix_mismatch(&self.orig.gates, &self.cand.gates) {
            let line = self.layout.gates + k.min(self.cand.gates.len());
            self.violation(
                CheckRule::R5,
                format!(
                    "original and-gate {} is missing or changed",
                    self.orig.gates[k].lhs
                ),
                vec![line],
            );
            ok = false;
        }
        for (rule, line, message) in self.fresh_definitions() {
            if rule == CheckRule::R5 {
                self.violation(rule, message, vec![line]);
                ok = false;
            }
        }
        ok
    }

    fn classify(&self) -> Vec<VarClass> {
        let cand = self.cand;
        let mut top = cand.max_var;
        let mentioned = cand
            .inputs
            .iter()
            .chain(cand.latches.iter().flat_map(|l| [&l.lit, &l.next]))
            .chain(&cand.outputs)
            .chain(cand.gates.iter().flat_map(|g| [&g.lhs, &g.rhs0, &g.rhs1]));
        for lit in mentioned {
            top = top.max(lit.var().0);
        }
        let mut classes = vec![VarClass::Undefined; top as usize + 1];
        classes[0] = VarClass::Constant;
        let mut set = |var: Var, class: VarClass| {
            let slot = &mut classes[var.index()];
            if *slot == VarClass::Undefined {
                *slot = class;
            }
        };
        for lit in &cand.inputs {
            set(lit.var(), VarClass::OriginalInput);
        }
        let (l, a) = (self.orig.latches.len(), self.orig.gates.len());
        for (k, latch) in cand.latches.iter().enumerate() {
            let var = latch.lit.var();
            set(
                var,
                if k < l {
                    VarClass::OriginalLatch
                } else if self.controllable.contains(&var) {
                    VarClass::RedefinedControllable { as_latch: true }
                } else {
                    VarClass::NewLatch
                },
            );
        }
        for (k, gate) in cand.gates.iter().enumerate() {
            let var = gate.lhs.var();
            set(
                var,
                if k < a {
                    VarClass::OriginalGate
                } else if self.controllable.contains(&var) {
                    VarClass::RedefinedControllable { as_latch: false }
                } else {
                    VarClass::NewGate
                },
            );
        }
        classes
    }

    fn redefinitions(&mut self) {
        let mut count: HashMap<Var, Vec<usize>> = HashMap::new();
        let new_latches = self
            .cand
            .latches
            .iter()
            .enumerate()
            .skip(self.orig.latches.len())
            .map(|(k, l)| (l.lit.var(), self.layout.latches + k));
        let new_gates = self
            .cand
            .gates
            .iter()
            .enumerate()
            .skip(self.orig.gates.len())
            .map(|(k, g)| (g.lhs.var(), self.layout.gates + k));
        for (var, line) in new_latches.chain(new_gates) {
            if self.controllable.contains(&var) {
                count.entry(var).or_default().push(line);
            }
        }
        let vars: Vec<Var> = self.spec.controllable_vars().collect();
        for var in vars {
            match count.remove(&var) {
                None => self.violation(
                    CheckRule::R6,
                    format!("controllable variable {var} is never redefined"),
                    Vec::new(),
                ),
                Some(lines) if lines.len() > 1 => self.violation(
                    CheckRule::R6,
                    format!(
                        "controllable variable {var} is redefined {} times",
                        lines.len()
                    ),
                    lines,
                ),
                Some(_) => {}
            }
        }
    }

    fn dependencies(&mut self, classes: &[VarClass]) {
        let class = |lit: Literal| classes[lit.var().index()];
        let mut bad = Vec::new();
        for (k, latch) in self
            .cand
            .latches
            .iter()
            .enumerate()
            .skip(self.orig.latches.len())
        {
            if !class(latch.next).readable_by_controller() {
                bad.push((
                    self.layout.latches + k,
                    latch.lit,
                    latch.next,
                    class(latch.next),
                ));
            }
        }
        for (k, gate) in self
            .cand
            .gates
            .iter()
            .enumerate()
            .skip(self.orig.gates.len())
        {
            for operand in [gate.rhs0, gate.rhs1] {
                if !class(operand).readable_by_controller() {
                    bad.push((self.layout.gates + k, gate.lhs, operand, class(operand)));
                }
            }
        }
        for (line, lhs, operand, class) in bad {
            let what = match class {
                VarClass::OriginalGate => "an original and-gate",
                _ => "an undefined variable",
            };
            self.violation(
                CheckRule::R7,
                format!("new definition {lhs} reads {operand}, {what}"),
                vec![line],
            );
        }
    }

    fn loops(&mut self) {
        let first_new = self.orig.gates.len();
        let new_gates = &self.cand.gates[first_new..];
        let index: HashMap<Var, usize> = new_gates
            .iter()
            .enumerate()
            .map(|(k, g)| (g.lhs.var(), k))
            .collect();
        if let Err(k) = topological_order(new_gates, |v| index.get(&v).copied()) {
            self.violation(
                CheckRule::R8,
                format!(
                    "new and-gate {} lies on a combinational loop",
                    new_gates[k].lhs
                ),
                vec![self.layout.gates + first_new + k],
            );
        }
    }

    fn symbols(&mut self) {
        if self.cand.symbols != self.orig.symbols {
            self.violation(
                CheckRule::R9,
                "symbol table differs from the specification",
                Vec::new(),
            );
        }
    }
}

fn codes(lits: &[Literal]) -> Vec<u32> {
    lits.iter().map(|l| l.code()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::{parse_ascii, parse_raw};
    use crate::spec::classify;

    const SPEC: &str = "aag 5 2 0 1 3\n2\n4\n11\n6 2 5\n8 3 4\n10 7 9\ni1 controllable_c\n";
    const SOLUTION: &str = "aag 5 1 0 1 4\n2\n11\n6 2 5\n8 3 4\n10 7 9\n4 2 2\ni1 controllable_c\n";

    fn spec() -> SynthesisSpec {
        classify(parse_ascii(SPEC).unwrap()).unwrap()
    }

    fn check(text: &str) -> CheckReport {
        check_solution(&spec(), &parse_raw(text).unwrap())
    }

    #[test]
    fn worked_example_passes() {
        let report = check(SOLUTION);
        assert!(report.passed(), "{report}");
        assert_eq!(report.delta, HeaderDelta { c: 1, l: 0, a: 1 });
        assert!(report.unchecked.is_empty());
    }

    #[test]
    fn example_mutations() {
        let r = check(&SOLUTION.replace("\n4 2 2\n", "\n4 6 6\n"));
        assert_eq!(r.failed_rules(), vec![CheckRule::R7]);
        assert_eq!(r.violations[0].lines, vec![7]);

        let r = check(&SOLUTION.replace("\n4 2 2\n", "\n12 2 2\n"));
        assert_eq!(r.failed_rules(), vec![CheckRule::R6]);

        // extra latch without bumping M'
        let r = check(
            &SOLUTION
                .replace("aag 5 1 0 1 4", "aag 5 1 1 1 4")
                .replace("\n2\n11\n", "\n2\n12 2\n11\n"),
        );
        assert_eq!(r.failed_rules(), vec![CheckRule::R1]);
    }

    #[test]
    fn identity_when_nothing_is_controllable() {
        let text = "aag 3 1 1 1 1\n2\n4 6\n6\n6 2 4\ni0 x\n";
        let s = classify(parse_ascii(text).unwrap()).unwrap();
        let report = check_solution(&s, s.aig().raw());
        assert!(report.passed(), "{report}");
        assert_eq!(report.delta, HeaderDelta::default());
        let classes = merged_dependency_closure(s.aig().raw(), &s).unwrap();
        assert_eq!(
            classes,
            vec![
                VarClass::Constant,
                VarClass::OriginalInput,
                VarClass::OriginalLatch,
                VarClass::OriginalGate
            ]
        );
    }

    #[test]
    fn closure_of_worked_example() {
        let classes = merged_dependency_closure(&parse_raw(SOLUTION).unwrap(), &spec()).unwrap();
        assert_eq!(
            classes,
            vec![
                VarClass::Constant,
                VarClass::OriginalInput,
                VarClass::RedefinedControllable { as_latch: false },
                VarClass::OriginalGate,
                VarClass::OriginalGate,
                VarClass::OriginalGate,
            ]
        );
        let unaligned = parse_raw(SOLUTION.replace("\n2\n11\n", "\n12\n11\n")).unwrap();
        assert_eq!(
            merged_dependency_closure(&unaligned, &spec()),
            Err(ClosureError::UnalignedCandidate)
        );
    }

    #[test]
    fn new_latch_may_realize_controllable() {
        let text = "aag 5 1 1 1 3\n2\n4 2\n11\n6 2 5\n8 3 4\n10 7 9\ni1 controllable_c\n";
        let r = check(text);
        assert!(r.passed(), "{r}");
        assert_eq!(r.delta, HeaderDelta { c: 1, l: 1, a: 0 });
    }

    #[test]
    fn interleaved_latch_fails_r3() {
        let spec_text = "aag 3 2 1 1 0\n2\n4\n6 2\n6\ni1 controllable_c\n";
        let s = classify(parse_ascii(spec_text).unwrap()).unwrap();
        let cand = parse_raw("aag 3 1 2 1 0\n2\n4 2\n6 2\n6\ni1 controllable_c\n").unwrap();
        let r = check_solution(&s, &cand);
        assert_eq!(r.failed_rules(), vec![CheckRule::R3]);
        assert_eq!(
            r.unchecked,
            vec![CheckRule::R6, CheckRule::R7, CheckRule::R8]
        );
    }

    #[test]
    fn double_redefinition_fails_r6() {
        let text = "aag 6 1 1 1 4\n2\n4 2\n11\n6 2 5\n8 3 4\n10 7 9\n4 2 2\ni1 controllable_c\n";
        let r = check(text);
        assert_eq!(r.failed_rules(), vec![CheckRule::R6]);
        assert_eq!(r.violations[0].lines, vec![3, 8]);
    }

    #[test]
    fn report_serializes() {
        let r = check(&SOLUTION.replace("aag 5", "aag 6"));
        let text = r.to_string();
        assert!(
            text.starts_with("FAIL c=1 l=0 a=1\nR1 (header arithmetic)"),
            "{text}"
        );
    }
}
