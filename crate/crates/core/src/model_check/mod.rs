//! Safety model checking of single-output circuits: the output has to stay
//! 0 in every reachable state under every input sequence.
//!
//! [`check_safety`] runs symbolic forward reachability on BDDs.
//! [`explicit_reach`] enumerates concrete states and inputs breadth-first
//! and serves as an independent oracle on small circuits.

mod explicit;
mod symbolic;

pub use explicit::{explicit_reach, ExplicitLimits};
pub use symbolic::{check_safety, Reachability};

use std::fmt;

use thiserror::Error;

use crate::aig::{Aig, Reset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SafetyStatus {
    Safe,
    Unsafe,
    ResourceOut,
}

impl fmt::Display for SafetyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SafetyStatus::Safe => "SAFE",
            SafetyStatus::Unsafe => "UNSAFE",
            SafetyStatus::ResourceOut => "RESOURCE-OUT",
        })
    }
}

/// Input vectors, one per step, leading from the initial state to a step
/// whose output is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Vec<bool>>,
}

impl Trace {
    /// Number of transitions before the violating step.
    pub fn depth(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    /// Simulates the trace from the initial state and reports whether the
    /// output is 1 at the last step.
    pub fn replays_to_violation(&self, aig: &Aig) -> bool {
        let init = aig.initial_states();
        if !init.is_deterministic() || aig.outputs.len() != 1 || self.steps.is_empty() {
            return false;
        }
        let mut state: Vec<bool> = init.0.iter().map(|v| v.unwrap_or(false)).collect();
        for (k, inputs) in self.steps.iter().enumerate() {
            if inputs.len() != aig.inputs.len() {
                return false;
            }
            let step = aig.step(&state, inputs);
            if k + 1 == self.steps.len() {
                return step.outputs[0];
            }
            state = step.next_latches;
        }
        unreachable!()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TRACE")?;
        for step in &self.steps {
            let bits: Vec<&str> = step.iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(f, "{}", bits.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyVerdict {
    pub status: SafetyStatus,
    /// Present iff the status is `Unsafe`.
    pub trace: Option<Trace>,
    /// Why the run gave up, for `ResourceOut`.
    pub reason: Option<String>,
}

impl SafetyVerdict {
    pub(crate) fn safe() -> Self {
        SafetyVerdict {
            status: SafetyStatus::Safe,
            trace: None,
            reason: None,
        }
    }

    pub(crate) fn unsafe_with(trace: Trace) -> Self {
        SafetyVerdict {
            status: SafetyStatus::Unsafe,
            trace: Some(trace),
            reason: None,
        }
    }

    pub(crate) fn resource_out(reason: impl Into<String>) -> Self {
        SafetyVerdict {
            status: SafetyStatus::ResourceOut,
            trace: None,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelCheckError {
    #[error("expected exactly one output, found {found}")]
    NotSingleOutput { found: usize },
    #[error("bad-state and invariant-constraint properties are not supported")]
    UnsupportedProperties,
    #[error("latch {latch} starts uninitialized, which is not supported")]
    UnsupportedReset { latch: usize },
    #[error("circuit exceeds explicit-state limits: {latches} latches (max {max_latches}), {inputs} inputs (max {max_inputs})")]
    LimitExceeded {
        latches: usize,
        inputs: usize,
        max_latches: usize,
        max_inputs: usize,
    },
}

pub(crate) fn check_supported(aig: &Aig) -> Result<(), ModelCheckError> {
    if aig.outputs.len() != 1 {
        return Err(ModelCheckError::NotSingleOutput {
            found: aig.outputs.len(),
        });
    }
    if !aig.bad.is_empty() || !aig.constraints.is_empty() {
        return Err(ModelCheckError::UnsupportedProperties);
    }
    if let Some(latch) = aig
        .latches
        .iter()
        .position(|l| l.reset == Reset::Uninitialized)
    {
        return Err(ModelCheckError::UnsupportedReset { latch });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_ascii;

    const TOGGLE: &str = "aag 1 0 1 1 0\n2 3\n2\n";
    const BUFFER: &str = "aag 1 1 0 1 0\n2\n2\n";
    const CONST: &str = "aag 0 0 0 1 0\n0\n";
    const XOR_SOLUTION: &str = "aag 5 1 0 1 4\n2\n11\n6 2 5\n8 3 4\n10 7 9\n4 2 2\n";

    fn both(text: &str) -> (SafetyVerdict, SafetyVerdict) {
        let aig = parse_ascii(text).unwrap();
        (
            check_safety(&aig, &Default::default()).unwrap(),
            explicit_reach(&aig, &Default::default()).unwrap(),
        )
    }

    #[test]
    fn constant_false_is_safe() {
        let (s, e) = both(CONST);
        assert_eq!(s, SafetyVerdict::safe());
        assert_eq!(e, SafetyVerdict::safe());
    }

    #[test]
    fn toggle_fails_after_one_step() {
        let aig = parse_ascii(TOGGLE).unwrap();
        let (s, e) = both(TOGGLE);
        for v in [s, e] {
            assert_eq!(v.status, SafetyStatus::Unsafe);
            let trace = v.trace.unwrap();
            assert_eq!(trace.depth(), 1);
            assert_eq!(trace.steps, vec![Vec::<bool>::new(), vec![]]);
            assert!(trace.replays_to_violation(&aig));
        }
    }

    #[test]
    fn buffer_fails_immediately() {
        let (s, e) = both(BUFFER);
        for v in [s, e] {
            assert_eq!(v.status, SafetyStatus::Unsafe);
            assert_eq!(v.trace.unwrap().steps, vec![vec![true]]);
        }
    }

    #[test]
    fn xor_solution_is_safe() {
        let (s, e) = both(XOR_SOLUTION);
        assert_eq!(s.status, SafetyStatus::Safe);
        assert_eq!(e.status, SafetyStatus::Safe);
    }

    #[test]
    fn reset_one_is_honoured() {
        // latch starts at 1 and stays there; output = not latch
        let (s, e) = both("aag 1 0 1 1 0\n2 2 1\n3\n");
        assert_eq!(s.status, SafetyStatus::Safe);
        assert_eq!(e.status, SafetyStatus::Safe);
        let (s, e) = both("aag 1 0 1 1 0\n2 2 1\n2\n");
        assert_eq!(s.status, SafetyStatus::Unsafe);
        assert_eq!(e.status, SafetyStatus::Unsafe);
    }

    #[test]
    fn unsupported_inputs() {
        let aig = parse_ascii("aag 1 0 1 1 0\n2 3 2\n2\n").unwrap();
        assert_eq!(
            check_safety(&aig, &Default::default()),
            Err(ModelCheckError::UnsupportedReset { latch: 0 })
        );
        assert_eq!(
            explicit_reach(&aig, &Default::default()),
            Err(ModelCheckError::UnsupportedReset { latch: 0 })
        );
        let aig = parse_ascii("aag 1 1 0 2 0\n2\n2\n3\n").unwrap();
        assert_eq!(
            check_safety(&aig, &Default::default()),
            Err(ModelCheckError::NotSingleOutput { found: 2 })
        );
    }

    #[test]
    fn trace_format() {
        let trace = Trace {
            steps: vec![vec![false, true], vec![true, true]],
        };
        assert_eq!(trace.to_string(), "TRACE\n0 1\n1 1\n");
    }
}
