use std::collections::{HashMap, VecDeque};

use crate::aig::Aig;
use crate::limits::Limits;

use super::{check_supported, ModelCheckError, SafetyVerdict, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplicitLimits {
    pub max_latches: usize,
    pub max_inputs: usize,
    pub limits: Limits,
}

impl Default for ExplicitLimits {
    fn default() -> Self {
        ExplicitLimits {
            max_latches: 20,
            max_inputs: 16,
            limits: Limits::default(),
        }
    }
}

/// Breadth-first search over concrete latch vectors, trying every input
/// vector in every state. The first violation found has minimal depth.
pub fn explicit_reach(
    aig: &Aig,
    limits: &ExplicitLimits,
) -> Result<SafetyVerdict, ModelCheckError> {
    check_supported(aig)?;
    let (l, i) = (aig.latches.len(), aig.inputs.len());
    if l > limits.max_latches || i > limits.max_inputs {
        return Err(ModelCheckError::LimitExceeded {
            latches: l,
            inputs: i,
            max_latches: limits.max_latches,
            max_inputs: limits.max_inputs,
        });
    }
    let inputs: Vec<Vec<bool>> = (0u32..1 << i)
        .map(|bits| (0..i).map(|k| bits >> k & 1 == 1).collect())
        .collect();

    // state -> (predecessor index, input index)
    let mut states: Vec<Vec<bool>> = Vec::new();
    let mut parent: Vec<Option<(usize, usize)>> = Vec::new();
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for init in aig.initial_states().iter() {
        index.insert(init.clone(), states.len());
        queue.push_back(states.len());
        states.push(init);
        parent.push(None);
    }

    while let Some(s) = queue.pop_front() {
        if limits.limits.expired() {
            return Ok(SafetyVerdict::resource_out("time limit exceeded"));
        }
        for (x, input) in inputs.iter().enumerate() {
            let step = aig.step(&states[s], input);
            if step.outputs[0] {
                let mut steps = vec![input.clone()];
                let mut at = s;
                while let Some((prev, x)) = parent[at] {
                    steps.push(inputs[x].clone());
                    at = prev;
                }
                steps.reverse();
                return Ok(SafetyVerdict::unsafe_with(Trace { steps }));
            }
            if !index.contains_key(&step.next_latches) {
                index.insert(step.next_latches.clone(), states.len());
                queue.push_back(states.len());
                states.push(step.next_latches);
                parent.push(Some((s, x)));
            }
        }
    }
    Ok(SafetyVerdict::safe())
}
