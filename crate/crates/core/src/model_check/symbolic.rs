use crate::aig::{Aig, Reset};
use crate::bdd::{from_circuit, BddError, BddManager, BddRef, BddResult, BddVar, VarLayout};
use crate::limits::Limits;

use super::{check_supported, ModelCheckError, SafetyVerdict, Trace};

/// Symbolic forward reachability state for one circuit.
///
/// Variables are ordered current latches, inputs, next-state latches.
pub struct Reachability {
    pub mgr: BddManager,
    latch_vars: Vec<BddVar>,
    input_vars: Vec<BddVar>,
    next_vars: Vec<BddVar>,
    next_fns: Vec<BddRef>,
    relation: BddRef,
    output: BddRef,
    pub init: BddRef,
    /// States with some input driving the output to 1.
    pub bad: BddRef,
}

impl Reachability {
    pub fn new(aig: &Aig, limits: &Limits) -> BddResult<Reachability> {
        let layout = VarLayout::sequential(aig);
        let l = aig.latches.len() as u32;
        let base = layout.num_vars();
        let mut mgr = BddManager::new(base + l)
            .with_node_cap(limits.node_cap)
            .with_deadline(limits.deadline);
        let bdds = from_circuit(&mut mgr, aig, &layout)?;
        let next_vars: Vec<BddVar> = (0..l).map(|k| BddVar(base + k)).collect();

        let mut relation = mgr.one();
        for (k, &f) in bdds.next.iter().enumerate().rev() {
            let n = mgr.var(next_vars[k])?;
            let eq = mgr.xnor(n, f)?;
            relation = mgr.and(relation, eq)?;
        }
        let mut init = mgr.one();
        for (k, latch) in aig.latches.iter().enumerate() {
            let v = match latch.reset {
                Reset::One => mgr.var(layout.latches[k])?,
                _ => mgr.nvar(layout.latches[k])?,
            };
            init = mgr.and(init, v)?;
        }
        let output = bdds.outputs[0];
        let bad = mgr.exists(&layout.inputs, output)?;
        Ok(Reachability {
            mgr,
            latch_vars: layout.latches,
            input_vars: layout.inputs,
            next_vars,
            next_fns: bdds.next,
            relation,
            output,
            init,
            bad,
        })
    }

    /// Successors of the states in `set`, over the current-state variables.
    pub fn image(&mut self, set: BddRef) -> BddResult<BddRef> {
        let conj = self.mgr.and(set, self.relation)?;
        let quantified: Vec<BddVar> = self
            .latch_vars
            .iter()
            .chain(&self.input_vars)
            .copied()
            .collect();
        let over_next = self.mgr.exists(&quantified, conj)?;
        let mut rename = Vec::with_capacity(self.next_vars.len());
        for (&n, &q) in self.next_vars.iter().zip(&self.latch_vars) {
            rename.push((n, self.mgr.var(q)?));
        }
        self.mgr.compose(over_next, &rename)
    }

    /// Layers of newly reached states, starting with the initial states.
    /// Stops at the first layer meeting `bad` (returned as `Some(depth)`) or
    /// at the fixpoint.
    pub fn rings(&mut self, limits: &Limits) -> Result<(Vec<BddRef>, Option<usize>), Stop> {
        let step_cap = limits.step_cap.unwrap_or_else(|| {
            1usize
                .checked_shl(self.latch_vars.len() as u32)
                .map_or(usize::MAX, |n| n.saturating_add(1))
        });
        let mut rings = vec![self.init];
        let mut reach = self.init;
        loop {
            let frontier = *rings.last().unwrap();
            let hit = self.mgr.and(frontier, self.bad)?;
            if !self.mgr.is_zero(hit) {
                return Ok((rings.clone(), Some(rings.len() - 1)));
            }
            if rings.len() > step_cap {
                return Err(Stop::Steps(step_cap));
            }
            if limits.expired() {
                return Err(Stop::Bdd(BddError::Timeout));
            }
            let img = self.image(frontier)?;
            let not_reach = self.mgr.not(reach)?;
            let new = self.mgr.and(img, not_reach)?;
            if self.mgr.is_zero(new) {
                return Ok((rings, None));
            }
            let grown = self.mgr.or(reach, new)?;
            debug_assert!(self.mgr.leq(reach, grown)?);
            reach = grown;
            rings.push(new);
        }
    }

    /// Concrete trace through `rings` ending in a violation at `depth`.
    pub fn trace(&mut self, rings: &[BddRef], depth: usize) -> BddResult<Trace> {
        let hit = self.mgr.and(rings[depth], self.output)?;
        let (mut state, inputs) = self.pick(hit)?;
        let mut steps = vec![inputs];
        for j in (0..depth).rev() {
            let mut constraint = rings[j];
            for (k, &f) in self.next_fns.clone().iter().enumerate() {
                let bit = if state[k] { f } else { self.mgr.not(f)? };
                constraint = self.mgr.and(constraint, bit)?;
            }
            let (prev, inputs) = self.pick(constraint)?;
            steps.push(inputs);
            state = prev;
        }
        steps.reverse();
        Ok(Trace { steps })
    }

    /// Concrete latch and input values satisfying `f`.
    fn pick(&self, f: BddRef) -> BddResult<(Vec<bool>, Vec<bool>)> {
        let cube = self
            .mgr
            .sat_one(f)?
            .expect("trace constraint is satisfiable by construction");
        let value = |v: &BddVar| cube[v.0 as usize].unwrap_or(false);
        Ok((
            self.latch_vars.iter().map(value).collect(),
            self.input_vars.iter().map(value).collect(),
        ))
    }
}

/// Why reachability stopped early.
#[derive(Debug)]
pub enum Stop {
    Bdd(BddError),
    Steps(usize),
}

impl From<BddError> for Stop {
    fn from(e: BddError) -> Self {
        Stop::Bdd(e)
    }
}

/// Symbolic safety check by forward reachability. A reachable state where
/// some input makes the output 1 is a violation.
pub fn check_safety(aig: &Aig, limits: &Limits) -> Result<SafetyVerdict, ModelCheckError> {
    check_supported(aig)?;
    let run = || -> Result<SafetyVerdict, Stop> {
        let mut reach = Reachability::new(aig, limits)?;
        match reach.rings(limits)? {
            (_, None) => Ok(SafetyVerdict::safe()),
            (rings, Some(depth)) => Ok(SafetyVerdict::unsafe_with(reach.trace(&rings, depth)?)),
        }
    };
    Ok(match run() {
        Ok(verdict) => verdict,
        Err(Stop::Bdd(e)) => SafetyVerdict::resource_out(e.to_string()),
        Err(Stop::Steps(n)) => SafetyVerdict::resource_out(format!("step cap of {n} reached")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_ascii;
    use crate::model_check::SafetyStatus;

    // 3-bit counter; output when all bits are set
    const COUNTER: &str =
        "aag 9 0 3 1 6\n2 3\n4 12\n6 18\n14\n8 2 4\n10 3 5\n12 9 11\n14 8 6\n16 9 7\n18 15 17\n";

    #[test]
    fn counter_reaches_seven() {
        let aig = parse_ascii(COUNTER).unwrap();
        for s in 0..8u32 {
            let state: Vec<bool> = (0..3).map(|b| s >> b & 1 == 1).collect();
            let next = aig.step(&state, &[]).next_latches;
            let n: u32 = next.iter().enumerate().map(|(b, &v)| (v as u32) << b).sum();
            assert_eq!(n, (s + 1) % 8, "state {s}");
        }
        let v = check_safety(&aig, &Limits::default()).unwrap();
        assert_eq!(v.status, SafetyStatus::Unsafe);
        let trace = v.trace.unwrap();
        assert_eq!(trace.depth(), 7);
        assert!(trace.replays_to_violation(&aig));
    }

    #[test]
    fn rings_grow_monotonically_and_close() {
        let aig = parse_ascii(COUNTER.replace("\n14\n8", "\n0\n8")).unwrap();
        let limits = Limits::default();
        let mut r = Reachability::new(&aig, &limits).unwrap();
        let (rings, hit) = r.rings(&limits).unwrap();
        assert_eq!(hit, None);
        assert_eq!(rings.len(), 8);
        let mut reach = r.mgr.zero();
        for &ring in &rings {
            let grown = r.mgr.or(reach, ring).unwrap();
            assert!(r.mgr.leq(reach, grown).unwrap());
            reach = grown;
        }
        let img = r.image(reach).unwrap();
        assert!(r.mgr.leq(img, reach).unwrap());
        assert!(r.mgr.is_one(reach));
    }

    #[test]
    fn step_cap_and_node_cap_give_resource_out() {
        let aig = parse_ascii(COUNTER).unwrap();
        let limits = Limits {
            step_cap: Some(3),
            ..Limits::default()
        };
        let v = check_safety(&aig, &limits).unwrap();
        assert_eq!(v.status, SafetyStatus::ResourceOut);
        let v = check_safety(&aig, &Limits::default().with_node_cap(8)).unwrap();
        assert_eq!(v.status, SafetyStatus::ResourceOut);
        assert!(v.reason.unwrap().contains("node limit"));
    }
}
