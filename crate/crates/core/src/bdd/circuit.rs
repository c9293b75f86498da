use crate::aig::{Aig, VarDef};
use crate::literal::{Literal, Var};
use crate::spec::SynthesisSpec;

use super::{BddManager, BddRef, BddResult, BddVar};

/// Assignment of circuit latches and inputs to BDD variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarLayout {
    /// BDD variable of each latch, by latch position.
    pub latches: Vec<BddVar>,
    /// BDD variable of each input, by input position.
    pub inputs: Vec<BddVar>,
}

impl VarLayout {
    /// Latches first, then inputs, each in definition order.
    pub fn sequential(aig: &Aig) -> VarLayout {
        let l = aig.latches.len() as u32;
        VarLayout {
            latches: (0..l).map(BddVar).collect(),
            inputs: (0..aig.inputs.len() as u32)
                .map(|k| BddVar(l + k))
                .collect(),
        }
    }

    /// Latches, then uncontrollable inputs, then controllable inputs.
    pub fn for_spec(spec: &SynthesisSpec) -> VarLayout {
        let aig = spec.aig();
        let l = aig.latches.len() as u32;
        let mut inputs = vec![BddVar(0); aig.inputs.len()];
        let order = spec.uncontrollable().iter().chain(spec.controllable());
        for (k, &position) in order.enumerate() {
            inputs[position] = BddVar(l + k as u32);
        }
        VarLayout {
            latches: (0..l).map(BddVar).collect(),
            inputs,
        }
    }

    pub fn num_vars(&self) -> u32 {
        (self.latches.len() + self.inputs.len()) as u32
    }
}

/// BDDs of the combinational functions of a circuit.
#[derive(Debug, Clone)]
pub struct CircuitBdds {
    values: Vec<Option<BddRef>>,
    pub outputs: Vec<BddRef>,
    /// Next-state function of each latch.
    pub next: Vec<BddRef>,
}

impl CircuitBdds {
    /// BDD of a positive variable.
    pub fn var(&self, var: Var) -> Option<BddRef> {
        self.values.get(var.index()).copied().flatten()
    }

    pub fn lit(&self, mgr: &mut BddManager, lit: Literal) -> BddResult<BddRef> {
        let f = self
            .var(lit.var())
            .expect("literal of a validated circuit is defined");
        if lit.is_negated() {
            mgr.not(f)
        } else {
            Ok(f)
        }
    }
}

/// Builds the function of every gate bottom-up in topological order.
pub fn from_circuit(mgr: &mut BddManager, aig: &Aig, layout: &VarLayout) -> BddResult<CircuitBdds> {
    let size = aig.max_var as usize + 1;
    let mut values: Vec<Option<BddRef>> = vec![None; size];
    values[0] = Some(mgr.zero());
    for (k, lit) in aig.inputs.iter().enumerate() {
        values[lit.var().index()] = Some(mgr.var(layout.inputs[k])?);
    }
    for (k, latch) in aig.latches.iter().enumerate() {
        values[latch.lit.var().index()] = Some(mgr.var(layout.latches[k])?);
    }
    let mut bdds = CircuitBdds {
        values,
        outputs: Vec::new(),
        next: Vec::new(),
    };
    for &k in aig.gate_order() {
        let gate = aig.gates[k];
        let a = bdds.lit(mgr, gate.rhs0)?;
        let b = bdds.lit(mgr, gate.rhs1)?;
        bdds.values[gate.lhs.var().index()] = Some(mgr.and(a, b)?);
    }
    debug_assert!((1..size).all(|v| {
        (bdds.values[v].is_some()) == (aig.definition(Var(v as u32)) != VarDef::Undefined)
    }));
    for &out in &aig.outputs {
        let f = bdds.lit(mgr, out)?;
        bdds.outputs.push(f);
    }
    for latch in &aig.latches {
        let f = bdds.lit(mgr, latch.next)?;
        bdds.next.push(f);
    }
    Ok(bdds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_ascii;
    use crate::spec::classify;

    #[test]
    fn buffer_output_is_the_input() {
        let aig = parse_ascii("aag 1 1 0 1 0\n2\n2\n").unwrap();
        let mut m = BddManager::new(1);
        let bdds = from_circuit(&mut m, &aig, &VarLayout::sequential(&aig)).unwrap();
        assert_eq!(bdds.outputs[0], m.var(BddVar(0)).unwrap());
    }

    #[test]
    fn xor_output() {
        let spec = classify(
            parse_ascii("aag 5 2 0 1 3\n2\n4\n11\n6 2 5\n8 3 4\n10 7 9\ni1 controllable_c\n")
                .unwrap(),
        )
        .unwrap();
        let layout = VarLayout::for_spec(&spec);
        assert_eq!(layout.inputs, vec![BddVar(0), BddVar(1)]);
        let mut m = BddManager::new(layout.num_vars());
        let bdds = from_circuit(&mut m, spec.aig(), &layout).unwrap();
        let u = m.var(BddVar(0)).unwrap();
        let c = m.var(BddVar(1)).unwrap();
        assert_eq!(bdds.outputs[0], m.xor(u, c).unwrap());
    }

    #[test]
    fn toggle_next_state() {
        let aig = parse_ascii("aag 1 0 1 1 0\n2 3\n2\n").unwrap();
        let mut m = BddManager::new(1);
        let bdds = from_circuit(&mut m, &aig, &VarLayout::sequential(&aig)).unwrap();
        assert_eq!(bdds.next[0], m.nvar(BddVar(0)).unwrap());
        assert_eq!(bdds.outputs[0], m.var(BddVar(0)).unwrap());
    }

    #[test]
    fn controllable_inputs_go_last() {
        let spec =
            classify(parse_ascii("aag 3 3 0 1 0\n2\n4\n6\n2\ni0 controllable_a\ni2 b\n").unwrap())
                .unwrap();
        let layout = VarLayout::for_spec(&spec);
        assert_eq!(layout.inputs, vec![BddVar(2), BddVar(0), BddVar(1)]);
    }
}
