use std::collections::{BTreeSet, HashMap};

use crate::aig::{AndDef, RawAig};
use crate::bdd::{BddManager, BddRef, BddVar};
use crate::literal::{Literal, Var};

use super::{GameError, GameModel, Strategy};

/// Appends AND-gates with fresh variable indices, folding constants.
struct GateBuilder {
    next_var: u32,
    gates: Vec<AndDef>,
}

impl GateBuilder {
    fn and(&mut self, a: Literal, b: Literal) -> Literal {
        if a == Literal::FALSE || b == Literal::FALSE || a == !b {
            return Literal::FALSE;
        }
        if a == Literal::TRUE || a == b {
            return b;
        }
        if b == Literal::TRUE {
            return a;
        }
        let lhs = Var(self.next_var).lit();
        self.next_var += 1;
        self.gates.push(AndDef::new(lhs, a, b));
        lhs
    }

    fn or(&mut self, a: Literal, b: Literal) -> Literal {
        !self.and(!a, !b)
    }
}

/// Emits the solution circuit for a strategy.
///
/// The original lines stay in place, minus the controllable inputs. Each
/// BDD node becomes `v ? hi : lo` built from at most three gates on fresh
/// indices above the spec's maximum variable index. Each controllable
/// variable is then redefined as a gate `c f f` buffering its function.
/// Indices at or below the spec's maximum that nothing defines get
/// constant gates, keeping the maximum index equal to the definition count.
pub fn strategy_to_circuit(game: &GameModel<'_>, strategy: &Strategy) -> Result<RawAig, GameError> {
    let spec = game.spec();
    let aig = spec.aig();

    let layout = game.layout().clone();
    let mut var_lit: HashMap<BddVar, Literal> = HashMap::new();
    for (k, latch) in aig.latches.iter().enumerate() {
        var_lit.insert(layout.latches[k], latch.lit);
    }
    for &k in spec.uncontrollable() {
        var_lit.insert(layout.inputs[k], aig.inputs[k]);
    }

    let mut builder = GateBuilder {
        next_var: aig.max_var + 1,
        gates: Vec::new(),
    };
    let mut memo: HashMap<BddRef, Literal> = HashMap::new();
    let mut roots = Vec::with_capacity(strategy.functions.len());
    for &f in &strategy.functions {
        roots.push(translate(&game.mgr, f, &var_lit, &mut builder, &mut memo)?);
    }

    let mut raw = aig.raw().clone();
    raw.inputs = spec
        .uncontrollable()
        .iter()
        .map(|&k| aig.inputs[k])
        .collect();
    raw.gates.extend(builder.gates);
    for (&k, &root) in spec.controllable().iter().zip(&roots) {
        raw.gates.push(AndDef::new(aig.inputs[k], root, root));
    }

    let defined: BTreeSet<u32> = raw.definitions().map(|(v, _)| v.0).collect();
    for v in 1..=aig.max_var {
        if !defined.contains(&v) {
            raw.gates
                .push(AndDef::new(Var(v).lit(), Literal::FALSE, Literal::FALSE));
        }
    }
    raw.max_var = builder.next_var - 1;

    debug_assert!(raw.gates[aig.gates.len()..].iter().all(|g| {
        [g.rhs0, g.rhs1].iter().all(|r| {
            r.var().0 > aig.max_var
                || r.is_constant()
                || !matches!(aig.definition(r.var()), crate::aig::VarDef::Gate(_))
        })
    }));
    Ok(raw)
}

fn translate(
    mgr: &BddManager,
    f: BddRef,
    var_lit: &HashMap<BddVar, Literal>,
    builder: &mut GateBuilder,
    memo: &mut HashMap<BddRef, Literal>,
) -> Result<Literal, GameError> {
    // explicit stack: (node, children done)
    let mut stack = vec![(f, false)];
    while let Some((node, expanded)) = stack.pop() {
        if memo.contains_key(&node) {
            continue;
        }
        match mgr.decompose(node)? {
            None => {
                memo.insert(node, Literal::from(mgr.is_one(node)));
            }
            Some((var, lo, hi)) => {
                if expanded {
                    let v = *var_lit
                        .get(&var)
                        .expect("strategy depends only on latches and uncontrollable inputs");
                    let (hi, lo) = (memo[&hi], memo[&lo]);
                    let then = builder.and(v, hi);
                    let other = builder.and(!v, lo);
                    memo.insert(node, builder.or(then, other));
                } else {
                    stack.push((node, true));
                    stack.push((hi, false));
                    stack.push((lo, false));
                }
            }
        }
    }
    Ok(memo[&f])
}
