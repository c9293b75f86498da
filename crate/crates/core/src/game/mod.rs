//! Safety games on synthesis specifications.
//!
//! The environment picks the uncontrollable inputs, then the controller
//! picks the controllable ones knowing them. The controller wins from a
//! state if it can keep the output 0 forever. The winning region is the
//! greatest fixpoint `W = νX. ∀u ∃c. ¬Err ∧ Next ∈ X`, and the spec is
//! realizable iff the initial state lies in `W`.

mod emit;

pub use emit::strategy_to_circuit;

use std::fmt;

use thiserror::Error;

use crate::aig::{Aig, RawAig, Reset};
use crate::bdd::{from_circuit, BddError, BddManager, BddRef, BddVar, VarLayout};
use crate::check::{check_solution, CheckReport};
use crate::limits::Limits;
use crate::model_check::{check_safety, SafetyStatus, SafetyVerdict};
use crate::spec::SynthesisSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("latch {latch} starts uninitialized, which is not supported")]
    UnsupportedReset { latch: usize },
    #[error("resource limit: {0}")]
    Resource(#[from] BddError),
    #[error("winning-region fixpoint did not converge within {0} iterations")]
    StepCap(usize),
    #[error("strategy extraction left a winning state without a safe move")]
    InternalNonWinning,
}

impl GameError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, GameError::Resource(_) | GameError::StepCap(_))
    }
}

/// Symbolic encoding of a spec as a game. Variables are ordered latches,
/// uncontrollable inputs, controllable inputs.
pub struct GameModel<'a> {
    spec: &'a SynthesisSpec,
    pub mgr: BddManager,
    layout: VarLayout,
    pub latch_vars: Vec<BddVar>,
    pub u_vars: Vec<BddVar>,
    /// In the order of `spec.controllable()`.
    pub c_vars: Vec<BddVar>,
    pub err: BddRef,
    pub next: Vec<BddRef>,
    pub init: BddRef,
    limits: Limits,
}

/// Controller function per controllable input, over latches and
/// uncontrollable inputs, in the order of `spec.controllable()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub functions: Vec<BddRef>,
}

impl<'a> GameModel<'a> {
    pub fn new(spec: &'a SynthesisSpec, limits: &Limits) -> Result<GameModel<'a>, GameError> {
        let aig = spec.aig();
        if let Some(latch) = aig
            .latches
            .iter()
            .position(|l| l.reset == Reset::Uninitialized)
        {
            return Err(GameError::UnsupportedReset { latch });
        }
        let layout = VarLayout::for_spec(spec);
        let mut mgr = BddManager::new(layout.num_vars())
            .with_node_cap(limits.node_cap)
            .with_deadline(limits.deadline);
        let bdds = from_circuit(&mut mgr, aig, &layout)?;
        let mut init = mgr.one();
        for (k, latch) in aig.latches.iter().enumerate() {
            let v = match latch.reset {
                Reset::One => mgr.var(layout.latches[k])?,
                _ => mgr.nvar(layout.latches[k])?,
            };
            init = mgr.and(init, v)?;
        }
        Ok(GameModel {
            spec,
            latch_vars: layout.latches.clone(),
            u_vars: spec
                .uncontrollable()
                .iter()
                .map(|&k| layout.inputs[k])
                .collect(),
            c_vars: spec
                .controllable()
                .iter()
                .map(|&k| layout.inputs[k])
                .collect(),
            err: bdds.outputs[0],
            next: bdds.next,
            init,
            layout,
            mgr,
            limits: *limits,
        })
    }

    pub fn spec(&self) -> &'a SynthesisSpec {
        self.spec
    }

    pub fn layout(&self) -> &VarLayout {
        &self.layout
    }

    /// `set` evaluated on successor states.
    fn successor(&mut self, set: BddRef) -> Result<BddRef, BddError> {
        let substitution: Vec<(BddVar, BddRef)> = self
            .latch_vars
            .iter()
            .copied()
            .zip(self.next.iter().copied())
            .collect();
        self.mgr.compose(set, &substitution)
    }

    /// Controllable predecessor: states where every `u` has some `c`
    /// avoiding the error and staying in `target`.
    pub fn cpre(&mut self, target: BddRef) -> Result<BddRef, BddError> {
        let moved = self.successor(target)?;
        let not_err = self.mgr.not(self.err)?;
        let good = self.mgr.and(not_err, moved)?;
        let some_c = self.mgr.exists(&self.c_vars.clone(), good)?;
        self.mgr.forall(&self.u_vars.clone(), some_c)
    }

    pub fn winning_region(&mut self) -> Result<BddRef, GameError> {
        let cap = self.limits.step_cap.unwrap_or_else(|| {
            1usize
                .checked_shl(self.latch_vars.len() as u32)
                .map_or(usize::MAX, |n| n.saturating_add(1))
        });
        let mut x = self.mgr.one();
        for _ in 0..=cap {
            if self.limits.expired() {
                return Err(BddError::Timeout.into());
            }
            let y = self.cpre(x)?;
            if y == x {
                return Ok(x);
            }
            x = y;
        }
        Err(GameError::StepCap(cap))
    }

    pub fn is_realizable(&mut self, w: BddRef) -> Result<bool, GameError> {
        Ok(self.mgr.leq(self.init, w)?)
    }

    /// Moves that avoid the error and stay in `w`, from states in `w`.
    pub fn allowed(&mut self, w: BddRef) -> Result<BddRef, BddError> {
        let moved = self.successor(w)?;
        let not_err = self.mgr.not(self.err)?;
        let good = self.mgr.and(not_err, moved)?;
        self.mgr.and(w, good)
    }

    /// Fixes the controllable inputs one at a time, choosing 1 whenever
    /// some completion of the remaining inputs stays allowed.
    pub fn extract_strategy(&mut self, w: BddRef) -> Result<Strategy, GameError> {
        let mut allowed = self.allowed(w)?;
        let c_vars = self.c_vars.clone();
        let mut functions = Vec::with_capacity(c_vars.len());
        for (i, &c) in c_vars.iter().enumerate() {
            let with_one = self.mgr.restrict(allowed, c, true)?;
            let f = self.mgr.exists(&c_vars[i + 1..], with_one)?;
            allowed = self.mgr.compose(allowed, &[(c, f)])?;
            functions.push(f);
        }
        // every winning state still has a move for every u
        let moves = self.mgr.forall(&self.u_vars.clone(), allowed)?;
        if !self.mgr.leq(w, moves)? {
            return Err(GameError::InternalNonWinning);
        }
        Ok(Strategy { functions })
    }

    /// Whether plugging the strategy into the game keeps every state of `w`
    /// safe and inside `w` for every uncontrollable input.
    pub fn strategy_keeps(&mut self, w: BddRef, strategy: &Strategy) -> Result<bool, GameError> {
        if strategy.functions.len() != self.c_vars.len() {
            return Ok(false);
        }
        for &f in &strategy.functions {
            let support = self.mgr.support(f)?;
            if support.iter().any(|v| self.c_vars.contains(v)) {
                return Ok(false);
            }
        }
        let allowed = self.allowed(w)?;
        let substitution: Vec<(BddVar, BddRef)> = self
            .c_vars
            .iter()
            .copied()
            .zip(strategy.functions.iter().copied())
            .collect();
        let closed = self.mgr.compose(allowed, &substitution)?;
        let all_u = self.mgr.forall(&self.u_vars.clone(), closed)?;
        Ok(self.mgr.leq(w, all_u)?)
    }
}

/// Whether the controller can keep the spec's output 0 forever.
pub fn realizable(spec: &SynthesisSpec, limits: &Limits) -> Result<bool, GameError> {
    let mut game = GameModel::new(spec, limits)?;
    let w = game.winning_region()?;
    game.is_realizable(w)
}

/// Result of the three independent checks on a strategy.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    /// The symbolic strategy contract holds.
    pub contract: bool,
    pub solution: RawAig,
    pub syntax: CheckReport,
    /// `None` if the emitted circuit is not even well formed.
    pub safety: Option<SafetyVerdict>,
}

impl StrategyReport {
    pub fn passed(&self) -> bool {
        self.contract
            && self.syntax.passed()
            && self
                .safety
                .as_ref()
                .is_some_and(|v| v.status == SafetyStatus::Safe)
    }
}

impl fmt::Display for StrategyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let safety = match &self.safety {
            Some(v) => v.status.to_string(),
            None => "not checked".to_string(),
        };
        write!(
            f,
            "contract {}, syntax {}, model check {}",
            if self.contract { "holds" } else { "broken" },
            if self.syntax.passed() { "pass" } else { "fail" },
            safety
        )
    }
}

/// Checks the strategy symbolically, emits it, and runs the solution
/// checker and the model checker on the emitted circuit.
pub fn verify_strategy(
    game: &mut GameModel<'_>,
    w: BddRef,
    strategy: &Strategy,
) -> Result<StrategyReport, GameError> {
    let contract = game.strategy_keeps(w, strategy)?;
    let solution = strategy_to_circuit(game, strategy)?;
    let syntax = check_solution(game.spec(), &solution);
    let safety = Aig::new(solution.clone())
        .ok()
        .and_then(|aig| check_safety(&aig, &game.limits).ok());
    Ok(StrategyReport {
        contract,
        solution,
        syntax,
        safety,
    })
}

#[derive(Debug, Clone)]
pub enum Synthesis {
    Unrealizable,
    Realizable(RawAig),
}

/// Decides realizability and, when realizable, emits a solution.
pub fn synthesize(spec: &SynthesisSpec, limits: &Limits) -> Result<Synthesis, GameError> {
    let mut game = GameModel::new(spec, limits)?;
    let w = game.winning_region()?;
    if !game.is_realizable(w)? {
        return Ok(Synthesis::Unrealizable);
    }
    let strategy = game.extract_strategy(w)?;
    Ok(Synthesis::Realizable(strategy_to_circuit(
        &game, &strategy,
    )?))
}
