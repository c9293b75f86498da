//! Toolchain for safety synthesis problems written as AIGER circuits.
//!
//! A specification is an ASCII AIGER file with a single output that must
//! stay 0 forever; inputs whose symbol names start with `controllable_` are
//! driven by the controller to be synthesized, all other inputs by the
//! environment. A solution is the same file with the controllable inputs
//! replaced by controller logic built from latches, uncontrollable inputs
//! and new AND-gates.

pub mod aig;
pub mod aiger;
pub mod bdd;
pub mod check;
pub mod game;
pub mod limits;
pub mod literal;
pub mod model_check;
pub mod spec;

pub use aig::{Aig, AndDef, LatchDef, RawAig, Reset, Rule, SymbolEntry, SymbolKind};
pub use aiger::{
    parse_ascii, parse_ascii_with, parse_raw, write_ascii, ParseDiagnostic, ParseOptions,
};
pub use check::{check_solution, CheckReport, CheckRule, HeaderDelta};
pub use game::{realizable, synthesize, GameModel, Strategy, Synthesis};
pub use limits::Limits;
pub use literal::{Literal, Var};
pub use model_check::{check_safety, explicit_reach, SafetyStatus, SafetyVerdict, Trace};
pub use spec::{classify, mark_controllable, SynthesisSpec};
