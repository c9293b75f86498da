//! Synthesis specifications: the partition of inputs into controllable and
//! uncontrollable ones, read from and written to the symbol table.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::aig::{Aig, SymbolEntry, SymbolKind};
use crate::literal::Var;

/// Symbol-name prefix reserved for inputs driven by the controller.
pub const CONTROLLABLE_PREFIX: &str = "controllable_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("a synthesis specification needs exactly one output, found {found}")]
    NotSingleOutput { found: usize },
    #[error("bad-state and invariant-constraint properties are not supported in specifications")]
    UnsupportedProperties,
    #[error("no input matches {0:?}")]
    UnknownInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// A latch or output name carries the reserved prefix; it has no meaning
    /// there.
    PrefixOnNonInput {
        kind: SymbolKind,
        position: usize,
    },
    AlreadyControllable {
        position: usize,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::PrefixOnNonInput { kind, position } => write!(
                f,
                "symbol {}{position} uses the `{CONTROLLABLE_PREFIX}` prefix outside the inputs; ignored",
                kind.prefix()
            ),
            Warning::AlreadyControllable { position } => {
                write!(f, "input {position} is already controllable")
            }
        }
    }
}

pub fn is_controllable_name(name: &str) -> bool {
    name.starts_with(CONTROLLABLE_PREFIX)
}

/// A single-output circuit with its inputs split between controller and
/// environment. Positions are input ordinals in definition order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisSpec {
    aig: Aig,
    controllable: Vec<usize>,
    uncontrollable: Vec<usize>,
    warnings: Vec<Warning>,
}

impl SynthesisSpec {
    pub fn aig(&self) -> &Aig {
        &self.aig
    }

    pub fn into_aig(self) -> Aig {
        self.aig
    }

    pub fn controllable(&self) -> &[usize] {
        &self.controllable
    }

    pub fn uncontrollable(&self) -> &[usize] {
        &self.uncontrollable
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn is_controllable(&self, position: usize) -> bool {
        self.controllable.binary_search(&position).is_ok()
    }

    pub fn controllable_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.controllable.iter().map(|&k| self.aig.inputs[k].var())
    }

    pub fn uncontrollable_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.uncontrollable
            .iter()
            .map(|&k| self.aig.inputs[k].var())
    }

    /// The single output literal.
    pub fn output(&self) -> crate::Literal {
        self.aig.outputs[0]
    }
}

/// Splits the inputs by the reserved prefix. Inputs without a symbol are
/// uncontrollable.
pub fn classify(aig: Aig) -> Result<SynthesisSpec, SpecError> {
    if aig.outputs.len() != 1 {
        return Err(SpecError::NotSingleOutput {
            found: aig.outputs.len(),
        });
    }
    if !aig.bad.is_empty() || !aig.constraints.is_empty() {
        return Err(SpecError::UnsupportedProperties);
    }
    let (controllable, uncontrollable) = (0..aig.inputs.len()).partition(|&k| {
        aig.symbol(SymbolKind::Input, k)
            .is_some_and(is_controllable_name)
    });
    let warnings = aig
        .symbols
        .iter()
        .filter(|s| s.kind != SymbolKind::Input && is_controllable_name(&s.name))
        .map(|s| Warning::PrefixOnNonInput {
            kind: s.kind,
            position: s.position,
        })
        .collect();
    Ok(SynthesisSpec {
        aig,
        controllable,
        uncontrollable,
        warnings,
    })
}

/// Input reference used when marking inputs as controllable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InputSelector {
    Position(usize),
    Name(String),
}

impl FromStr for InputSelector {
    type Err = std::convert::Infallible;

    /// Decimal numbers are positions, anything else is a symbol name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse() {
            Ok(position) if s.bytes().all(|b| b.is_ascii_digit()) => {
                InputSelector::Position(position)
            }
            _ => InputSelector::Name(s.to_string()),
        })
    }
}

impl fmt::Display for InputSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSelector::Position(p) => write!(f, "{p}"),
            InputSelector::Name(n) => f.write_str(n),
        }
    }
}

/// Makes the selected inputs controllable by prefixing their symbol names.
/// Unnamed inputs get the name `controllable_<position>`, appended to the
/// symbol table. Nothing but the symbol table changes.
pub fn mark_controllable(
    aig: Aig,
    selection: &[InputSelector],
) -> Result<(Aig, Vec<Warning>), SpecError> {
    let mut positions = Vec::new();
    for sel in selection {
        let position = match sel {
            InputSelector::Position(p) if *p < aig.inputs.len() => *p,
            InputSelector::Name(name) => aig
                .symbols
                .iter()
                .find(|s| {
                    s.kind == SymbolKind::Input && &s.name == name && s.position < aig.inputs.len()
                })
                .map(|s| s.position)
                .ok_or_else(|| SpecError::UnknownInput(name.clone()))?,
            InputSelector::Position(_) => return Err(SpecError::UnknownInput(sel.to_string())),
        };
        if !positions.contains(&position) {
            positions.push(position);
        }
    }

    let mut warnings = Vec::new();
    let mut symbols = aig.symbols.clone();
    for position in positions {
        match symbols
            .iter_mut()
            .find(|s| s.kind == SymbolKind::Input && s.position == position)
        {
            Some(sym) if is_controllable_name(&sym.name) => {
                warnings.push(Warning::AlreadyControllable { position })
            }
            Some(sym) => sym.name.insert_str(0, CONTROLLABLE_PREFIX),
            None => symbols.push(SymbolEntry::new(
                SymbolKind::Input,
                position,
                format!("{CONTROLLABLE_PREFIX}{position}"),
            )),
        }
    }
    let aig = aig
        .with_symbols(symbols)
        .expect("renaming existing entries keeps the symbol table valid");
    Ok((aig, warnings))
}
