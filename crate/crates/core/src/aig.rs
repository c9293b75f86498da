//! And-inverter graph data model and its execution semantics.
//!
//! [`RawAig`] is the plain content of an ASCII AIGER file: the definition
//! lists in file order, the symbol table and the comments. It only has to be
//! lexically sound. [`Aig`] wraps a `RawAig` that additionally satisfies the
//! graph invariants (every referenced variable defined exactly once, literals
//! within the `2M+1` bound, no combinational loops) and caches a topological
//! order of the gates, so it can be simulated.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use crate::literal::{Literal, Var};

/// Largest accepted maximum variable index.
pub const MAX_VAR_INDEX: u32 = 1 << 28;

/// Initial value of a latch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Reset {
    #[default]
    Zero,
    One,
    /// Reset literal equal to the latch literal: the latch starts with an
    /// arbitrary value.
    Uninitialized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatchDef {
    pub lit: Literal,
    pub next: Literal,
    pub reset: Reset,
}

impl LatchDef {
    pub fn new(lit: Literal, next: Literal) -> Self {
        LatchDef {
            lit,
            next,
            reset: Reset::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndDef {
    pub lhs: Literal,
    pub rhs0: Literal,
    pub rhs1: Literal,
}

impl AndDef {
    pub fn new(lhs: Literal, rhs0: Literal, rhs1: Literal) -> Self {
        AndDef { lhs, rhs0, rhs1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum SymbolKind {
    Input,
    Latch,
    Output,
}

impl SymbolKind {
    pub fn prefix(self) -> char {
        match self {
            SymbolKind::Input => 'i',
            SymbolKind::Latch => 'l',
            SymbolKind::Output => 'o',
        }
    }
}

/// One line of the symbol table. `position` is the ordinal of the named item
/// among the items of its kind, not its variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolEntry {
    pub kind: SymbolKind,
    pub position: usize,
    pub name: String,
}

impl SymbolEntry {
    pub fn new(kind: SymbolKind, position: usize, name: impl Into<String>) -> Self {
        SymbolEntry {
            kind,
            position,
            name: name.into(),
        }
    }
}

/// Counts of the extended header (`B C J F`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ExtensionHeader {
    pub bad: usize,
    pub constraints: usize,
    pub justice: usize,
    pub fairness: usize,
}

impl ExtensionHeader {
    pub fn is_empty(&self) -> bool {
        *self == ExtensionHeader::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Header {
    pub m: u32,
    pub i: usize,
    pub l: usize,
    pub o: usize,
    pub a: usize,
    pub ext: Option<ExtensionHeader>,
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "aag {} {} {} {} {}",
            self.m, self.i, self.l, self.o, self.a
        )?;
        if let Some(ext) = self.ext {
            let fields = [ext.bad, ext.constraints, ext.justice, ext.fairness];
            let used = fields.iter().rposition(|&n| n != 0).map_or(0, |p| p + 1);
            for n in &fields[..used] {
                write!(f, " {}", n)?;
            }
        }
        Ok(())
    }
}

/// Stable identifiers of the well-formedness rules for AIGER files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    BadMagic,
    MalformedHeader,
    MalformedLine,
    CountMismatch,
    InvalidUtf8,
    OddLhs,
    ConstantLhs,
    LiteralOutOfRange,
    DuplicateDefinition,
    UndefinedLiteral,
    MalformedReset,
    MalformedSymbol,
    DuplicateSymbol,
    SymbolOutOfRange,
    CyclicGates,
    UnsupportedProperty,
}

impl Rule {
    pub const ALL: [Rule; 16] = [
        Rule::BadMagic,
        Rule::MalformedHeader,
        Rule::MalformedLine,
        Rule::CountMismatch,
        Rule::InvalidUtf8,
        Rule::OddLhs,
        Rule::ConstantLhs,
        Rule::LiteralOutOfRange,
        Rule::DuplicateDefinition,
        Rule::UndefinedLiteral,
        Rule::MalformedReset,
        Rule::MalformedSymbol,
        Rule::DuplicateSymbol,
        Rule::SymbolOutOfRange,
        Rule::CyclicGates,
        Rule::UnsupportedProperty,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::BadMagic => "bad-magic",
            Rule::MalformedHeader => "malformed-header",
            Rule::MalformedLine => "malformed-line",
            Rule::CountMismatch => "count-mismatch",
            Rule::InvalidUtf8 => "invalid-utf8",
            Rule::OddLhs => "odd-lhs",
            Rule::ConstantLhs => "constant-lhs",
            Rule::LiteralOutOfRange => "literal-out-of-range",
            Rule::DuplicateDefinition => "duplicate-definition",
            Rule::UndefinedLiteral => "undefined-literal",
            Rule::MalformedReset => "malformed-reset",
            Rule::MalformedSymbol => "malformed-symbol",
            Rule::DuplicateSymbol => "duplicate-symbol",
            Rule::SymbolOutOfRange => "symbol-out-of-range",
            Rule::CyclicGates => "cyclic-gates",
            Rule::UnsupportedProperty => "unsupported-property",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Item of a circuit a defect is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Item {
    Header,
    Input(usize),
    Latch(usize),
    Output(usize),
    Bad(usize),
    Constraint(usize),
    Gate(usize),
    Symbol(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub rule: Rule,
    pub item: Item,
    pub message: String,
}

impl Defect {
    fn new(rule: Rule, item: Item, message: impl Into<String>) -> Self {
        Defect {
            rule,
            item,
            message: message.into(),
        }
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:?}: {}", self.rule, self.item, self.message)
    }
}

/// Unvalidated circuit content in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawAig {
    pub max_var: u32,
    pub inputs: Vec<Literal>,
    pub latches: Vec<LatchDef>,
    pub outputs: Vec<Literal>,
    pub bad: Vec<Literal>,
    pub constraints: Vec<Literal>,
    pub gates: Vec<AndDef>,
    pub symbols: Vec<SymbolEntry>,
    pub comments: Vec<String>,
}

impl RawAig {
    pub fn header(&self) -> Header {
        let ext = ExtensionHeader {
            bad: self.bad.len(),
            constraints: self.constraints.len(),
            justice: 0,
            fairness: 0,
        };
        Header {
            m: self.max_var,
            i: self.inputs.len(),
            l: self.latches.len(),
            o: self.outputs.len(),
            a: self.gates.len(),
            ext: (!ext.is_empty()).then_some(ext),
        }
    }

    /// Name of the symbol-table entry for `(kind, position)`, if any.
    pub fn symbol(&self, kind: SymbolKind, position: usize) -> Option<&str> {
        self.symbols
            .iter()
            .find(|s| s.kind == kind && s.position == position)
            .map(|s| s.name.as_str())
    }

    /// Checks that only need a single item: even non-constant left-hand
    /// sides, legal reset literals, well-formed and unique symbol entries.
    pub fn local_defects(&self) -> Vec<Defect> {
        let mut out = Vec::new();
        let lhs = |lit: Literal, item: Item, what: &str, out: &mut Vec<Defect>| {
            if lit.is_negated() {
                out.push(Defect::new(
                    Rule::OddLhs,
                    item,
                    format!("{what} literal must be even, found {lit}"),
                ));
            } else if lit.is_constant() {
                out.push(Defect::new(
                    Rule::ConstantLhs,
                    item,
                    format!("{what} cannot redefine the constant"),
                ));
            }
        };
        for (k, &lit) in self.inputs.iter().enumerate() {
            lhs(lit, Item::Input(k), "input", &mut out);
        }
        for (k, latch) in self.latches.iter().enumerate() {
            lhs(latch.lit, Item::Latch(k), "latch", &mut out);
        }
        for (k, gate) in self.gates.iter().enumerate() {
            lhs(gate.lhs, Item::Gate(k), "and-gate", &mut out);
        }

        let mut seen = HashSet::new();
        for (k, sym) in self.symbols.iter().enumerate() {
            if sym.name.is_empty() || sym.name.contains('\n') {
                out.push(Defect::new(
                    Rule::MalformedSymbol,
                    Item::Symbol(k),
                    "symbol name must be non-empty and single-line",
                ));
            }
            if !seen.insert((sym.kind, sym.position)) {
                out.push(Defect::new(
                    Rule::DuplicateSymbol,
                    Item::Symbol(k),
                    format!("second symbol for {}{}", sym.kind.prefix(), sym.position),
                ));
            }
        }
        out
    }

    /// Symbol entries whose ordinal exceeds the number of items of their
    /// kind.
    pub fn symbol_range_defects(&self) -> Vec<Defect> {
        self.symbols
            .iter()
            .enumerate()
            .filter_map(|(k, sym)| {
                let count = match sym.kind {
                    SymbolKind::Input => self.inputs.len(),
                    SymbolKind::Latch => self.latches.len(),
                    SymbolKind::Output => self.outputs.len(),
                };
                (sym.position >= count).then(|| {
                    Defect::new(
                        Rule::SymbolOutOfRange,
                        Item::Symbol(k),
                        format!(
                            "symbol {}{} refers past the {} defined items",
                            sym.kind.prefix(),
                            sym.position,
                            count
                        ),
                    )
                })
            })
            .collect()
    }

    /// Variables defined by inputs, latches and gates, tagged with their
    /// definition. Later duplicates are included.
    pub fn definitions(&self) -> impl Iterator<Item = (Var, VarDef)> + '_ {
        let inputs = self
            .inputs
            .iter()
            .enumerate()
            .map(|(k, l)| (l.var(), VarDef::Input(k)));
        let latches = self
            .latches
            .iter()
            .enumerate()
            .map(|(k, l)| (l.lit.var(), VarDef::Latch(k)));
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(k, g)| (g.lhs.var(), VarDef::Gate(k)));
        inputs.chain(latches).chain(gates)
    }
}

/// How a variable is defined in a validated circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarDef {
    Constant,
    Input(usize),
    Latch(usize),
    Gate(usize),
    Undefined,
}

/// A validated and-inverter graph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Aig {
    raw: RawAig,
    defs: Vec<VarDef>,
    gate_order: Vec<usize>,
}

impl PartialEq for Aig {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}

impl Eq for Aig {}

impl Deref for Aig {
    type Target = RawAig;

    fn deref(&self) -> &RawAig {
        &self.raw
    }
}

impl TryFrom<RawAig> for Aig {
    type Error = Vec<Defect>;

    fn try_from(raw: RawAig) -> Result<Self, Self::Error> {
        Aig::new(raw)
    }
}

impl Aig {
    pub fn new(raw: RawAig) -> Result<Aig, Vec<Defect>> {
        let mut defects = raw.local_defects();
        if raw.max_var > MAX_VAR_INDEX {
            defects.push(Defect::new(
                Rule::MalformedHeader,
                Item::Header,
                format!("maximum variable index exceeds {MAX_VAR_INDEX}"),
            ));
            return Err(defects);
        }
        let bound = 2 * raw.max_var + 1;

        let mut defs = vec![VarDef::Undefined; raw.max_var as usize + 1];
        defs[0] = VarDef::Constant;
        for (var, def) in raw.definitions() {
            if var == Var::CONST {
                // already reported as constant-lhs
                continue;
            }
            let item = def_item(def);
            if var.0 > raw.max_var {
                defects.push(Defect::new(
                    Rule::LiteralOutOfRange,
                    item,
                    format!("literal {} exceeds 2M+1 = {bound}", var.lit()),
                ));
                continue;
            }
            match defs[var.index()] {
                VarDef::Undefined => defs[var.index()] = def,
                _ => defects.push(Defect::new(
                    Rule::DuplicateDefinition,
                    item,
                    format!("variable {var} is already defined"),
                )),
            }
        }

        let reference = |lit: Literal, item: Item, defects: &mut Vec<Defect>| {
            if lit.code() > bound {
                defects.push(Defect::new(
                    Rule::LiteralOutOfRange,
                    item,
                    format!("literal {lit} exceeds 2M+1 = {bound}"),
                ));
            } else if defs[lit.var().index()] == VarDef::Undefined {
                defects.push(Defect::new(
                    Rule::UndefinedLiteral,
                    item,
                    format!("literal {lit} refers to undefined variable {}", lit.var()),
                ));
            }
        };
        for (k, latch) in raw.latches.iter().enumerate() {
            reference(latch.next, Item::Latch(k), &mut defects);
        }
        for (k, &lit) in raw.outputs.iter().enumerate() {
            reference(lit, Item::Output(k), &mut defects);
        }
        for (k, &lit) in raw.bad.iter().enumerate() {
            reference(lit, Item::Bad(k), &mut defects);
        }
        for (k, &lit) in raw.constraints.iter().enumerate() {
            reference(lit, Item::Constraint(k), &mut defects);
        }
        for (k, gate) in raw.gates.iter().enumerate() {
            reference(gate.rhs0, Item::Gate(k), &mut defects);
            reference(gate.rhs1, Item::Gate(k), &mut defects);
        }
        if !defects.is_empty() {
            return Err(defects);
        }

        match topological_order(&raw.gates, |v| match defs[v.index()] {
            VarDef::Gate(k) => Some(k),
            _ => None,
        }) {
            Ok(gate_order) => Ok(Aig {
                raw,
                defs,
                gate_order,
            }),
            Err(k) => Err(vec![Defect::new(
                Rule::CyclicGates,
                Item::Gate(k),
                format!(
                    "and-gate {} is part of a combinational loop",
                    raw.gates[k].lhs
                ),
            )]),
        }
    }

    pub fn raw(&self) -> &RawAig {
        &self.raw
    }

    pub fn into_raw(self) -> RawAig {
        self.raw
    }

    pub fn definition(&self, var: Var) -> VarDef {
        self.defs
            .get(var.index())
            .copied()
            .unwrap_or(VarDef::Undefined)
    }

    /// Gate indices such that every gate comes after the gates it reads.
    pub fn gate_order(&self) -> &[usize] {
        &self.gate_order
    }

    /// Values of every variable for the given current state and inputs.
    pub fn eval_combinational(&self, latch_values: &[bool], input_values: &[bool]) -> Assignment {
        assert_eq!(latch_values.len(), self.latches.len(), "latch vector size");
        assert_eq!(input_values.len(), self.inputs.len(), "input vector size");
        let mut values = vec![false; self.defs.len()];
        for (lit, &v) in self.inputs.iter().zip(input_values) {
            values[lit.var().index()] = v;
        }
        for (latch, &v) in self.latches.iter().zip(latch_values) {
            values[latch.lit.var().index()] = v;
        }
        for &k in &self.gate_order {
            let gate = &self.gates[k];
            let lit = |l: Literal| values[l.var().index()] ^ l.is_negated();
            values[gate.lhs.var().index()] = lit(gate.rhs0) && lit(gate.rhs1);
        }
        Assignment { values }
    }

    pub fn step(&self, latch_values: &[bool], input_values: &[bool]) -> Step {
        let a = self.eval_combinational(latch_values, input_values);
        Step {
            next_latches: self.latches.iter().map(|l| a.lit(l.next)).collect(),
            outputs: self.outputs.iter().map(|&o| a.lit(o)).collect(),
        }
    }

    pub fn initial_states(&self) -> InitialStates {
        InitialStates(
            self.latches
                .iter()
                .map(|l| match l.reset {
                    Reset::Zero => Some(false),
                    Reset::One => Some(true),
                    Reset::Uninitialized => None,
                })
                .collect(),
        )
    }

    /// Rebuilds the circuit with a different symbol table.
    pub fn with_symbols(self, symbols: Vec<SymbolEntry>) -> Result<Aig, Vec<Defect>> {
        let mut raw = self.raw;
        raw.symbols = symbols;
        let defects = raw.local_defects();
        if defects.is_empty() {
            Ok(Aig {
                raw,
                defs: self.defs,
                gate_order: self.gate_order,
            })
        } else {
            Err(defects)
        }
    }
}

fn def_item(def: VarDef) -> Item {
    match def {
        VarDef::Input(k) => Item::Input(k),
        VarDef::Latch(k) => Item::Latch(k),
        VarDef::Gate(k) => Item::Gate(k),
        VarDef::Constant | VarDef::Undefined => Item::Header,
    }
}

/// Orders `gates` so that operands come first. `gate_of` resolves a variable
/// to the gate defining it. On a cycle, returns the index of a gate on it.
pub(crate) fn topological_order(
    gates: &[AndDef],
    gate_of: impl Fn(Var) -> Option<usize>,
) -> Result<Vec<usize>, usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; gates.len()];
    let mut order = Vec::with_capacity(gates.len());
    let mut stack: Vec<(usize, u8)> = Vec::new();
    for root in 0..gates.len() {
        if mark[root] != Mark::New {
            continue;
        }
        stack.push((root, 0));
        mark[root] = Mark::Open;
        while let Some(&mut (k, ref mut child)) = stack.last_mut() {
            if *child == 2 {
                mark[k] = Mark::Done;
                order.push(k);
                stack.pop();
                continue;
            }
            let operand = if *child == 0 {
                gates[k].rhs0
            } else {
                gates[k].rhs1
            };
            *child += 1;
            if let Some(dep) = gate_of(operand.var()) {
                match mark[dep] {
                    Mark::New => {
                        mark[dep] = Mark::Open;
                        stack.push((dep, 0));
                    }
                    Mark::Open => return Err(dep),
                    Mark::Done => {}
                }
            }
        }
    }
    Ok(order)
}

/// Value of every variable after combinational evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn var(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn lit(&self, lit: Literal) -> bool {
        self.values[lit.var().index()] ^ lit.is_negated()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub next_latches: Vec<bool>,
    pub outputs: Vec<bool>,
}

/// Set of initial latch vectors: each latch is fixed or free (`None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialStates(pub Vec<Option<bool>>);

impl InitialStates {
    pub fn is_deterministic(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn contains(&self, state: &[bool]) -> bool {
        state.len() == self.0.len()
            && self
                .0
                .iter()
                .zip(state)
                .all(|(fixed, &v)| fixed.is_none_or(|f| f == v))
    }

    /// All concrete initial vectors, free latches enumerated in increasing
    /// binary order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        let free: Vec<usize> = (0..self.0.len()).filter(|&k| self.0[k].is_none()).collect();
        (0u64..1 << free.len()).map(move |bits| {
            let mut state: Vec<bool> = self.0.iter().map(|v| v.unwrap_or(false)).collect();
            for (j, &k) in free.iter().enumerate() {
                state[k] = bits >> j & 1 == 1;
            }
            state
        })
    }
}
