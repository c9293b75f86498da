//! Reading and writing the ASCII AIGER format (`aag`), version 20071012,
//! with reset literals on latch lines and the `B C J F` header extension.
//!
//! The writer emits a canonical form: single spaces, `\n` line ends, no
//! reset field for zero-initialized latches and no trailing zero extension
//! counts. Parsing that form and writing it again is byte-identical.

use std::fmt;
use std::io;

use crate::aig::AndDef;
use crate::aig::{
    Aig, Defect, Item, LatchDef, RawAig, Reset, Rule, SymbolEntry, SymbolKind, MAX_VAR_INDEX,
};
use crate::literal::Literal;

/// A rejected line of an AIGER file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    /// 1-based line number.
    pub line: usize,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: [{}] {}", self.line, self.rule, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject symbol entries whose ordinal is past the number of items of
    /// their kind. Synthesized solutions keep the specification's symbol
    /// table verbatim, so their removed controllable inputs leave such
    /// entries behind.
    pub check_symbol_range: bool,
}

impl ParseOptions {
    pub const STRICT: ParseOptions = ParseOptions {
        check_symbol_range: true,
    };
    pub const SOLUTION: ParseOptions = ParseOptions {
        check_symbol_range: false,
    };
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions::STRICT
    }
}

/// Parses and validates a complete circuit.
pub fn parse_ascii(text: impl AsRef<[u8]>) -> Result<Aig, Vec<ParseDiagnostic>> {
    parse_ascii_with(text, ParseOptions::STRICT)
}

pub fn parse_ascii_with(
    text: impl AsRef<[u8]>,
    options: ParseOptions,
) -> Result<Aig, Vec<ParseDiagnostic>> {
    let parsed = Parser::new(text.as_ref()).run()?;
    let mut diagnostics = Vec::new();
    if options.check_symbol_range {
        diagnostics.extend(
            parsed
                .raw
                .symbol_range_defects()
                .into_iter()
                .map(|d| parsed.locate(d)),
        );
    }
    match Aig::new(parsed.raw.clone()) {
        Ok(aig) if diagnostics.is_empty() => Ok(aig),
        Ok(_) => Err(diagnostics),
        Err(defects) => {
            diagnostics.extend(defects.into_iter().map(|d| parsed.locate(d)));
            diagnostics.sort_by_key(|d| d.line);
            Err(diagnostics)
        }
    }
}

/// Parses a file without the graph checks (literal bounds, single
/// definitions, undefined variables, combinational loops). Used for
/// candidate solutions, whose graph-level defects are reported by the
/// solution checker instead.
pub fn parse_raw(text: impl AsRef<[u8]>) -> Result<RawAig, Vec<ParseDiagnostic>> {
    Parser::new(text.as_ref()).run().map(|p| p.raw)
}

pub fn write_ascii(aig: &RawAig) -> String {
    let mut out = String::new();
    write_into(aig, &mut out).expect("writing to a String cannot fail");
    out
}

pub fn write_to<W: io::Write>(aig: &RawAig, mut w: W) -> io::Result<()> {
    w.write_all(write_ascii(aig).as_bytes())
}

fn write_into(aig: &RawAig, out: &mut impl fmt::Write) -> fmt::Result {
    writeln!(out, "{}", aig.header())?;
    for lit in &aig.inputs {
        writeln!(out, "{lit}")?;
    }
    for latch in &aig.latches {
        match latch.reset {
            Reset::Zero => writeln!(out, "{} {}", latch.lit, latch.next)?,
            Reset::One => writeln!(out, "{} {} 1", latch.lit, latch.next)?,
            Reset::Uninitialized => writeln!(out, "{} {} {}", latch.lit, latch.next, latch.lit)?,
        }
    }
    for lit in aig.outputs.iter().chain(&aig.bad).chain(&aig.constraints) {
        writeln!(out, "{lit}")?;
    }
    for gate in &aig.gates {
        writeln!(out, "{} {} {}", gate.lhs, gate.rhs0, gate.rhs1)?;
    }
    for sym in &aig.symbols {
        writeln!(out, "{}{} {}", sym.kind.prefix(), sym.position, sym.name)?;
    }
    if !aig.comments.is_empty() {
        writeln!(out, "c")?;
        for comment in &aig.comments {
            writeln!(out, "{comment}")?;
        }
    }
    Ok(())
}

struct Parsed {
    raw: RawAig,
    symbol_lines: Vec<usize>,
}

impl Parsed {
    fn locate(&self, defect: Defect) -> ParseDiagnostic {
        let raw = &self.raw;
        let inputs = 2;
        let latches = inputs + raw.inputs.len();
        let outputs = latches + raw.latches.len();
        let bad = outputs + raw.outputs.len();
        let constraints = bad + raw.bad.len();
        let gates = constraints + raw.constraints.len();
        let line = match defect.item {
            Item::Header => 1,
            Item::Input(k) => inputs + k,
            Item::Latch(k) => latches + k,
            Item::Output(k) => outputs + k,
            Item::Bad(k) => bad + k,
            Item::Constraint(k) => constraints + k,
            Item::Gate(k) => gates + k,
            Item::Symbol(k) => self.symbol_lines[k],
        };
        ParseDiagnostic {
            line,
            rule: defect.rule,
            message: defect.message,
        }
    }
}

struct Parser<'a> {
    lines: Vec<&'a [u8]>,
    next: usize,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a [u8]) -> Self {
        let mut lines: Vec<&[u8]> = text.split(|&b| b == b'\n').collect();
        if text.ends_with(b"\n") || text.is_empty() {
            lines.pop();
        }
        Parser {
            lines,
            next: 0,
            diagnostics: Vec::new(),
        }
    }

    fn error(&mut self, line: usize, rule: Rule, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            line,
            rule,
            message: message.into(),
        });
    }

    /// Next line as text together with its 1-based number.
    fn line(&mut self) -> Option<(usize, Option<&'a str>)> {
        let bytes = *self.lines.get(self.next)?;
        self.next += 1;
        let number = self.next;
        match std::str::from_utf8(bytes) {
            Ok(s) => Some((number, Some(s))),
            Err(_) => {
                self.error(number, Rule::InvalidUtf8, "line is not valid UTF-8");
                Some((number, None))
            }
        }
    }

    fn run(mut self) -> Result<Parsed, Vec<ParseDiagnostic>> {
        let Some(header) = self.header() else {
            return Err(self.diagnostics);
        };
        let [m, i, l, o, a, b, c] = header;

        let mut raw = RawAig {
            max_var: m as u32,
            ..RawAig::default()
        };
        let sections: [(&str, usize, usize); 6] = [
            ("input", i, 1),
            ("latch", l, 2),
            ("output", o, 1),
            ("bad-state", b, 1),
            ("constraint", c, 1),
            ("and-gate", a, 3),
        ];
        for (what, count, width) in sections {
            for k in 0..count {
                let Some((number, text)) = self.line() else {
                    self.error(
                        self.lines.len() + 1,
                        Rule::CountMismatch,
                        format!("file ends after {k} of {count} {what} definitions"),
                    );
                    return Err(self.diagnostics);
                };
                let Some(text) = text else { continue };
                let Some(lits) = self.literals(number, text, what, width) else {
                    continue;
                };
                match what {
                    "input" => raw.inputs.push(lits[0]),
                    "latch" => {
                        let reset = match lits.get(2) {
                            None => Reset::Zero,
                            Some(&Literal::FALSE) => Reset::Zero,
                            Some(&Literal::TRUE) => Reset::One,
                            Some(&r) if r == lits[0] => Reset::Uninitialized,
                            Some(&r) => {
                                self.error(
                                    number,
                                    Rule::MalformedReset,
                                    format!(
                                        "reset literal {r} must be 0, 1 or the latch literal {}",
                                        lits[0]
                                    ),
                                );
                                continue;
                            }
                        };
                        raw.latches.push(LatchDef {
                            lit: lits[0],
                            next: lits[1],
                            reset,
                        });
                    }
                    "output" => raw.outputs.push(lits[0]),
                    "bad-state" => raw.bad.push(lits[0]),
                    "constraint" => raw.constraints.push(lits[0]),
                    _ => raw.gates.push(AndDef::new(lits[0], lits[1], lits[2])),
                }
            }
        }

        let mut symbol_lines = Vec::new();
        while let Some((number, text)) = self.line() {
            let Some(text) = text else { continue };
            if text.trim_end() == "c" {
                while let Some((_, comment)) = self.line() {
                    if let Some(comment) = comment {
                        raw.comments.push(comment.to_string());
                    }
                }
                break;
            }
            match symbol(text) {
                Some(sym) => {
                    raw.symbols.push(sym);
                    symbol_lines.push(number);
                }
                None => self.error(
                    number,
                    Rule::MalformedSymbol,
                    format!("expected `i<n> <name>`, `l<n> <name>`, `o<n> <name>` or `c`, found {text:?}"),
                ),
            }
        }

        let parsed = Parsed { raw, symbol_lines };
        if self.diagnostics.is_empty() {
            let local: Vec<_> = parsed
                .raw
                .local_defects()
                .into_iter()
                .map(|d| parsed.locate(d))
                .collect();
            self.diagnostics = local;
        }
        if self.diagnostics.is_empty() {
            Ok(parsed)
        } else {
            Err(self.diagnostics)
        }
    }

    /// `[M, I, L, O, A, B, C]`; `J` and `F` must be zero.
    fn header(&mut self) -> Option<[usize; 7]> {
        let Some((_, text)) = self.line() else {
            self.error(1, Rule::BadMagic, "empty file, expected `aag` header");
            return None;
        };
        let text = text?;
        let mut tokens = text.split_ascii_whitespace();
        match tokens.next() {
            Some("aag") => {}
            Some("aig") => {
                self.error(1, Rule::BadMagic, "binary AIGER (`aig`) is not supported");
                return None;
            }
            other => {
                self.error(
                    1,
                    Rule::BadMagic,
                    format!("expected `aag`, found {:?}", other.unwrap_or("")),
                );
                return None;
            }
        }
        let fields: Vec<&str> = tokens.collect();
        if !(5..=9).contains(&fields.len()) {
            self.error(
                1,
                Rule::MalformedHeader,
                format!(
                    "expected 5 to 9 numbers after `aag`, found {}",
                    fields.len()
                ),
            );
            return None;
        }
        let mut values = [0usize; 9];
        for (slot, field) in values.iter_mut().zip(&fields) {
            match field.parse::<usize>() {
                Ok(v) => *slot = v,
                Err(_) => {
                    self.error(
                        1,
                        Rule::MalformedHeader,
                        format!("header field {field:?} is not a decimal number"),
                    );
                    return None;
                }
            }
        }
        if values[0] > MAX_VAR_INDEX as usize {
            self.error(
                1,
                Rule::MalformedHeader,
                format!(
                    "maximum variable index {} exceeds {MAX_VAR_INDEX}",
                    values[0]
                ),
            );
            return None;
        }
        if values[7] != 0 || values[8] != 0 {
            self.error(
                1,
                Rule::UnsupportedProperty,
                "justice and fairness properties are not supported",
            );
            return None;
        }
        let [m, i, l, o, a, b, c, _, _] = values;
        Some([m, i, l, o, a, b, c])
    }

    fn literals(
        &mut self,
        number: usize,
        text: &str,
        what: &str,
        width: usize,
    ) -> Option<Vec<Literal>> {
        let tokens: Vec<&str> = text.split_ascii_whitespace().collect();
        let accepted = if what == "latch" {
            tokens.len() == 2 || tokens.len() == 3
        } else {
            tokens.len() == width
        };
        if !accepted {
            self.error(
                number,
                Rule::MalformedLine,
                format!("{what} definition needs {width} numbers, found {text:?}"),
            );
            return None;
        }
        let mut lits = Vec::with_capacity(tokens.len());
        for token in tokens {
            match token.parse::<u32>() {
                Ok(code) if token.bytes().all(|b| b.is_ascii_digit()) => lits.push(Literal(code)),
                _ => {
                    self.error(
                        number,
                        Rule::MalformedLine,
                        format!("{token:?} is not a literal"),
                    );
                    return None;
                }
            }
        }
        Some(lits)
    }
}

fn symbol(text: &str) -> Option<SymbolEntry> {
    let kind = match text.as_bytes().first()? {
        b'i' => SymbolKind::Input,
        b'l' => SymbolKind::Latch,
        b'o' => SymbolKind::Output,
        _ => return None,
    };
    let (ordinal, name) = text[1..].split_once(' ')?;
    if ordinal.is_empty() || !ordinal.bytes().all(|b| b.is_ascii_digit()) || name.is_empty() {
        return None;
    }
    Some(SymbolEntry::new(kind, ordinal.parse().ok()?, name))
}
