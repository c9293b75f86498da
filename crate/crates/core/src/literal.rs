//! AIGER literals and variable indices.

use std::fmt;
use std::ops::Not;

/// Variable index. Variable 0 is the constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub const CONST: Var = Var(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Positive literal of this variable.
    pub fn lit(self) -> Literal {
        Literal(self.0 << 1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A possibly negated variable: `2 * var` is the variable itself,
/// `2 * var + 1` its negation. `0` and `1` are the constants false and true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(pub u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn new(var: Var, negated: bool) -> Literal {
        Literal((var.0 << 1) | negated as u32)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_constant(self) -> bool {
        self.0 < 2
    }

    /// The literal with the negation flag cleared.
    pub fn positive(self) -> Literal {
        Literal(self.0 & !1)
    }

    pub fn negate_if(self, negate: bool) -> Literal {
        Literal(self.0 ^ negate as u32)
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl From<bool> for Literal {
    fn from(value: bool) -> Self {
        if value {
            Literal::TRUE
        } else {
            Literal::FALSE
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
