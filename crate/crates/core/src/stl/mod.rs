//! STL formulas: syntax tree, text grammar and the fixed-size encoding that
//! the monitor circuit consumes as the Verifier's secret input.

mod encode;
mod parse;

use std::fmt;

pub use encode::{decode, encode, pad_encoding, EncodeError, EncodedNode, FormulaEncoding, Opcode};
pub use parse::{parse_formula, ParseError};

/// Upper endpoint of a half-open interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Upper {
    Finite(i64),
    Infinite,
}

/// Half-open time interval `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: i64,
    pub upper: Upper,
}

impl Interval {
    pub fn new(lower: i64, upper: Upper) -> Result<Self, IntervalError> {
        if lower < 0 {
            return Err(IntervalError::NegativeLower(lower));
        }
        if let Upper::Finite(u) = upper {
            if u <= lower {
                return Err(IntervalError::Empty { lower, upper: u });
            }
        }
        Ok(Interval { lower, upper })
    }

    pub fn bounded(lower: i64, upper: i64) -> Result<Self, IntervalError> {
        Self::new(lower, Upper::Finite(upper))
    }

    pub fn unbounded(lower: i64) -> Result<Self, IntervalError> {
        Self::new(lower, Upper::Infinite)
    }

    pub fn contains_zero(&self) -> bool {
        self.lower == 0
    }

    /// `[0, inf)`
    pub fn is_full(&self) -> bool {
        self.lower == 0 && self.upper == Upper::Infinite
    }

    /// Whether a time offset `d >= 0` falls inside.
    pub fn contains(&self, d: i64) -> bool {
        d >= self.lower
            && match self.upper {
                Upper::Finite(u) => d < u,
                Upper::Infinite => true,
            }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Upper::Finite(u) => write!(f, "[{},{})", self.lower, u),
            Upper::Infinite => write!(f, "[{},inf)", self.lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("negative interval bound {0}")]
    NegativeLower(i64),
    #[error("empty interval: lower {lower} >= upper {upper}")]
    Empty { lower: i64, upper: i64 },
}

/// Direction of an atomic comparison against the signal `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    /// `x >= c` (also written `x > c`); robustness `x - c`.
    Ge,
    /// `x <= c` (also written `x < c`); robustness `c - x`.
    Le,
}

/// STL syntax tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom { cmp: Cmp, threshold: i64 },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
    Eventually(Interval, Box<Formula>),
}

impl Formula {
    pub fn ge(threshold: i64) -> Formula {
        Formula::Atom {
            cmp: Cmp::Ge,
            threshold,
        }
    }

    pub fn le(threshold: i64) -> Formula {
        Formula::Atom {
            cmp: Cmp::Le,
            threshold,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn until(self, interval: Interval, rhs: Formula) -> Formula {
        Formula::Until(Box::new(self), interval, Box::new(rhs))
    }

    pub fn always(interval: Interval, body: Formula) -> Formula {
        Formula::Always(interval, Box::new(body))
    }

    pub fn eventually(interval: Interval, body: Formula) -> Formula {
        Formula::Eventually(interval, Box::new(body))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Atom { .. } => vec![],
            Formula::Not(a) | Formula::Always(_, a) | Formula::Eventually(_, a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, _, b) => vec![a, b],
        }
    }

    pub fn interval(&self) -> Option<Interval> {
        match self {
            Formula::Until(_, i, _) | Formula::Always(i, _) | Formula::Eventually(i, _) => Some(*i),
            _ => None,
        }
    }

    /// Number of syntax-tree nodes.
    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }

    /// Nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Until(..) => 5,
            Formula::Not(_) | Formula::Always(..) | Formula::Eventually(..) => 6,
            Formula::True | Formula::Atom { .. } => 7,
        }
    }

    // Atoms under a unary operator are parenthesized for readability.
    fn fmt_unary_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if matches!(self, Formula::Atom { .. }) {
            write!(f, "({self})")
        } else {
            self.fmt_operand(f, 6)
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints in the accepted grammar with just enough parentheses to parse back
/// to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("TRUE"),
            Formula::Atom {
                cmp: Cmp::Ge,
                threshold,
            } => write!(f, "x >= {threshold}"),
            Formula::Atom {
                cmp: Cmp::Le,
                threshold,
            } => write!(f, "x <= {threshold}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                a.fmt_unary_operand(f)
            }
            Formula::Always(i, a) => {
                write!(f, "G{i} ")?;
                a.fmt_unary_operand(f)
            }
            Formula::Eventually(i, a) => {
                write!(f, "F{i} ")?;
                a.fmt_unary_operand(f)
            }
            Formula::Until(a, i, b) => {
                a.fmt_operand(f, 5)?;
                write!(f, " U{i} ")?;
                b.fmt_unary_operand(f)
            }
            Formula::And(a, b) => {
                a.fmt_operand(f, 4)?;
                f.write_str(" && ")?;
                b.fmt_operand(f, 5)
            }
            Formula::Or(a, b) => {
                a.fmt_operand(f, 3)?;
                f.write_str(" || ")?;
                b.fmt_operand(f, 4)
            }
            // right associative
            Formula::Implies(a, b) => {
                a.fmt_operand(f, 3)?;
                f.write_str(" -> ")?;
                b.fmt_operand(f, 2)
            }
            Formula::Iff(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" <-> ")?;
                b.fmt_operand(f, 2)
            }
        }
    }
}
