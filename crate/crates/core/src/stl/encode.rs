//! Flat, fixed-capacity formula encoding.
//!
//! Nodes are laid out breadth-first from the root at index 0, left child
//! before right child, so every child index is strictly greater than its
//! parent's. A child index of 0 therefore unambiguously means "no child".
//! Unused slots hold inert `True` nodes that nothing references.

use std::collections::VecDeque;
use std::fmt::Write as _;

use super::{Cmp, Formula, Interval, Upper};
use crate::word::Width;

/// Node class as seen by the monitor's decode logic. Fits in 4 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    True = 0,
    AtomGe = 1,
    AtomLe = 2,
    Not = 3,
    And = 4,
    Or = 5,
    Implies = 6,
    Iff = 7,
    Until = 8,
    Always = 9,
    Eventually = 10,
}

impl Opcode {
    pub const BITS: usize = 4;

    pub const ALL: [Opcode; 11] = [
        Opcode::True,
        Opcode::AtomGe,
        Opcode::AtomLe,
        Opcode::Not,
        Opcode::And,
        Opcode::Or,
        Opcode::Implies,
        Opcode::Iff,
        Opcode::Until,
        Opcode::Always,
        Opcode::Eventually,
    ];

    pub fn from_code(code: u8) -> Option<Opcode> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn arity(self) -> usize {
        match self {
            Opcode::True | Opcode::AtomGe | Opcode::AtomLe => 0,
            Opcode::Not | Opcode::Always | Opcode::Eventually => 1,
            _ => 2,
        }
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, Opcode::Until | Opcode::Always | Opcode::Eventually)
    }
}

/// One slot of the encoding. Interval and threshold fields are zero when the
/// opcode does not use them; an infinite upper bound is stored as `PINF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodedNode {
    pub opcode: Opcode,
    pub k1: usize,
    pub k2: usize,
    pub lower: i64,
    pub upper: i64,
    pub threshold: i64,
}

impl EncodedNode {
    pub const PADDING: EncodedNode = EncodedNode {
        opcode: Opcode::True,
        k1: 0,
        k2: 0,
        lower: 0,
        upper: 0,
        threshold: 0,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("formula needs {needed} nodes but capacity is {capacity}")]
    Capacity { needed: usize, capacity: usize },
    #[error("value {value} of {what} does not fit a {width}-bit word")]
    Range {
        what: &'static str,
        value: i64,
        width: u32,
    },
    #[error("node {index}: {msg}")]
    Malformed { index: usize, msg: String },
    #[error("line {line}: {msg}")]
    Text { line: usize, msg: String },
}

/// The Verifier's formula as a fixed-length node array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormulaEncoding {
    nodes: Vec<EncodedNode>,
    width: Width,
}

impl FormulaEncoding {
    /// Validate raw nodes: opcode arity, forward-only child references and
    /// field ranges.
    pub fn from_nodes(nodes: Vec<EncodedNode>, width: Width) -> Result<Self, EncodeError> {
        if nodes.is_empty() {
            return Err(EncodeError::Malformed {
                index: 0,
                msg: "no root node".into(),
            });
        }
        let pinf = width.pinf();
        for (index, n) in nodes.iter().enumerate() {
            let bad = |msg: &str| {
                Err(EncodeError::Malformed {
                    index,
                    msg: msg.to_string(),
                })
            };
            let child_ok = |k: usize| k > index && k < nodes.len();
            match n.opcode.arity() {
                0 if n.k1 != 0 || n.k2 != 0 => return bad("leaf with children"),
                1 if !child_ok(n.k1) || n.k2 != 0 => return bad("bad unary child reference"),
                2 if !child_ok(n.k1) || !child_ok(n.k2) => {
                    return bad("bad binary child reference")
                }
                _ => {}
            }
            if n.opcode.is_temporal() {
                if n.lower < 0 || n.lower >= pinf {
                    return bad("interval lower bound out of range");
                }
                if n.upper <= n.lower || n.upper > pinf {
                    return bad("interval upper bound out of range");
                }
            } else if n.lower != 0 || n.upper != 0 {
                return bad("interval on non-temporal node");
            }
            if !width.contains(n.threshold) {
                return bad("threshold out of range");
            }
        }
        Ok(FormulaEncoding { nodes, width })
    }

    pub fn nodes(&self) -> &[EncodedNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// Indices reachable from the root.
    pub fn live(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            let n = &self.nodes[i];
            let arity = n.opcode.arity();
            if arity >= 1 {
                stack.push(n.k1);
            }
            if arity == 2 {
                stack.push(n.k2);
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    /// `idx opcode k1 k2 l u v` per line, decimal.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {}",
                i,
                n.opcode.code(),
                n.k1,
                n.k2,
                n.lower,
                n.upper,
                n.threshold
            );
        }
        s
    }

    pub fn from_text(text: &str, width: Width) -> Result<Self, EncodeError> {
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| EncodeError::Text {
                line: lineno + 1,
                msg,
            };
            let fields: Vec<i64> = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<i64>()
                        .map_err(|_| err(format!("not an integer: `{f}`")))
                })
                .collect::<Result<_, _>>()?;
            if fields.len() != 7 {
                return Err(err(format!("expected 7 fields, got {}", fields.len())));
            }
            if fields[0] != nodes.len() as i64 {
                return Err(err(format!("expected index {}", nodes.len())));
            }
            let opcode = u8::try_from(fields[1])
                .ok()
                .and_then(Opcode::from_code)
                .ok_or_else(|| err(format!("unknown opcode {}", fields[1])))?;
            let index =
                |v: i64| usize::try_from(v).map_err(|_| err(format!("bad child index {v}")));
            nodes.push(EncodedNode {
                opcode,
                k1: index(fields[2])?,
                k2: index(fields[3])?,
                lower: fields[4],
                upper: fields[5],
                threshold: fields[6],
            });
        }
        Self::from_nodes(nodes, width)
    }
}

fn check_range(
    what: &'static str,
    value: i64,
    lo: i64,
    hi: i64,
    width: Width,
) -> Result<(), EncodeError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(EncodeError::Range {
            what,
            value,
            width: width.bits(),
        })
    }
}

fn node_for(f: &Formula, width: Width) -> Result<EncodedNode, EncodeError> {
    let mut node = EncodedNode::PADDING;
    node.opcode = match f {
        Formula::True => Opcode::True,
        Formula::Atom { cmp: Cmp::Ge, .. } => Opcode::AtomGe,
        Formula::Atom { cmp: Cmp::Le, .. } => Opcode::AtomLe,
        Formula::Not(_) => Opcode::Not,
        Formula::And(..) => Opcode::And,
        Formula::Or(..) => Opcode::Or,
        Formula::Implies(..) => Opcode::Implies,
        Formula::Iff(..) => Opcode::Iff,
        Formula::Until(..) => Opcode::Until,
        Formula::Always(..) => Opcode::Always,
        Formula::Eventually(..) => Opcode::Eventually,
    };
    if let Formula::Atom { threshold, .. } = f {
        check_range("threshold", *threshold, width.ninf(), width.pinf(), width)?;
        node.threshold = *threshold;
    }
    if let Some(Interval { lower, upper }) = f.interval() {
        // PINF is reserved for the infinite upper endpoint.
        check_range("interval lower bound", lower, 0, width.pinf() - 1, width)?;
        node.lower = lower;
        node.upper = match upper {
            Upper::Finite(u) => {
                check_range("interval upper bound", u, 1, width.pinf() - 1, width)?;
                u
            }
            Upper::Infinite => width.pinf(),
        };
    }
    Ok(node)
}

/// Breadth-first layout of `formula` into exactly `m_max` slots.
pub fn encode(
    formula: &Formula,
    m_max: usize,
    width: Width,
) -> Result<FormulaEncoding, EncodeError> {
    let needed = formula.node_count();
    if needed > m_max {
        return Err(EncodeError::Capacity {
            needed,
            capacity: m_max,
        });
    }
    let mut nodes = Vec::with_capacity(m_max);
    let mut queue = VecDeque::from([formula]);
    // children of node i are assigned the next free indices in BFS order
    let mut next = 1;
    while let Some(f) = queue.pop_front() {
        let mut node = node_for(f, width)?;
        let children = f.children();
        if let Some(c) = children.first() {
            node.k1 = next;
            next += 1;
            queue.push_back(c);
        }
        if let Some(c) = children.get(1) {
            node.k2 = next;
            next += 1;
            queue.push_back(c);
        }
        nodes.push(node);
    }
    nodes.resize(m_max, EncodedNode::PADDING);
    FormulaEncoding::from_nodes(nodes, width)
}

/// Re-layout to exactly `m_max` slots by trimming or appending inert
/// padding. Fails if a live node sits at or beyond `m_max`.
pub fn pad_encoding(enc: &FormulaEncoding, m_max: usize) -> Result<FormulaEncoding, EncodeError> {
    let used = enc.live().last().map_or(1, |&i| i + 1);
    if used > m_max {
        return Err(EncodeError::Capacity {
            needed: used,
            capacity: m_max,
        });
    }
    let mut nodes: Vec<EncodedNode> = enc.nodes()[..used].to_vec();
    nodes.resize(m_max, EncodedNode::PADDING);
    FormulaEncoding::from_nodes(nodes, enc.width())
}

/// Rebuild the syntax tree rooted at slot 0.
pub fn decode(enc: &FormulaEncoding) -> Formula {
    fn go(enc: &FormulaEncoding, i: usize) -> Formula {
        let n = enc.nodes()[i];
        let interval = || Interval {
            lower: n.lower,
            upper: if n.upper == enc.width().pinf() {
                Upper::Infinite
            } else {
                Upper::Finite(n.upper)
            },
        };
        match n.opcode {
            Opcode::True => Formula::True,
            Opcode::AtomGe => Formula::ge(n.threshold),
            Opcode::AtomLe => Formula::le(n.threshold),
            Opcode::Not => go(enc, n.k1).not(),
            Opcode::And => go(enc, n.k1).and(go(enc, n.k2)),
            Opcode::Or => go(enc, n.k1).or(go(enc, n.k2)),
            Opcode::Implies => go(enc, n.k1).implies(go(enc, n.k2)),
            Opcode::Iff => go(enc, n.k1).iff(go(enc, n.k2)),
            Opcode::Until => go(enc, n.k1).until(interval(), go(enc, n.k2)),
            Opcode::Always => Formula::always(interval(), go(enc, n.k1)),
            Opcode::Eventually => Formula::eventually(interval(), go(enc, n.k1)),
        }
    }
    go(enc, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::parse_formula;

    fn w32() -> Width {
        Width::new(32).unwrap()
    }

    #[test]
    fn worked_example_layout() {
        let f = parse_formula("(x >= 0) U[4,9) !(x >= 10)").unwrap();
        let enc = encode(&f, 4, w32()).unwrap();
        let ops: Vec<Opcode> = enc.nodes().iter().map(|n| n.opcode).collect();
        assert_eq!(
            ops,
            [Opcode::Until, Opcode::AtomGe, Opcode::Not, Opcode::AtomGe]
        );
        let root = enc.nodes()[0];
        assert_eq!((root.k1, root.k2, root.lower, root.upper), (1, 2, 4, 9));
        assert_eq!(enc.nodes()[2].k1, 3);
        assert_eq!(enc.nodes()[3].threshold, 10);
        for (i, n) in enc.nodes().iter().enumerate() {
            if n.opcode.arity() > 0 {
                assert!(n.k1 > i);
            }
        }
    }

    #[test]
    fn true_formula_pads() {
        let enc = encode(&Formula::True, 8, w32()).unwrap();
        assert_eq!(enc.len(), 8);
        assert!(enc.nodes().iter().all(|n| *n == EncodedNode::PADDING));
        assert_eq!(enc.live(), vec![0]);
    }

    #[test]
    fn capacity_error() {
        let f = parse_formula("(x >= 0) U[4,9) !(x >= 10)").unwrap();
        assert_eq!(
            encode(&f, 3, w32()),
            Err(EncodeError::Capacity {
                needed: 4,
                capacity: 3
            })
        );
    }

    #[test]
    fn infinity_uses_pinf() {
        let f = parse_formula("G[0,inf) (x >= 5)").unwrap();
        let w = Width::new(16).unwrap();
        let enc = encode(&f, 2, w).unwrap();
        assert_eq!(enc.nodes()[0].upper, w.pinf());
        assert_eq!(decode(&enc), f);
    }

    #[test]
    fn out_of_range_values() {
        let w = Width::new(8).unwrap();
        assert!(matches!(
            encode(&Formula::ge(128), 1, w),
            Err(EncodeError::Range { .. })
        ));
        assert!(matches!(
            encode(&Formula::ge(-128), 1, w),
            Err(EncodeError::Range { .. })
        ));
        let f = parse_formula("F[0,127) x > 0").unwrap();
        assert!(matches!(encode(&f, 2, w), Err(EncodeError::Range { .. })));
    }

    #[test]
    fn padding_is_idempotent_and_trims() {
        let f = parse_formula("G[1,3) (x > 0 && x < 4)").unwrap();
        let enc = encode(&f, 4, w32()).unwrap();
        assert_eq!(pad_encoding(&enc, 4).unwrap(), enc);
        let wide = pad_encoding(&enc, 9).unwrap();
        assert_eq!(wide.len(), 9);
        assert_eq!(pad_encoding(&wide, 4).unwrap(), enc);
        assert!(pad_encoding(&wide, 3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = parse_formula("F[0,10) (x > 1 U[0,inf) (x < 2 -> x > 3))").unwrap();
        let enc = encode(&f, 8, w32()).unwrap();
        let back = FormulaEncoding::from_text(&enc.to_text(), w32()).unwrap();
        assert_eq!(back, enc);
    }

    #[test]
    fn rejects_backward_references() {
        let mut nodes = vec![EncodedNode::PADDING; 3];
        nodes[1] = EncodedNode {
            opcode: Opcode::Not,
            k1: 1,
            ..EncodedNode::PADDING
        };
        assert!(FormulaEncoding::from_nodes(nodes.clone(), w32()).is_err());
        nodes[1].k1 = 2;
        assert!(FormulaEncoding::from_nodes(nodes, w32()).is_ok());
        assert!(FormulaEncoding::from_text("0 12 0 0 0 0 0\n", w32()).is_err());
    }
}
