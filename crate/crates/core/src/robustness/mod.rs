//! Cleartext robustness: a direct recursive evaluation of the robust
//! semantics, and the table-filling dynamic program that the circuit
//! implements in hardware. The two are independent routes to the same value
//! and serve as the reference for every other layer.

mod trace;

pub use trace::{Trace, TraceError};

use crate::stl::{Formula, FormulaEncoding, Interval, Opcode, Upper};
use crate::word::{Rob, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RobustnessError {
    #[error("sample index {index} out of range for trace of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("encoding width {enc} differs from trace width {trace}")]
    WidthMismatch { enc: u32, trace: u32 },
}

fn atom(width: Width, cmp: crate::stl::Cmp, x: i64, c: i64) -> Rob {
    match cmp {
        crate::stl::Cmp::Ge => width.saturate(x - c),
        crate::stl::Cmp::Le => width.saturate(c - x),
    }
}

/// Robustness of `formula` on `trace` at sample `index` (0-based), straight
/// from the definitions: min/max over explicit index windows, no table.
pub fn rob_recursive(
    trace: &Trace,
    formula: &Formula,
    index: usize,
) -> Result<Rob, RobustnessError> {
    if index >= trace.len() {
        return Err(RobustnessError::IndexOutOfRange {
            index,
            len: trace.len(),
        });
    }
    Ok(eval(trace, formula, index))
}

fn window<'a>(trace: &'a Trace, i: usize, interval: &Interval) -> impl Iterator<Item = usize> + 'a {
    let t0 = trace.times()[i];
    let interval = *interval;
    (i..trace.len()).filter(move |&j| interval.contains(trace.times()[j] - t0))
}

fn eval(trace: &Trace, f: &Formula, i: usize) -> Rob {
    let w = trace.width();
    match f {
        Formula::True => w.rob_pinf(),
        Formula::Atom { cmp, threshold } => atom(w, *cmp, trace.values()[i], *threshold),
        Formula::Not(a) => eval(trace, a, i).neg(),
        Formula::And(a, b) => eval(trace, a, i).min(eval(trace, b, i)),
        Formula::Or(a, b) => eval(trace, a, i).max(eval(trace, b, i)),
        Formula::Implies(a, b) => eval(trace, a, i).neg().max(eval(trace, b, i)),
        Formula::Iff(a, b) => {
            let (ra, rb) = (eval(trace, a, i), eval(trace, b, i));
            ra.neg().max(rb).min(ra.max(rb.neg()))
        }
        Formula::Until(a, interval, b) => window(trace, i, interval)
            .map(|j| {
                let prefix = (i..j)
                    .map(|k| eval(trace, a, k))
                    .min()
                    .unwrap_or(w.rob_pinf());
                eval(trace, b, j).min(prefix)
            })
            .max()
            .unwrap_or(w.rob_ninf()),
        Formula::Always(interval, a) => window(trace, i, interval)
            .map(|j| eval(trace, a, j))
            .min()
            .unwrap_or(w.rob_pinf()),
        Formula::Eventually(interval, a) => window(trace, i, interval)
            .map(|j| eval(trace, a, j))
            .max()
            .unwrap_or(w.rob_ninf()),
    }
}

/// Window cache for one formula column. `lower == None` stands for the
/// initial `+inf` and for "no sample late enough"; `upper == None` for the
/// initial `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WindowBounds {
    pub lower: Option<usize>,
    pub upper: Option<usize>,
}

impl WindowBounds {
    /// Inclusive index range, or `None` when no sample falls in the window.
    pub fn range(&self) -> Option<(usize, usize)> {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) if l <= u => Some((l, u)),
            _ => None,
        }
    }
}

/// Incremental window search: the first and last sample indices whose
/// timestamps fall in `times[i] + interval`. Scans downward from the bounds
/// found for row `i + 1`, so a whole column costs linear work.
pub fn bounds(interval: &Interval, i: usize, times: &[i64], prev: WindowBounds) -> WindowBounds {
    let n = times.len();
    let mut out = prev;
    match interval.upper {
        Upper::Infinite => out.upper = Some(n - 1),
        Upper::Finite(u) => {
            let start = prev.upper.unwrap_or(n - 1);
            for j in (i..=start).rev() {
                if times[j] < times[i] + u {
                    out.upper = Some(j);
                    break;
                }
            }
        }
    }
    let start = prev.lower.unwrap_or(n - 1);
    for j in (i..=start).rev() {
        if times[j] >= times[i] + interval.lower {
            out.lower = Some(j);
        } else {
            break;
        }
    }
    out
}

/// Filled robustness table: one row per sample, one column per encoding slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobTable {
    rows: usize,
    cols: usize,
    cells: Vec<Rob>,
    windows: Vec<WindowBounds>,
}

impl RobTable {
    pub fn get(&self, row: usize, col: usize) -> Rob {
        self.cells[row * self.cols + col]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, col: usize) -> Vec<Rob> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// Window caches left after row 0.
    pub fn windows(&self) -> &[WindowBounds] {
        &self.windows
    }

    pub fn result(&self) -> Rob {
        self.get(0, 0)
    }
}

/// Robustness at sample 0 by table filling.
pub fn dp_taliro(trace: &Trace, enc: &FormulaEncoding) -> Result<Rob, RobustnessError> {
    dp_taliro_table(trace, enc).map(|t| t.result())
}

/// Fill the full table bottom-right to top-left. Rows are samples, columns
/// are encoding slots; children always sit to the right of their parent so
/// every operand is ready when a cell is computed.
pub fn dp_taliro_table(trace: &Trace, enc: &FormulaEncoding) -> Result<RobTable, RobustnessError> {
    let w = trace.width();
    if enc.width() != w {
        return Err(RobustnessError::WidthMismatch {
            enc: enc.width().bits(),
            trace: w.bits(),
        });
    }
    let (n, m) = (trace.len(), enc.len());
    let (times, xs) = (trace.times(), trace.values());
    let (pinf, ninf) = (w.rob_pinf(), w.rob_ninf());
    let mut r = vec![ninf; n * m];
    let mut windows = vec![WindowBounds::default(); m];
    let at = |i: usize, j: usize| i * m + j;

    for i in (0..n).rev() {
        for j in (0..m).rev() {
            let node = enc.nodes()[j];
            let (k1, k2) = (node.k1, node.k2);
            let interval = || Interval {
                lower: node.lower,
                upper: if node.upper == w.pinf() {
                    Upper::Infinite
                } else {
                    Upper::Finite(node.upper)
                },
            };
            let value = match node.opcode {
                Opcode::True => pinf,
                Opcode::AtomGe => w.saturate(xs[i] - node.threshold),
                Opcode::AtomLe => w.saturate(node.threshold - xs[i]),
                Opcode::Not => r[at(i, k1)].neg(),
                Opcode::And => r[at(i, k1)].min(r[at(i, k2)]),
                Opcode::Or => r[at(i, k1)].max(r[at(i, k2)]),
                Opcode::Implies => r[at(i, k1)].neg().max(r[at(i, k2)]),
                Opcode::Iff => {
                    let (a, b) = (r[at(i, k1)], r[at(i, k2)]);
                    a.neg().max(b).min(a.max(b.neg()))
                }
                op @ (Opcode::Until | Opcode::Always | Opcode::Eventually) => {
                    // Eventually is `TRUE U`, Always its dual: the left operand
                    // is constant +inf and Always folds with min instead of max.
                    let until = op == Opcode::Until;
                    let is_min = op == Opcode::Always;
                    let psi_col = if until { k2 } else { k1 };
                    let phi = |row: usize| if until { r[at(row, k1)] } else { pinf };
                    let fold = |acc: Rob, v: Rob| if is_min { acc.min(v) } else { acc.max(v) };
                    let empty = if is_min { pinf } else { ninf };
                    let iv = interval();
                    if i == n - 1 {
                        if iv.contains_zero() {
                            r[at(i, psi_col)]
                        } else {
                            empty
                        }
                    } else if iv.is_full() {
                        fold(r[at(i, psi_col)], phi(i).min(r[at(i + 1, j)]))
                    } else {
                        windows[j] = bounds(&iv, i, times, windows[j]);
                        let first = windows[j].lower.unwrap_or(n);
                        // an empty prefix (first == i) leaves tmp at +inf
                        let mut tmp = (i..first).map(phi).min().unwrap_or(pinf);
                        let mut acc = empty;
                        if let Some((lo, hi)) = windows[j].range() {
                            for k in lo..=hi {
                                acc = fold(acc, r[at(k, psi_col)].min(tmp));
                                tmp = tmp.min(phi(k));
                            }
                        }
                        if iv.upper == Upper::Infinite {
                            acc = fold(acc, phi(i).min(r[at(i + 1, j)]));
                        }
                        acc
                    }
                }
            };
            r[at(i, j)] = value;
        }
    }
    Ok(RobTable {
        rows: n,
        cols: m,
        cells: r,
        windows,
    })
}
