//! The table-filling monitor as a sequential circuit.
//!
//! Datapath: a register file `R` of `N x M` words, a row read port shared by
//! two column ports, an ALU for the one-cycle operators, a bounds unit that
//! derives a temporal window in the same cycle the cell is fetched, and two
//! accumulators for the temporal loops.
//!
//! Controller (one-hot): FETCH decodes the node in column `cj` at row `ri`
//! and either writes the cell or enters UNB (two-cycle `[0,inf)` case) or
//! LOOP (one cycle per row of the window). Cells are visited row `N-1` down
//! to `0`, and within a row column `M-1` down to `0`, so operands are always
//! final before they are read. DONE is absorbing.
//!
//! Rows past the end of a shorter trace carry timestamp `-1`; the sign bit
//! marks them invalid, FETCH skips such a row in one cycle and the bounds
//! unit never counts them.

use super::builder::{Bit, Builder, DffRef, Word, ONE, ZERO};
use super::netlist::{Netlist, Params};
use crate::robustness::Trace;
use crate::stl::{pad_encoding, EncodeError, FormulaEncoding, Opcode};
use crate::word::{bits_for, Rob, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("trace capacity N must be at least 1")]
    ZeroSamples,
    #[error("formula capacity M must be at least 1")]
    ZeroNodes,
    #[error("N*M = {cells} cells cannot be addressed with {width}-bit words")]
    Overflow { cells: u128, width: u32 },
    #[error("trace has {len} samples but the circuit holds {cap}")]
    TraceTooLong { len: usize, cap: usize },
    #[error("trace width {got} differs from circuit width {expected}")]
    WidthMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    Encoding(#[from] EncodeError),
}

/// Fields of one encoded node, in input order.
struct NodeIn {
    op: Word,
    k1: Word,
    k2: Word,
    l: Word,
    u: Word,
    v: Word,
}

/// Bit layout of the two input groups for given public bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub m: usize,
    pub width: Width,
}

impl Layout {
    pub fn new(n: usize, m: usize, width: Width) -> Result<Self, CircuitError> {
        if n == 0 {
            return Err(CircuitError::ZeroSamples);
        }
        if m == 0 {
            return Err(CircuitError::ZeroNodes);
        }
        let cells = n as u128 * m as u128;
        if cells > 1u128 << width.bits() {
            return Err(CircuitError::Overflow {
                cells,
                width: width.bits(),
            });
        }
        Ok(Layout { n, m, width })
    }

    fn w(&self) -> usize {
        self.width.bits() as usize
    }

    /// Bits of a child index.
    pub fn child_bits(&self) -> usize {
        bits_for(self.m - 1)
    }

    /// Bits of a row index or row count.
    pub fn row_bits(&self) -> usize {
        bits_for(self.n)
    }

    pub fn node_bits(&self) -> usize {
        Opcode::BITS + 2 * self.child_bits() + 3 * self.w()
    }

    pub fn garbler_bits(&self) -> usize {
        self.m * self.node_bits()
    }

    pub fn evaluator_bits(&self) -> usize {
        self.n * 2 * self.w()
    }

    /// Verifier input: the encoding padded (or trimmed) to exactly `M` nodes.
    pub fn formula_bits(&self, enc: &FormulaEncoding) -> Result<Vec<bool>, CircuitError> {
        let enc = pad_encoding(enc, self.m)?;
        let (w, cb) = (self.width, self.child_bits());
        let uint = |v: usize, bits: usize| (0..bits).map(move |k| (v >> k) & 1 == 1);
        let mut out = Vec::with_capacity(self.garbler_bits());
        for node in enc.nodes() {
            out.extend(uint(node.opcode.code() as usize, Opcode::BITS));
            out.extend(uint(node.k1, cb));
            out.extend(uint(node.k2, cb));
            out.extend(w.to_bits(node.lower));
            out.extend(w.to_bits(node.upper));
            out.extend(w.to_bits(node.threshold));
        }
        Ok(out)
    }

    /// Designer input: one `(t, x)` pair per row, rows past the trace padded
    /// with `(-1, 0)`.
    pub fn trace_bits(&self, trace: &Trace) -> Result<Vec<bool>, CircuitError> {
        if trace.width() != self.width {
            return Err(CircuitError::WidthMismatch {
                expected: self.width.bits(),
                got: trace.width().bits(),
            });
        }
        if trace.len() > self.n {
            return Err(CircuitError::TraceTooLong {
                len: trace.len(),
                cap: self.n,
            });
        }
        let mut out = Vec::with_capacity(self.evaluator_bits());
        for r in 0..self.n {
            let (t, x) = if r < trace.len() {
                (trace.times()[r], trace.values()[r])
            } else {
                (-1, 0)
            };
            out.extend(self.width.to_bits(t));
            out.extend(self.width.to_bits(x));
        }
        Ok(out)
    }

    /// Robustness from the value outputs (done flag excluded).
    pub fn decode_output(&self, bits: &[bool]) -> Rob {
        Rob(self.width.from_bits(bits))
    }
}

/// Cycles after which the done flag is guaranteed high, for any inputs.
/// Per column: one cycle on the last row and at most `N - i + 1` on row `i`;
/// one more cycle lets the final write reach the outputs.
pub fn worst_case_cycles(n: usize, m: usize) -> usize {
    m * (n * (n - 1) / 2 + 2 * n - 1) + 1
}

fn q(regs: &[DffRef]) -> Word {
    regs.iter().map(|r| r.q).collect()
}

/// Build the monitor for public bounds `(n, m, width)`.
pub fn build_monitor(n: usize, m: usize, width: Width) -> Result<Netlist, CircuitError> {
    let layout = Layout::new(n, m, width)?;
    let w = layout.w();
    let (cb, rb) = (layout.child_bits(), layout.row_bits());
    let mut b = Builder::new();
    let pinf = Builder::constant(width.pinf(), w);
    let ninf = Builder::constant(width.ninf(), w);

    let nodes: Vec<NodeIn> = (0..m)
        .map(|_| NodeIn {
            op: b.garbler_word(Opcode::BITS),
            k1: b.garbler_word(cb),
            k2: b.garbler_word(cb),
            l: b.garbler_word(w),
            u: b.garbler_word(w),
            v: b.garbler_word(w),
        })
        .collect();
    let mut tau = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        tau.push(b.evaluator_word(w));
        xs.push(b.evaluator_word(w));
    }
    let valid: Vec<Bit> = tau.iter().map(|t| b.not(t[w - 1])).collect();

    let cells: Vec<Vec<Vec<DffRef>>> = (0..n)
        .map(|_| (0..m).map(|_| b.dff_word(0, w)).collect())
        .collect();
    let fetch = b.dff(true);
    let unb = b.dff(false);
    let lp = b.dff(false);
    let done = b.dff(false);
    let ri_r = b.dff_word((n - 1) as u64, rb);
    let cj_r = b.dff_word((m - 1) as u64, cb);
    let li_r = b.dff_word(0, rb);
    let bl_r = b.dff_word(0, rb);
    let bu_r = b.dff_word(0, rb);
    let acc_r = b.dff_word(0, w);
    let tmp_r = b.dff_word(0, w);
    let (ri, cj, li, bl, bu, acc, tmp) = (
        q(&ri_r),
        q(&cj_r),
        q(&li_r),
        q(&bl_r),
        q(&bu_r),
        q(&acc_r),
        q(&tmp_r),
    );

    // current node
    let flat: Vec<Word> = nodes
        .iter()
        .map(|nd| {
            [&nd.op, &nd.k1, &nd.k2, &nd.l, &nd.u, &nd.v]
                .into_iter()
                .flatten()
                .copied()
                .collect()
        })
        .collect();
    let node = b.select(&cj, &flat);
    let (op, rest) = node.split_at(Opcode::BITS);
    let (k1, rest) = rest.split_at(cb);
    let (k2, rest) = rest.split_at(cb);
    let (l, rest) = rest.split_at(w);
    let (u, v) = rest.split_at(w);
    let lines = b.decode(op, 16);
    let is = |o: Opcode| lines[o.code() as usize];
    let until = is(Opcode::Until);
    let always = is(Opcode::Always);
    let eventually = is(Opcode::Eventually);
    let unary_temporal = b.xor(always, eventually);
    let is_temp = b.xor(until, unary_temporal);

    // row read port: cells of the row, then x, t, valid, valid of next row
    let ri_next_row = b.increment(&ri, ONE);
    let rsel = b.mux_word(unb.q, &ri, &ri_next_row);
    let rsel = b.mux_word(lp.q, &rsel, &li);
    let rows: Vec<Word> = (0..n)
        .map(|r| {
            let mut word: Word = cells[r].iter().flat_map(|c| q(c)).collect();
            word.extend(&xs[r]);
            word.extend(&tau[r]);
            word.push(valid[r]);
            word.push(if r + 1 < n { valid[r + 1] } else { ZERO });
            word
        })
        .collect();
    let row = b.select(&rsel, &rows);
    let col_words: Vec<Word> = row[..m * w].chunks(w).map(|c| c.to_vec()).collect();
    let xr = &row[m * w..m * w + w];
    let tr = &row[m * w + w..m * w + 2 * w];
    let v_row = row[m * w + 2 * w];
    let v_next = row[m * w + 2 * w + 1];
    let a = b.select(k1, &col_words);
    let bcol = b.mux_word(unary_temporal, k2, k1);
    let bcol = b.mux_word(unb.q, &bcol, &cj);
    let bv = b.select(&bcol, &col_words);

    // one-cycle operators
    let atom = {
        let ext = |x: &[Bit]| -> Word { x.iter().copied().chain([x[w - 1]]).collect() };
        let d = b.sub(&ext(xr), &ext(v));
        let d = b.cond_neg(is(Opcode::AtomLe), &d);
        let nd = b.not(d[w]);
        let pos_over = b.and(nd, d[w - 1]);
        let low_zero = b.is_zero(&d[..w - 1]);
        let nd1 = b.not(d[w - 1]);
        let low_or = b.or(nd1, low_zero);
        let neg_over = b.and(d[w], low_or);
        let r = b.mux_word(neg_over, &d[..w], &ninf);
        b.mux_word(pos_over, &r, &pinf)
    };
    let negate_a = {
        let t = b.xor(is(Opcode::Not), is(Opcode::Implies));
        b.xor(t, is(Opcode::Iff))
    };
    let a1 = b.cond_neg(negate_a, &a);
    let lt = b.lt_signed(&a1, &bv);
    let mx = b.mux_word(lt, &a1, &bv);
    let mn = {
        let t = b.xor_word(&a1, &bv);
        b.xor_word(&t, &mx)
    };
    let neg_mn = b.neg(&mn);
    let iff = b.min_signed(&mx, &neg_mn);
    let empty = b.mux_word(always, &ninf, &pinf);
    let l_zero = b.is_zero(l);
    let first = b.mux_word(l_zero, &empty, &bv);
    let alu = {
        let or_like = b.xor(is(Opcode::Or), is(Opcode::Implies));
        let atom_sel = b.xor(is(Opcode::AtomGe), is(Opcode::AtomLe));
        let terms = [
            (is(Opcode::True), pinf.clone()),
            (atom_sel, atom),
            (is(Opcode::Not), a1.clone()),
            (is(Opcode::And), mn),
            (or_like, mx),
            (is(Opcode::Iff), iff),
            (is_temp, first),
        ];
        let mut res = Builder::constant(0, w);
        for (s, val) in terms {
            let g = b.gate_word(s, &val);
            res = b.xor_word(&res, &g);
        }
        res
    };

    // bounds unit: window of row ri is rows [count(t < t_ri + l), count(t < t_ri + u) - 1]
    let ext0 = |x: &[Bit]| -> Word { x.iter().copied().chain([ZERO]).collect() };
    let (lo, _) = b.add(&ext0(tr), &ext0(l), ZERO);
    let (hi, _) = b.add(&ext0(tr), &ext0(u), ZERO);
    let u_inf = b.eq_const(u, width.pinf() as u64);
    let mut below_lo = Vec::with_capacity(n);
    let mut below_hi = Vec::with_capacity(n);
    for r in 0..n {
        let t = ext0(&tau[r]);
        let c_lo = b.lt_unsigned(&t, &lo);
        below_lo.push(b.and(valid[r], c_lo));
        let c_hi = b.lt_unsigned(&t, &hi);
        let c_hi = b.or(u_inf, c_hi);
        below_hi.push(b.and(valid[r], c_hi));
    }
    // both flags are prefixes of ones; the falling edge is one-hot
    let count = |b: &mut Builder, flags: &[Bit], offset: usize| -> Word {
        let mut out = vec![ZERO; rb];
        for r in 0..n {
            let next = if r + 1 < n { flags[r + 1] } else { ZERO };
            let nn = b.not(next);
            let edge = b.and(flags[r], nn);
            let value = r + offset;
            for (k, bit) in out.iter_mut().enumerate() {
                if (value >> k) & 1 == 1 {
                    *bit = b.xor(*bit, edge);
                }
            }
        }
        out
    };
    let new_bl = count(&mut b, &below_lo, 1);
    let new_bu = count(&mut b, &below_hi, 0);

    // controller decisions in FETCH
    let u_fin = b.not(u_inf);
    let l_nz = b.not(l_zero);
    let bounded = b.or(u_fin, l_nz);
    let not_last = v_next;
    let temp_more = b.and(is_temp, not_last);
    let fetch_valid = b.and(fetch.q, v_row);
    let n_row = b.not(v_row);
    let skip = b.and(fetch.q, n_row);
    let enter = b.and(fetch_valid, temp_more);
    let go_loop = b.and(enter, bounded);
    let go_unb = b.xor(enter, go_loop);
    let fetch_write = b.xor(fetch_valid, enter);

    // temporal step shared by UNB and LOOP
    let inner = b.min_signed(&bv, &tmp);
    let lt_acc = b.lt_signed(&acc, &inner);
    let take_inner = b.xor(lt_acc, always);
    let folded = b.mux_word(take_inner, &acc, &inner);
    let before_window = b.lt_unsigned(&li, &bl);
    let in_loop_window = b.not(before_window);
    let in_win = b.or(unb.q, in_loop_window);
    let acc_new = b.mux_word(in_win, &acc, &folded);
    let tmp_min = b.min_signed(&tmp, &a);
    let tmp_new = b.mux_word(until, &tmp, &tmp_min);
    let at_end = b.eq_word(&li, &bu);
    let loop_write = b.and(lp.q, at_end);
    let loop_more = b.xor(lp.q, loop_write);

    let write = {
        let t = b.xor(fetch_write, unb.q);
        b.xor(t, loop_write)
    };
    let wval = b.mux_word(fetch.q, &acc_new, &alu);

    // register file
    let rdec = b.decode(&ri, n);
    let cdec = b.decode(&cj, m);
    for r in 0..n {
        let wr = b.and(write, rdec[r]);
        for c in 0..m {
            let we = b.and(wr, cdec[c]);
            let cur = q(&cells[r][c]);
            let d = b.mux_word(we, &cur, &wval);
            b.connect_word(&cells[r][c], &d);
        }
    }

    // cell cursor
    let cj_zero = b.is_zero(&cj);
    let ri_zero = b.is_zero(&ri);
    let ri_nz = b.not(ri_zero);
    let cj_nz = b.not(cj_zero);
    let row_end = b.and(write, cj_zero);
    let adv_done = b.and(row_end, ri_zero);
    let skip_done = b.and(skip, ri_zero);
    let next_row = {
        let t = b.and(row_end, ri_nz);
        let s = b.and(skip, ri_nz);
        b.xor(t, s)
    };
    let ri_dec = b.decrement(&ri);
    let ri_next = b.mux_word(next_row, &ri, &ri_dec);
    b.connect_word(&ri_r, &ri_next);
    let step_col = b.and(write, cj_nz);
    let cj_dec = b.decrement(&cj);
    let cj_next = b.mux_word(step_col, &cj, &cj_dec);
    let cj_next = b.mux_word(row_end, &cj_next, &Builder::constant((m - 1) as i64, cb));
    b.connect_word(&cj_r, &cj_next);

    let finished = b.xor(adv_done, skip_done);
    let fetch_next = {
        let t = b.xor(write, adv_done);
        let s = b.and(skip, ri_nz);
        b.xor(t, s)
    };
    b.connect(fetch, fetch_next);
    b.connect(unb, go_unb);
    let loop_next = b.xor(go_loop, loop_more);
    b.connect(lp, loop_next);
    let done_next = b.or(done.q, finished);
    b.connect(done, done_next);

    let li_inc = b.increment(&li, ONE);
    let li_next = b.mux_word(loop_more, &li, &li_inc);
    let li_next = b.mux_word(go_loop, &li_next, &ri);
    b.connect_word(&li_r, &li_next);
    let bl_next = b.mux_word(go_loop, &bl, &new_bl);
    b.connect_word(&bl_r, &bl_next);
    let bu_next = b.mux_word(go_loop, &bu, &new_bu);
    b.connect_word(&bu_r, &bu_next);

    let acc_enter = b.mux_word(bounded, &bv, &empty);
    let acc_next = b.mux_word(fetch.q, &acc_new, &acc_enter);
    b.connect_word(&acc_r, &acc_next);
    let tmp_unb = b.mux_word(until, &pinf, &a);
    let tmp_enter = b.mux_word(bounded, &tmp_unb, &pinf);
    let tmp_next = b.mux_word(fetch.q, &tmp_new, &tmp_enter);
    b.connect_word(&tmp_r, &tmp_next);

    for bit in q(&cells[0][0]) {
        b.output(bit);
    }
    b.output(done.q);
    Ok(b.finish(Params {
        n,
        m,
        w: width.bits(),
        cycles: worst_case_cycles(n, m),
    }))
}
