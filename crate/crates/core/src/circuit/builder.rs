//! Gate-level circuit construction with constant folding, plus the
//! ripple-carry word operations the monitor is assembled from. Words are
//! little-endian `Vec<Bit>` (index 0 is the least significant bit).

use super::netlist::{Dff, Gate, Netlist, Params};

/// A signal during construction: either a known constant or a wire id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Wire(u32),
}

pub const ZERO: Bit = Bit::Const(false);
pub const ONE: Bit = Bit::Const(true);

pub type Word = Vec<Bit>;

/// Handle for a flip-flop whose input is connected after its output is used.
#[derive(Debug, Clone, Copy)]
pub struct DffRef {
    index: usize,
    pub q: Bit,
}

#[derive(Debug, Default)]
pub struct Builder {
    gates: Vec<Gate>,
    num_wires: u32,
    garbler_inputs: Vec<u32>,
    evaluator_inputs: Vec<u32>,
    dffs: Vec<(u32, Option<Bit>, bool)>,
    outputs: Vec<Bit>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> u32 {
        let w = self.num_wires;
        self.num_wires += 1;
        w
    }

    pub fn garbler_input(&mut self) -> Bit {
        let w = self.fresh();
        self.garbler_inputs.push(w);
        Bit::Wire(w)
    }

    pub fn evaluator_input(&mut self) -> Bit {
        let w = self.fresh();
        self.evaluator_inputs.push(w);
        Bit::Wire(w)
    }

    pub fn garbler_word(&mut self, bits: usize) -> Word {
        (0..bits).map(|_| self.garbler_input()).collect()
    }

    pub fn evaluator_word(&mut self, bits: usize) -> Word {
        (0..bits).map(|_| self.evaluator_input()).collect()
    }

    pub fn dff(&mut self, init: bool) -> DffRef {
        let q = self.fresh();
        self.dffs.push((q, None, init));
        DffRef {
            index: self.dffs.len() - 1,
            q: Bit::Wire(q),
        }
    }

    pub fn dff_word(&mut self, init: u64, bits: usize) -> Vec<DffRef> {
        (0..bits)
            .map(|k| self.dff(k < 64 && (init >> k) & 1 == 1))
            .collect()
    }

    pub fn connect(&mut self, dff: DffRef, d: Bit) {
        assert!(
            self.dffs[dff.index].1.is_none(),
            "flip-flop input connected twice"
        );
        self.dffs[dff.index].1 = Some(d);
    }

    pub fn connect_word(&mut self, dffs: &[DffRef], d: &[Bit]) {
        assert_eq!(dffs.len(), d.len());
        for (&f, &b) in dffs.iter().zip(d) {
            self.connect(f, b);
        }
    }

    pub fn output(&mut self, b: Bit) {
        self.outputs.push(b);
    }

    pub fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => ZERO,
            (Bit::Const(true), x) | (x, Bit::Const(true)) => x,
            (x, y) if x == y => x,
            (Bit::Wire(a), Bit::Wire(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::And { a, b, y });
                Bit::Wire(y)
            }
        }
    }

    pub fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(p), Bit::Const(q)) => Bit::Const(p ^ q),
            (Bit::Const(false), x) | (x, Bit::Const(false)) => x,
            (Bit::Const(true), x) | (x, Bit::Const(true)) => self.not(x),
            (x, y) if x == y => ZERO,
            (Bit::Wire(a), Bit::Wire(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::Xor { a, b, y });
                Bit::Wire(y)
            }
        }
    }

    pub fn not(&mut self, a: Bit) -> Bit {
        match a {
            Bit::Const(v) => Bit::Const(!v),
            Bit::Wire(a) => {
                let y = self.fresh();
                self.gates.push(Gate::Not { a, y });
                Bit::Wire(y)
            }
        }
    }

    pub fn or(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(true), _) | (_, Bit::Const(true)) => ONE,
            (Bit::Const(false), x) | (x, Bit::Const(false)) => x,
            (x, y) if x == y => x,
            _ => {
                let ab = self.and(a, b);
                let x = self.xor(a, b);
                self.xor(x, ab)
            }
        }
    }

    /// `s ? t : f`
    pub fn mux(&mut self, s: Bit, f: Bit, t: Bit) -> Bit {
        match s {
            Bit::Const(true) => t,
            Bit::Const(false) => f,
            _ if f == t => f,
            _ => {
                let d = self.xor(f, t);
                let sd = self.and(s, d);
                self.xor(f, sd)
            }
        }
    }

    pub fn or_all(&mut self, bits: &[Bit]) -> Bit {
        bits.iter().fold(ZERO, |acc, &b| self.or(acc, b))
    }

    pub fn and_all(&mut self, bits: &[Bit]) -> Bit {
        bits.iter().fold(ONE, |acc, &b| self.and(acc, b))
    }

    pub fn constant(value: i64, bits: usize) -> Word {
        (0..bits)
            .map(|k| Bit::Const((value >> k.min(63)) & 1 == 1))
            .collect()
    }

    pub fn not_word(&mut self, a: &[Bit]) -> Word {
        a.iter().map(|&x| self.not(x)).collect()
    }

    pub fn xor_word(&mut self, a: &[Bit], b: &[Bit]) -> Word {
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    /// Every bit of `a` ANDed with `s`.
    pub fn gate_word(&mut self, s: Bit, a: &[Bit]) -> Word {
        a.iter().map(|&x| self.and(s, x)).collect()
    }

    pub fn mux_word(&mut self, s: Bit, f: &[Bit], t: &[Bit]) -> Word {
        assert_eq!(f.len(), t.len());
        f.iter().zip(t).map(|(&x, &y)| self.mux(s, x, y)).collect()
    }

    /// Ripple-carry `a + b + cin`, one AND per bit. Returns sum and carry out.
    pub fn add(&mut self, a: &[Bit], b: &[Bit], cin: Bit) -> (Word, Bit) {
        assert_eq!(a.len(), b.len());
        let mut c = cin;
        let mut sum = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let xc = self.xor(x, c);
            let yc = self.xor(y, c);
            let s = self.xor(xc, y);
            let t = self.and(xc, yc);
            c = self.xor(c, t);
            sum.push(s);
        }
        (sum, c)
    }

    /// `a - b` modulo 2^len.
    pub fn sub(&mut self, a: &[Bit], b: &[Bit]) -> Word {
        let nb = self.not_word(b);
        self.add(a, &nb, ONE).0
    }

    /// Two's-complement negation. On values in `[NINF, PINF]` this is the
    /// saturating negation: the sentinels map onto each other.
    pub fn neg(&mut self, a: &[Bit]) -> Word {
        let na = self.not_word(a);
        self.increment(&na, ONE)
    }

    /// `(a ^ s) + s`: negate when `s` is set.
    pub fn cond_neg(&mut self, s: Bit, a: &[Bit]) -> Word {
        let flipped: Word = a.iter().map(|&x| self.xor(x, s)).collect();
        self.increment(&flipped, s)
    }

    /// `a + inc` for a single-bit increment.
    pub fn increment(&mut self, a: &[Bit], inc: Bit) -> Word {
        let mut c = inc;
        a.iter()
            .map(|&x| {
                let s = self.xor(x, c);
                c = self.and(x, c);
                s
            })
            .collect()
    }

    /// `a - 1` modulo 2^len.
    pub fn decrement(&mut self, a: &[Bit]) -> Word {
        let mut borrow = ONE;
        a.iter()
            .map(|&x| {
                let s = self.xor(x, borrow);
                let nx = self.not(x);
                borrow = self.and(nx, borrow);
                s
            })
            .collect()
    }

    /// Unsigned `a < b`: no carry out of `a + !b + 1`. One AND per bit.
    pub fn lt_unsigned(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        assert_eq!(a.len(), b.len());
        let mut c = ONE;
        for (&x, &y) in a.iter().zip(b) {
            let ny = self.not(y);
            let xc = self.xor(x, c);
            let yc = self.xor(ny, c);
            let t = self.and(xc, yc);
            c = self.xor(c, t);
        }
        self.not(c)
    }

    /// Signed `a < b`, via unsigned comparison with the sign bits flipped.
    pub fn lt_signed(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        let flip = |bld: &mut Self, w: &[Bit]| -> Word {
            let mut w = w.to_vec();
            let top = w.len() - 1;
            w[top] = bld.not(w[top]);
            w
        };
        let (fa, fb) = (flip(self, a), flip(self, b));
        self.lt_unsigned(&fa, &fb)
    }

    pub fn min_signed(&mut self, a: &[Bit], b: &[Bit]) -> Word {
        let lt = self.lt_signed(a, b);
        self.mux_word(lt, b, a)
    }

    pub fn max_signed(&mut self, a: &[Bit], b: &[Bit]) -> Word {
        let lt = self.lt_signed(a, b);
        self.mux_word(lt, a, b)
    }

    pub fn is_zero(&mut self, a: &[Bit]) -> Bit {
        let any = self.or_all(a);
        self.not(any)
    }

    pub fn eq_word(&mut self, a: &[Bit], b: &[Bit]) -> Bit {
        let d = self.xor_word(a, b);
        self.is_zero(&d)
    }

    pub fn eq_const(&mut self, a: &[Bit], value: u64) -> Bit {
        let c = Self::constant(value as i64, a.len());
        self.eq_word(a, &c)
    }

    /// `options[index]` by a mux tree over the index bits, low bit first.
    /// Indices past the end select an unspecified option.
    pub fn select(&mut self, index: &[Bit], options: &[Word]) -> Word {
        assert!(!options.is_empty());
        let mut level: Vec<Word> = options.to_vec();
        for &s in index {
            if level.len() == 1 {
                break;
            }
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                match pair {
                    [f, t] => next.push(self.mux_word(s, f, t)),
                    [only] => next.push(only.clone()),
                    _ => unreachable!(),
                }
            }
            level = next;
        }
        level.swap_remove(0)
    }

    /// One-hot decoding of `index` into `count` lines.
    pub fn decode(&mut self, index: &[Bit], count: usize) -> Vec<Bit> {
        let mut lines = vec![ONE];
        for (k, &s) in index.iter().enumerate().rev() {
            let mut next = Vec::with_capacity(lines.len() * 2);
            for &d in &lines {
                let hi = self.and(d, s);
                let lo = self.xor(d, hi);
                next.push(lo);
                next.push(hi);
            }
            // line `j` now stands for indices `j << k ..`; drop those past `count`
            next.truncate(count.div_ceil(1 << k).max(1));
            lines = next;
        }
        lines.resize(count, ZERO);
        lines
    }

    fn materialize(&mut self, b: Bit, consts: &mut [Option<u32>; 2]) -> u32 {
        match b {
            Bit::Wire(w) => w,
            Bit::Const(v) => *consts[v as usize].get_or_insert_with(|| {
                let y = self.num_wires;
                self.num_wires += 1;
                self.gates.push(Gate::Const { value: v, y });
                y
            }),
        }
    }

    /// Freeze into a netlist. Every flip-flop must have been connected.
    pub fn finish(mut self, params: Params) -> Netlist {
        let mut consts = [None, None];
        let dffs_raw = std::mem::take(&mut self.dffs);
        let mut dffs = Vec::with_capacity(dffs_raw.len());
        for (q, d, init) in dffs_raw {
            let d = d.expect("unconnected flip-flop");
            let d = self.materialize(d, &mut consts);
            dffs.push(Dff { d, q, init });
        }
        let outputs_raw = std::mem::take(&mut self.outputs);
        let outputs = outputs_raw
            .into_iter()
            .map(|b| self.materialize(b, &mut consts))
            .collect();
        // constants were appended last; hoist them so gate order stays topological
        self.gates.sort_by_key(|g| !matches!(g, Gate::Const { .. }));
        Netlist::from_parts(
            params,
            self.num_wires,
            self.garbler_inputs,
            self.evaluator_inputs,
            self.gates,
            dffs,
            outputs,
        )
        .expect("builder produced an invalid netlist")
    }
}
