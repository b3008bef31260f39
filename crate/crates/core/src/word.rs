//! Fixed-width signed words and the robustness value domain.
//!
//! Every quantity that crosses into the circuit (timestamps, signal values,
//! thresholds, interval endpoints, robustness) is a `W`-bit two's complement
//! word. Robustness reserves the two symmetric extremes as infinities:
//! `PINF = 2^(W-1) - 1` and `NINF = -PINF`. The raw two's complement minimum
//! is never produced, which keeps negation an involution.

use std::fmt;

use thiserror::Error;

/// Smallest supported word width.
pub const MIN_WIDTH: u32 = 4;
/// Largest supported word width; leaves headroom for `W + 1` bit sums in `i64`.
pub const MAX_WIDTH: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("word width {0} outside supported range [{MIN_WIDTH}, {MAX_WIDTH}]")]
pub struct WidthError(pub u32);

/// Bit width `W` of every data word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Width(u32);

impl Width {
    pub fn new(bits: u32) -> Result<Self, WidthError> {
        if (MIN_WIDTH..=MAX_WIDTH).contains(&bits) {
            Ok(Width(bits))
        } else {
            Err(WidthError(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Positive infinity sentinel, also the largest finite magnitude.
    pub fn pinf(self) -> i64 {
        (1i64 << (self.0 - 1)) - 1
    }

    pub fn ninf(self) -> i64 {
        -self.pinf()
    }

    /// Clamp an exact integer into `[NINF, PINF]`.
    pub fn saturate(self, v: i64) -> Rob {
        Rob(v.clamp(self.ninf(), self.pinf()))
    }

    pub fn contains(self, v: i64) -> bool {
        (self.ninf()..=self.pinf()).contains(&v)
    }

    pub fn rob_pinf(self) -> Rob {
        Rob(self.pinf())
    }

    pub fn rob_ninf(self) -> Rob {
        Rob(self.ninf())
    }

    /// Two's complement bits of `v`, least significant first.
    pub fn to_bits(self, v: i64) -> Vec<bool> {
        (0..self.0).map(|k| (v >> k) & 1 == 1).collect()
    }

    /// Sign-extending inverse of [`Width::to_bits`].
    pub fn from_bits(self, bits: &[bool]) -> i64 {
        assert_eq!(bits.len(), self.0 as usize, "word length mismatch");
        let raw = bits
            .iter()
            .enumerate()
            .fold(0i64, |acc, (k, &b)| acc | ((b as i64) << k));
        let shift = 64 - self.0;
        (raw << shift) >> shift
    }

    pub fn display(self, rob: Rob) -> RobDisplay {
        RobDisplay { rob, width: self }
    }
}

/// A robustness value. Always within `[NINF, PINF]` of the width it was
/// produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rob(pub i64);

impl Rob {
    pub fn value(self) -> i64 {
        self.0
    }

    /// Negation. Swaps the sentinels because the domain is symmetric.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Rob {
        Rob(-self.0)
    }

    pub fn verdict(self) -> Verdict {
        match self.0.signum() {
            1 => Verdict::Sat,
            -1 => Verdict::Unsat,
            _ => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Renders sentinels as `PINF` / `NINF`.
pub struct RobDisplay {
    rob: Rob,
    width: Width,
}

impl fmt::Display for RobDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rob.0 == self.width.pinf() {
            f.write_str("PINF")
        } else if self.rob.0 == self.width.ninf() {
            f.write_str("NINF")
        } else {
            write!(f, "{}", self.rob.0)
        }
    }
}

/// Number of bits needed to write every integer in `0..=max`.
pub fn bits_for(max: usize) -> usize {
    (usize::BITS - max.leading_zeros()).max(1) as usize
}
