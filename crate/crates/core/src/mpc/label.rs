use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

/// Label length. Every label keeps its top [`TAG_BITS`] bits zero; the
/// evaluator checks them after decrypting a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kappa {
    K128,
    K256,
}

/// Bits of each label reserved as an all-zero integrity tag.
pub const TAG_BITS: u32 = 32;

impl Kappa {
    pub fn from_bits(bits: u32) -> Option<Kappa> {
        match bits {
            128 => Some(Kappa::K128),
            256 => Some(Kappa::K256),
            _ => None,
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Kappa::K128 => 128,
            Kappa::K256 => 256,
        }
    }

    pub fn bytes(self) -> usize {
        self.bits() as usize / 8
    }

    fn words(self) -> usize {
        self.bits() as usize / 64
    }
}

/// A wire label. Words past the security parameter stay zero; bit 0 is the
/// permute (color) bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Label(pub [u64; 4]);

impl Label {
    pub const ZERO: Label = Label([0; 4]);

    pub fn random<R: RngCore + CryptoRng + ?Sized>(rng: &mut R, kappa: Kappa) -> Label {
        let mut w = [0u64; 4];
        for x in w.iter_mut().take(kappa.words()) {
            *x = rng.next_u64();
        }
        Label(w).with_tag_cleared(kappa)
    }

    fn with_tag_cleared(mut self, kappa: Kappa) -> Label {
        self.0[kappa.words() - 1] &= u64::MAX >> TAG_BITS;
        self
    }

    pub fn color(self) -> bool {
        self.0[0] & 1 == 1
    }

    /// Whether the integrity tag is intact.
    pub fn tag_ok(self, kappa: Kappa) -> bool {
        self.0[kappa.words() - 1] >> (64 - TAG_BITS) == 0
    }

    pub fn write(self, kappa: Kappa, out: &mut [u8]) {
        for (k, chunk) in out[..kappa.bytes()].chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&self.0[k].to_le_bytes());
        }
    }

    pub fn to_bytes(self, kappa: Kappa) -> Vec<u8> {
        let mut v = vec![0; kappa.bytes()];
        self.write(kappa, &mut v);
        v
    }

    /// Reads `kappa.bytes()` bytes; the caller checks the length.
    pub fn read(kappa: Kappa, bytes: &[u8]) -> Label {
        let mut w = [0u64; 4];
        for (k, chunk) in bytes[..kappa.bytes()].chunks_exact(8).enumerate() {
            w[k] = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        Label(w)
    }
}

impl std::ops::BitXor for Label {
    type Output = Label;
    fn bitxor(self, o: Label) -> Label {
        Label([
            self.0[0] ^ o.0[0],
            self.0[1] ^ o.0[1],
            self.0[2] ^ o.0[2],
            self.0[3] ^ o.0[3],
        ])
    }
}

impl std::ops::BitXorAssign for Label {
    fn bitxor_assign(&mut self, o: Label) {
        *self = *self ^ o;
    }
}

/// Free-XOR offset: color bit set, tag bits clear.
pub fn random_delta<R: RngCore + CryptoRng + ?Sized>(rng: &mut R, kappa: Kappa) -> Label {
    let mut d = Label::random(rng, kappa);
    d.0[0] |= 1;
    d
}

const GC_DOMAIN: &[u8] = b"privmon/gc/v1";

/// Row key for an AND table: `H(ka || kb || gate || cycle)` truncated to kappa.
pub fn row_pad(kappa: Kappa, ka: Label, kb: Label, gate: u32, cycle: u32) -> Label {
    let mut buf = [0u8; 32];
    let mut h = Sha256::new();
    h.update(GC_DOMAIN);
    ka.write(kappa, &mut buf);
    h.update(&buf[..kappa.bytes()]);
    kb.write(kappa, &mut buf);
    h.update(&buf[..kappa.bytes()]);
    h.update(gate.to_le_bytes());
    h.update(cycle.to_le_bytes());
    let digest = h.finalize();
    Label::read(kappa, &digest)
}
