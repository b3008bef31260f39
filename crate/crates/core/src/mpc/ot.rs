//! Batched 1-out-of-2 base OT over the Ristretto group.
//!
//! Sender picks `y`, publishes `S = yG`. For choice `b` the chooser picks
//! `x` and publishes `R = xG + bS`. The sender's pads are `H(yR)` and
//! `H(y(R - S))`; the chooser can form only `H(xS)`, which equals the pad of
//! its choice. Each pad is bound to the OT index and both public points.

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use super::label::{Kappa, Label};
use super::MpcError;

pub const POINT_BYTES: usize = 32;
const OT_DOMAIN: &[u8] = b"privmon/ot/v1";

fn pad(kappa: Kappa, index: u32, s: &[u8; 32], r: &[u8; 32], shared: &RistrettoPoint) -> Label {
    let mut h = Sha256::new();
    h.update(OT_DOMAIN);
    h.update(index.to_le_bytes());
    h.update(s);
    h.update(r);
    h.update(shared.compress().as_bytes());
    Label::read(kappa, &h.finalize())
}

fn point(bytes: &[u8]) -> Result<RistrettoPoint, MpcError> {
    CompressedRistretto::from_slice(bytes)
        .ok()
        .and_then(|c| c.decompress())
        .ok_or(MpcError::BadPoint)
}

fn random_scalar<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Scalar {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    Scalar::from_bytes_mod_order_wide(&wide)
}

pub struct OtSender {
    y: Scalar,
    s: [u8; 32],
    ys: RistrettoPoint,
}

impl OtSender {
    /// Returns the sender state and the first message (`S`).
    pub fn new<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> (Self, Vec<u8>) {
        let y = random_scalar(rng);
        let sp = &y * RISTRETTO_BASEPOINT_TABLE;
        let s = sp.compress().to_bytes();
        (OtSender { y, s, ys: y * sp }, s.to_vec())
    }

    /// Answer the chooser's points with both messages masked, `2 * kappa`
    /// bytes per OT.
    pub fn respond(
        &self,
        kappa: Kappa,
        msg2: &[u8],
        pairs: &[(Label, Label)],
    ) -> Result<Vec<u8>, MpcError> {
        if msg2.len() != pairs.len() * POINT_BYTES {
            return Err(MpcError::Length {
                what: "OT points",
                expected: pairs.len() * POINT_BYTES,
                got: msg2.len(),
            });
        }
        let kb = kappa.bytes();
        let mut out = vec![0u8; pairs.len() * 2 * kb];
        for (i, (chunk, &(m0, m1))) in msg2.chunks_exact(POINT_BYTES).zip(pairs).enumerate() {
            let rp = point(chunk)?;
            let r: [u8; 32] = chunk.try_into().unwrap();
            let yr = self.y * rp;
            let c0 = pad(kappa, i as u32, &self.s, &r, &yr) ^ m0;
            let c1 = pad(kappa, i as u32, &self.s, &r, &(yr - self.ys)) ^ m1;
            c0.write(kappa, &mut out[2 * i * kb..]);
            c1.write(kappa, &mut out[(2 * i + 1) * kb..]);
        }
        Ok(out)
    }
}

pub struct OtChooser {
    choices: Vec<bool>,
    xs: Vec<Scalar>,
    s: [u8; 32],
    sp: RistrettoPoint,
    rs: Vec<[u8; 32]>,
}

impl OtChooser {
    /// Returns the chooser state and the second message (one point per OT).
    pub fn new<R: RngCore + CryptoRng + ?Sized>(
        rng: &mut R,
        choices: &[bool],
        msg1: &[u8],
    ) -> Result<(Self, Vec<u8>), MpcError> {
        if msg1.len() != POINT_BYTES {
            return Err(MpcError::Length {
                what: "OT sender point",
                expected: POINT_BYTES,
                got: msg1.len(),
            });
        }
        let sp = point(msg1)?;
        let s: [u8; 32] = msg1.try_into().unwrap();
        let mut xs = Vec::with_capacity(choices.len());
        let mut rs = Vec::with_capacity(choices.len());
        let mut msg = Vec::with_capacity(choices.len() * POINT_BYTES);
        for &b in choices {
            let x = random_scalar(rng);
            let mut r = &x * RISTRETTO_BASEPOINT_TABLE;
            if b {
                r += sp;
            }
            let rb = r.compress().to_bytes();
            msg.extend_from_slice(&rb);
            xs.push(x);
            rs.push(rb);
        }
        Ok((
            OtChooser {
                choices: choices.to_vec(),
                xs,
                s,
                sp,
                rs,
            },
            msg,
        ))
    }

    /// Unmask the chosen message of every OT.
    pub fn finish(&self, kappa: Kappa, msg3: &[u8]) -> Result<Vec<Label>, MpcError> {
        let kb = kappa.bytes();
        let expected = self.choices.len() * 2 * kb;
        if msg3.len() != expected {
            return Err(MpcError::Length {
                what: "OT ciphertexts",
                expected,
                got: msg3.len(),
            });
        }
        Ok((0..self.choices.len())
            .map(|i| {
                let b = self.choices[i] as usize;
                let ct = Label::read(kappa, &msg3[(2 * i + b) * kb..]);
                ct ^ pad(
                    kappa,
                    i as u32,
                    &self.s,
                    &self.rs[i],
                    &(self.xs[i] * self.sp),
                )
            })
            .collect())
    }
}

/// Run a whole batch in memory, for tests and local runs.
pub fn transfer_local<R: RngCore + CryptoRng + ?Sized>(
    rng: &mut R,
    kappa: Kappa,
    pairs: &[(Label, Label)],
    choices: &[bool],
) -> Result<Vec<Label>, MpcError> {
    let (sender, m1) = OtSender::new(rng);
    let (chooser, m2) = OtChooser::new(rng, choices, &m1)?;
    let m3 = sender.respond(kappa, &m2, pairs)?;
    chooser.finish(kappa, &m3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn chooser_gets_chosen_message() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for kappa in [Kappa::K128, Kappa::K256] {
            let pairs: Vec<_> = (0..64)
                .map(|_| {
                    (
                        Label::random(&mut rng, kappa),
                        Label::random(&mut rng, kappa),
                    )
                })
                .collect();
            let choices: Vec<bool> = (0..64).map(|_| rng.gen()).collect();
            let got = transfer_local(&mut rng, kappa, &pairs, &choices).unwrap();
            for ((p, &b), g) in pairs.iter().zip(&choices).zip(&got) {
                assert_eq!(*g, if b { p.1 } else { p.0 });
                assert_ne!(*g, if b { p.0 } else { p.1 });
            }
        }
    }

    #[test]
    fn unchosen_pad_differs_from_chooser_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let k = Kappa::K128;
        let (sender, m1) = OtSender::new(&mut rng);
        let (chooser, m2) = OtChooser::new(&mut rng, &[false], &m1).unwrap();
        let zero = (Label::ZERO, Label::ZERO);
        let m3 = sender.respond(k, &m2, &[zero]).unwrap();
        // with all-zero messages the ciphertexts are the raw pads
        let pad0 = Label::read(k, &m3[..16]);
        let pad1 = Label::read(k, &m3[16..]);
        assert_eq!(chooser.finish(k, &m3).unwrap()[0], Label::ZERO);
        assert_ne!(pad0, pad1);
    }

    #[test]
    fn malformed_points_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        assert!(matches!(
            OtChooser::new(&mut rng, &[true], &[0xff; 32]),
            Err(MpcError::BadPoint)
        ));
        assert!(OtChooser::new(&mut rng, &[true], &[0; 31]).is_err());
        let (sender, _) = OtSender::new(&mut rng);
        let pair = (Label::ZERO, Label::ZERO);
        assert!(matches!(
            sender.respond(Kappa::K128, &[0xff; 32], &[pair]),
            Err(MpcError::BadPoint)
        ));
    }
}
