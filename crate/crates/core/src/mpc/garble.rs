//! Sequential garbling: every clock cycle the combinational gates are
//! garbled afresh under tweak `(gate index, cycle)`, while flip-flops hand
//! their input labels to the next cycle unchanged.

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::label::{random_delta, row_pad, Kappa, Label};
use super::MpcError;
use crate::circuit::{Gate, Netlist};

/// Garbled AND tables of one cycle, in gate order, four rows each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GarbledCycle {
    pub cycle: u32,
    pub tables: Vec<u8>,
}

/// Color of the false label of each output wire in the final cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeInfo {
    pub colors: Vec<bool>,
}

impl DecodeInfo {
    pub fn decode(&self, labels: &[Label]) -> Result<Vec<bool>, MpcError> {
        if labels.len() != self.colors.len() {
            return Err(MpcError::Length {
                what: "output labels",
                expected: self.colors.len(),
                got: labels.len(),
            });
        }
        Ok(labels
            .iter()
            .zip(&self.colors)
            .map(|(l, &c)| l.color() ^ c)
            .collect())
    }
}

/// Labels the garbler sends in the clear: its own inputs, the constants and
/// the flip-flop initial values, all already selected by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GarblerInputs {
    pub inputs: Vec<Label>,
    pub constants: Vec<Label>,
    pub dff_init: Vec<Label>,
}

pub fn table_bytes(net: &Netlist, kappa: Kappa) -> usize {
    net.and_count() * 4 * kappa.bytes()
}

/// Garbler state. Holds the false label of every wire for the current cycle.
pub struct Garbler<'a> {
    net: &'a Netlist,
    kappa: Kappa,
    delta: Label,
    zero: Vec<Label>,
    rng: ChaCha20Rng,
    cycle: u32,
    last_output_colors: Option<Vec<bool>>,
}

impl<'a> Garbler<'a> {
    pub fn new<R: RngCore + CryptoRng + ?Sized>(
        net: &'a Netlist,
        kappa: Kappa,
        rng: &mut R,
    ) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let mut rng = ChaCha20Rng::from_seed(seed);
        let delta = random_delta(&mut rng, kappa);
        let mut zero = vec![Label::ZERO; net.num_wires() as usize];
        let sources = net
            .garbler_inputs()
            .iter()
            .chain(net.evaluator_inputs())
            .copied()
            .chain(net.dffs().iter().map(|f| f.q))
            .chain(net.gates().iter().filter_map(|g| match g {
                Gate::Const { y, .. } => Some(*y),
                _ => None,
            }));
        for w in sources {
            zero[w as usize] = Label::random(&mut rng, kappa);
        }
        Garbler {
            net,
            kappa,
            delta,
            zero,
            rng,
            cycle: 0,
            last_output_colors: None,
        }
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    /// The free-XOR offset. Never leaves the garbler.
    pub fn delta(&self) -> Label {
        self.delta
    }

    /// False label of `wire` in the current cycle.
    pub fn zero_label(&self, wire: u32) -> Label {
        self.zero[wire as usize]
    }

    fn select(&self, wire: u32, value: bool) -> Label {
        let l = self.zero[wire as usize];
        if value {
            l ^ self.delta
        } else {
            l
        }
    }

    /// Active labels for the garbler's input bits, constants and initial state.
    pub fn garbler_inputs(&self, bits: &[bool]) -> Result<GarblerInputs, MpcError> {
        let wires = self.net.garbler_inputs();
        if bits.len() != wires.len() {
            return Err(MpcError::Length {
                what: "garbler input bits",
                expected: wires.len(),
                got: bits.len(),
            });
        }
        let inputs = wires
            .iter()
            .zip(bits)
            .map(|(&w, &b)| self.select(w, b))
            .collect();
        let constants = self
            .net
            .gates()
            .iter()
            .filter_map(|g| match *g {
                Gate::Const { value, y } => Some(self.select(y, value)),
                _ => None,
            })
            .collect();
        let dff_init = self
            .net
            .dffs()
            .iter()
            .map(|f| self.select(f.q, f.init))
            .collect();
        Ok(GarblerInputs {
            inputs,
            constants,
            dff_init,
        })
    }

    /// Both labels of each evaluator input wire, the sender side of the OTs.
    pub fn evaluator_pairs(&self) -> Vec<(Label, Label)> {
        self.net
            .evaluator_inputs()
            .iter()
            .map(|&w| (self.zero[w as usize], self.zero[w as usize] ^ self.delta))
            .collect()
    }

    pub fn garble_cycle(&mut self) -> GarbledCycle {
        let (kappa, delta) = (self.kappa, self.delta);
        let row = kappa.bytes();
        let mut tables = vec![0u8; table_bytes(self.net, kappa)];
        let mut off = 0;
        let cycle = self.cycle;
        for (gi, g) in self.net.gates().iter().enumerate() {
            match *g {
                Gate::Xor { a, b, y } => {
                    self.zero[y as usize] = self.zero[a as usize] ^ self.zero[b as usize]
                }
                Gate::Not { a, y } => self.zero[y as usize] = self.zero[a as usize] ^ delta,
                Gate::Const { .. } => {}
                Gate::And { a, b, y } => {
                    let (a0, b0) = (self.zero[a as usize], self.zero[b as usize]);
                    let y0 = Label::random(&mut self.rng, kappa);
                    self.zero[y as usize] = y0;
                    for va in [false, true] {
                        for vb in [false, true] {
                            let ka = if va { a0 ^ delta } else { a0 };
                            let kb = if vb { b0 ^ delta } else { b0 };
                            let out = if va && vb { y0 ^ delta } else { y0 };
                            let slot = 2 * ka.color() as usize + kb.color() as usize;
                            let ct = row_pad(kappa, ka, kb, gi as u32, cycle) ^ out;
                            ct.write(kappa, &mut tables[off + slot * row..off + (slot + 1) * row]);
                        }
                    }
                    off += 4 * row;
                }
            }
        }
        self.last_output_colors = Some(
            self.net
                .outputs()
                .iter()
                .map(|&w| self.zero[w as usize].color())
                .collect(),
        );
        let next: Vec<Label> = self
            .net
            .dffs()
            .iter()
            .map(|f| self.zero[f.d as usize])
            .collect();
        for (f, l) in self.net.dffs().iter().zip(next) {
            self.zero[f.q as usize] = l;
        }
        self.cycle += 1;
        GarbledCycle { cycle, tables }
    }

    pub fn cycles_garbled(&self) -> u32 {
        self.cycle
    }

    /// Decoding bits for the outputs of the last garbled cycle.
    pub fn decode_info(&self) -> Result<DecodeInfo, MpcError> {
        self.last_output_colors
            .clone()
            .map(|colors| DecodeInfo { colors })
            .ok_or(MpcError::NoCycles)
    }
}

/// Evaluator state: exactly one active label per wire.
pub struct Evaluator<'a> {
    net: &'a Netlist,
    kappa: Kappa,
    active: Vec<Label>,
    cycle: u32,
    outputs: Option<Vec<Label>>,
    peak_buffer: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        net: &'a Netlist,
        kappa: Kappa,
        garbler: &GarblerInputs,
        evaluator_inputs: &[Label],
    ) -> Result<Self, MpcError> {
        let consts: Vec<u32> = net
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::Const { y, .. } => Some(*y),
                _ => None,
            })
            .collect();
        let check = |what: &'static str, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(MpcError::Length {
                    what,
                    expected,
                    got,
                })
            }
        };
        check(
            "garbler input labels",
            net.garbler_inputs().len(),
            garbler.inputs.len(),
        )?;
        check("constant labels", consts.len(), garbler.constants.len())?;
        check("flip-flop labels", net.dffs().len(), garbler.dff_init.len())?;
        check(
            "evaluator input labels",
            net.evaluator_inputs().len(),
            evaluator_inputs.len(),
        )?;
        let mut active = vec![Label::ZERO; net.num_wires() as usize];
        let pairs = net
            .garbler_inputs()
            .iter()
            .zip(&garbler.inputs)
            .chain(net.evaluator_inputs().iter().zip(evaluator_inputs))
            .chain(consts.iter().zip(&garbler.constants))
            .chain(net.dffs().iter().map(|f| &f.q).zip(&garbler.dff_init));
        for (&w, &l) in pairs {
            active[w as usize] = l;
        }
        Ok(Evaluator {
            net,
            kappa,
            active,
            cycle: 0,
            outputs: None,
            peak_buffer: 0,
        })
    }

    pub fn eval_cycle(&mut self, gc: &GarbledCycle) -> Result<(), MpcError> {
        if gc.cycle != self.cycle {
            return Err(MpcError::CycleOrder {
                expected: self.cycle,
                got: gc.cycle,
            });
        }
        let kappa = self.kappa;
        let row = kappa.bytes();
        let expected = table_bytes(self.net, kappa);
        if gc.tables.len() != expected {
            return Err(MpcError::Length {
                what: "cycle tables",
                expected,
                got: gc.tables.len(),
            });
        }
        self.peak_buffer = self.peak_buffer.max(gc.tables.len());
        let mut off = 0;
        for (gi, g) in self.net.gates().iter().enumerate() {
            match *g {
                Gate::Xor { a, b, y } => {
                    self.active[y as usize] = self.active[a as usize] ^ self.active[b as usize]
                }
                Gate::Not { a, y } => self.active[y as usize] = self.active[a as usize],
                Gate::Const { .. } => {}
                Gate::And { a, b, y } => {
                    let (ka, kb) = (self.active[a as usize], self.active[b as usize]);
                    let slot = 2 * ka.color() as usize + kb.color() as usize;
                    let start = off + slot * row;
                    let ct = Label::read(kappa, &gc.tables[start..start + row]);
                    let out = ct ^ row_pad(kappa, ka, kb, gi as u32, gc.cycle);
                    if !out.tag_ok(kappa) {
                        return Err(MpcError::Integrity {
                            cycle: gc.cycle,
                            gate: gi as u32,
                        });
                    }
                    self.active[y as usize] = out;
                    off += 4 * row;
                }
            }
        }
        self.outputs = Some(
            self.net
                .outputs()
                .iter()
                .map(|&w| self.active[w as usize])
                .collect(),
        );
        let next: Vec<Label> = self
            .net
            .dffs()
            .iter()
            .map(|f| self.active[f.d as usize])
            .collect();
        for (f, l) in self.net.dffs().iter().zip(next) {
            self.active[f.q as usize] = l;
        }
        self.cycle += 1;
        Ok(())
    }

    /// Active output labels of the last evaluated cycle.
    pub fn output_labels(&self) -> Result<&[Label], MpcError> {
        self.outputs.as_deref().ok_or(MpcError::NoCycles)
    }

    /// Active label of `wire` at the start of the next cycle.
    pub fn active_label(&self, wire: u32) -> Label {
        self.active[wire as usize]
    }

    pub fn cycles_evaluated(&self) -> u32 {
        self.cycle
    }

    /// Largest garbled-table buffer held at once.
    pub fn peak_buffer(&self) -> usize {
        self.peak_buffer
    }
}

/// Garble and evaluate in one process with the evaluator's labels selected
/// directly instead of by OT. Returns decoded output bits (done flag last).
pub fn run_local<R: RngCore + CryptoRng + ?Sized>(
    net: &Netlist,
    kappa: Kappa,
    garbler_bits: &[bool],
    evaluator_bits: &[bool],
    cycles: usize,
    rng: &mut R,
) -> Result<Vec<bool>, MpcError> {
    if cycles == 0 {
        return Err(MpcError::NoCycles);
    }
    let mut g = Garbler::new(net, kappa, rng);
    let gin = g.garbler_inputs(garbler_bits)?;
    let pairs = g.evaluator_pairs();
    if pairs.len() != evaluator_bits.len() {
        return Err(MpcError::Length {
            what: "evaluator input bits",
            expected: pairs.len(),
            got: evaluator_bits.len(),
        });
    }
    let chosen: Vec<Label> = pairs
        .iter()
        .zip(evaluator_bits)
        .map(|(p, &b)| if b { p.1 } else { p.0 })
        .collect();
    let mut e = Evaluator::new(net, kappa, &gin, &chosen)?;
    for _ in 0..cycles {
        let gc = g.garble_cycle();
        e.eval_cycle(&gc)?;
    }
    g.decode_info()?.decode(e.output_labels()?)
}
