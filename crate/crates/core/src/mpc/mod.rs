//! Garbled-circuit machinery: wire labels, per-cycle garbling and
//! evaluation of sequential netlists, and base oblivious transfer.

mod garble;
mod label;
mod ot;

pub use garble::{
    run_local, table_bytes, DecodeInfo, Evaluator, GarbledCycle, Garbler, GarblerInputs,
};
pub use label::{random_delta, row_pad, Kappa, Label, TAG_BITS};
pub use ot::{transfer_local, OtChooser, OtSender, POINT_BYTES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MpcError {
    #[error("expected {expected} {what}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("garbled row failed its integrity check at cycle {cycle}, gate {gate}")]
    Integrity { cycle: u32, gate: u32 },
    #[error("expected tables for cycle {expected}, got cycle {got}")]
    CycleOrder { expected: u32, got: u32 },
    #[error("no cycle has been garbled or evaluated")]
    NoCycles,
    #[error("malformed group element")]
    BadPoint,
}
