//! The two-party session. The verifier (formula owner) garbles, the designer
//! (trace owner) evaluates, and both end with the robustness value.
//!
//! Frame order, garbler `G` and evaluator `E`:
//!
//! ```text
//! E->G HELLO          version
//! G->E PARAMS         proposed session parameters
//! E->G PARAMS-ACK     0 or a rejection reason
//! G->E OT1            sender point
//! E->G OT2            one chooser point per trace bit
//! G->E OT3            both masked labels per trace bit
//! G->E GARBLER-INPUTS formula, constant and initial-state labels
//! G->E CYCLE-TABLES   x cycles, in cycle order
//! G->E DECODE-INFO    output colors, packed LSB first
//! E->G OUTPUT         robustness, i64
//! G->E CLOSE
//! ```
//!
//! Any other frame, or an ERROR frame, ends the session on both sides.

mod frame;
mod session;

pub use frame::{
    expect_frame, read_frame, read_frame_into, write_frame, Metered, MsgType, HEADER_BYTES,
    MAX_PAYLOAD,
};
pub use session::{negotiate, run_evaluator, run_garbler, run_loopback, Role, SessionReport};

use std::fmt;

use crate::circuit::{worst_case_cycles, CircuitError};
use crate::mpc::{Kappa, MpcError};
use crate::word::Width;

pub const VERSION: u8 = 0x01;

/// Bytes of a PARAMS payload.
pub const PARAMS_BYTES: usize = 16;

/// Reason codes carried by PARAMS-ACK and ERROR frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Reason {
    Version = 1,
    Kappa = 2,
    TraceCapacity = 3,
    FormulaCapacity = 4,
    Width = 5,
    CycleMismatch = 6,
    TooFewCycles = 7,
    BadParams = 8,
    OutOfOrder = 9,
    Malformed = 10,
    Integrity = 11,
    Internal = 12,
}

impl Reason {
    pub fn from_code(code: u8) -> Option<Reason> {
        use Reason::*;
        [
            Version,
            Kappa,
            TraceCapacity,
            FormulaCapacity,
            Width,
            CycleMismatch,
            TooFewCycles,
            BadParams,
            OutOfOrder,
            Malformed,
            Integrity,
            Internal,
        ]
        .into_iter()
        .find(|r| *r as u8 == code)
    }

    /// Codes that can end the handshake.
    pub fn is_negotiation(self) -> bool {
        (self as u8) <= Reason::BadParams as u8
    }

    fn text(self) -> &'static str {
        match self {
            Reason::Version => "protocol version mismatch",
            Reason::Kappa => "label length mismatch",
            Reason::TraceCapacity => "trace capacity mismatch",
            Reason::FormulaCapacity => "formula capacity mismatch",
            Reason::Width => "word width mismatch",
            Reason::CycleMismatch => "cycle count mismatch",
            Reason::TooFewCycles => "cycle count below the worst case",
            Reason::BadParams => "parameters out of range",
            Reason::OutOfOrder => "frame out of order",
            Reason::Malformed => "malformed frame",
            Reason::Integrity => "garbled table failed its integrity check",
            Reason::Internal => "internal failure",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.text(), *self as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("transport: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown frame type {0}")]
    UnknownType(u8),
    #[error("frame of {0} bytes exceeds the limit")]
    FrameTooLarge(usize),
    #[error("expected {expected:?} frame, got {got:?}")]
    UnexpectedFrame { expected: MsgType, got: MsgType },
    #[error("malformed {0}")]
    Malformed(&'static str),
    #[error("NEGOTIATE-FAIL: {0}")]
    Negotiate(Reason),
    #[error("peer aborted with code {code}: {message}")]
    Peer { code: u8, message: String },
    #[error("netlist does not match the session parameters")]
    NetlistMismatch,
    #[error("monitor did not finish within the agreed cycles")]
    NotDone,
    #[error(transparent)]
    Mpc(#[from] MpcError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

impl ProtocolError {
    /// Code sent to the peer when this error aborts a session.
    pub fn reason(&self) -> Reason {
        match self {
            ProtocolError::UnexpectedFrame { .. } | ProtocolError::UnknownType(_) => {
                Reason::OutOfOrder
            }
            ProtocolError::Malformed(_) | ProtocolError::FrameTooLarge(_) => Reason::Malformed,
            ProtocolError::Negotiate(r) => *r,
            ProtocolError::Mpc(MpcError::Integrity { .. }) => Reason::Integrity,
            ProtocolError::Mpc(_) => Reason::Malformed,
            _ => Reason::Internal,
        }
    }
}

/// Public parameters both parties commit to before any secret is touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionParams {
    pub n: usize,
    pub m: usize,
    pub width: Width,
    pub kappa: Kappa,
    pub cycles: usize,
    pub version: u8,
}

impl SessionParams {
    /// Parameters running exactly the worst-case cycle count.
    pub fn new(n: usize, m: usize, width: Width, kappa: Kappa) -> Self {
        SessionParams {
            n,
            m,
            width,
            kappa,
            cycles: if n == 0 || m == 0 {
                0
            } else {
                worst_case_cycles(n, m)
            },
            version: VERSION,
        }
    }

    pub fn with_cycles(self, cycles: usize) -> Self {
        SessionParams { cycles, ..self }
    }

    pub fn validate(&self) -> Result<(), Reason> {
        if self.version != VERSION {
            return Err(Reason::Version);
        }
        if self.n == 0
            || self.m == 0
            || self.n > u32::MAX as usize
            || self.m > u32::MAX as usize
            || self.cycles > u32::MAX as usize
        {
            return Err(Reason::BadParams);
        }
        if self.cycles < worst_case_cycles(self.n, self.m) {
            return Err(Reason::TooFewCycles);
        }
        Ok(())
    }

    /// First field in which `other` differs, as a rejection reason.
    pub fn mismatch(&self, other: &SessionParams) -> Option<Reason> {
        if self.version != other.version {
            Some(Reason::Version)
        } else if self.kappa != other.kappa {
            Some(Reason::Kappa)
        } else if self.n != other.n {
            Some(Reason::TraceCapacity)
        } else if self.m != other.m {
            Some(Reason::FormulaCapacity)
        } else if self.width != other.width {
            Some(Reason::Width)
        } else if self.cycles != other.cycles {
            Some(Reason::CycleMismatch)
        } else {
            None
        }
    }

    /// version u8, N u32, M u32, W u8, kappa u16, cycles u32; big-endian.
    pub fn to_bytes(&self) -> [u8; PARAMS_BYTES] {
        let mut out = [0u8; PARAMS_BYTES];
        out[0] = self.version;
        out[1..5].copy_from_slice(&(self.n as u32).to_be_bytes());
        out[5..9].copy_from_slice(&(self.m as u32).to_be_bytes());
        out[9] = self.width.bits() as u8;
        out[10..12].copy_from_slice(&(self.kappa.bits() as u16).to_be_bytes());
        out[12..16].copy_from_slice(&(self.cycles as u32).to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Reason> {
        if bytes.len() != PARAMS_BYTES {
            return Err(Reason::Malformed);
        }
        let u32_at = |k: usize| u32::from_be_bytes(bytes[k..k + 4].try_into().unwrap()) as usize;
        let width = Width::new(bytes[9] as u32).map_err(|_| Reason::Width)?;
        let kappa = Kappa::from_bits(u16::from_be_bytes([bytes[10], bytes[11]]) as u32)
            .ok_or(Reason::Kappa)?;
        Ok(SessionParams {
            version: bytes[0],
            n: u32_at(1),
            m: u32_at(5),
            width,
            kappa,
            cycles: u32_at(12),
        })
    }
}
