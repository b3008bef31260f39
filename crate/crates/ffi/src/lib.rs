//! C ABI over the privmon core.
//!
//! Every function returns a [`PrivmonStatus`]; on failure the message is
//! kept per thread and read with [`privmon_last_error`]. Handles are opaque,
//! created by `*_new`/`*_parse`/`*_build`/`*_load` and released by the
//! matching `*_free`, which accepts null. No function panics across the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use privmon::circuit::{build_monitor, Netlist, SimMode};
use privmon::mpc::Kappa;
use privmon::protocol::{run_loopback, ProtocolError, SessionParams};
use privmon::robustness::{dp_taliro, Trace};
use privmon::stl::{encode, parse_formula, FormulaEncoding};
use privmon::word::Width;

/// Matches the command-line exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrivmonStatus {
    Ok = 0,
    NullArgument = 1,
    Invalid = 2,
    Protocol = 3,
    Io = 4,
    Panic = 5,
}

pub struct PrivmonTrace(Trace);

pub struct PrivmonFormula {
    enc: FormulaEncoding,
}

pub struct PrivmonCircuit(Netlist);

/// Gate statistics of a circuit. `total` counts gates and flip-flops.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrivmonStats {
    pub total: usize,
    pub and_gates: usize,
    pub xor_gates: usize,
    pub not_gates: usize,
    pub const_gates: usize,
    pub dffs: usize,
    pub wires: usize,
    pub n: usize,
    pub m: usize,
    pub width: u32,
    pub cycles: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(PrivmonStatus, String);

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure(PrivmonStatus::Invalid, e.to_string())
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        let status = match e {
            ProtocolError::Io(_) => PrivmonStatus::Io,
            ProtocolError::Circuit(_) | ProtocolError::NetlistMismatch => PrivmonStatus::Invalid,
            _ => PrivmonStatus::Protocol,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PrivmonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PrivmonStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PrivmonStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PrivmonStatus::NullArgument, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not UTF-8")))
}

fn width(bits: u32) -> Result<Width, Failure> {
    Width::new(bits).map_err(Failure::invalid)
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn privmon_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Largest robustness value (`PINF`) at `width` bits, or 0 if unsupported.
#[no_mangle]
pub extern "C" fn privmon_pinf(width: u32) -> i64 {
    Width::new(width).map_or(0, |w| w.pinf())
}

/// Build a trace from `len` samples.
///
/// # Safety
/// `times` and `values` must point to `len` readable integers; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_trace_new(
    times: *const i64,
    values: *const i64,
    len: usize,
    width_bits: u32,
    out_trace: *mut *mut PrivmonTrace,
) -> PrivmonStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        if len > 0 && (times.is_null() || values.is_null()) {
            return Err(null("times or values"));
        }
        let (t, v) = if len == 0 {
            (Vec::new(), Vec::new())
        } else {
            (
                std::slice::from_raw_parts(times, len).to_vec(),
                std::slice::from_raw_parts(values, len).to_vec(),
            )
        };
        let trace = Trace::new(t, v, width(width_bits)?).map_err(Failure::invalid)?;
        *slot = Box::into_raw(Box::new(PrivmonTrace(trace)));
        Ok(())
    })
}

/// Load a `t,x` CSV trace.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_trace_load_csv(
    path: *const c_char,
    width_bits: u32,
    out_trace: *mut *mut PrivmonTrace,
) -> PrivmonStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        let path = text(path, "path")?;
        let w = width(width_bits)?;
        let data =
            std::fs::read(path).map_err(|e| Failure(PrivmonStatus::Io, format!("{path}: {e}")))?;
        let trace = Trace::from_csv(data.as_slice(), w).map_err(Failure::invalid)?;
        *slot = Box::into_raw(Box::new(PrivmonTrace(trace)));
        Ok(())
    })
}

/// Number of samples, 0 for null.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn privmon_trace_len(trace: *const PrivmonTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `trace` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn privmon_trace_free(trace: *mut PrivmonTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Parse and encode a formula. `m_max = 0` uses the formula's own node
/// count; otherwise the encoding is padded to `m_max` nodes.
///
/// # Safety
/// `formula` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_formula_parse(
    formula: *const c_char,
    m_max: usize,
    width_bits: u32,
    out_formula: *mut *mut PrivmonFormula,
) -> PrivmonStatus {
    guard(|| {
        let slot = out(out_formula, "out_formula")?;
        *slot = ptr::null_mut();
        let f = parse_formula(text(formula, "formula")?).map_err(Failure::invalid)?;
        let m = if m_max == 0 { f.node_count() } else { m_max };
        let enc = encode(&f, m, width(width_bits)?).map_err(Failure::invalid)?;
        *slot = Box::into_raw(Box::new(PrivmonFormula { enc }));
        Ok(())
    })
}

/// Encoded node count (including padding), 0 for null.
///
/// # Safety
/// `formula` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn privmon_formula_nodes(formula: *const PrivmonFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.enc.len())
}

/// # Safety
/// `formula` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn privmon_formula_free(formula: *mut PrivmonFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Cleartext robustness at sample 0.
///
/// # Safety
/// Handles must be live; `out_rob` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_monitor(
    trace: *const PrivmonTrace,
    formula: *const PrivmonFormula,
    out_rob: *mut i64,
) -> PrivmonStatus {
    guard(|| {
        let t = borrow(trace, "trace")?;
        let f = borrow(formula, "formula")?;
        let slot = out(out_rob, "out_rob")?;
        *slot = dp_taliro(&t.0, &f.enc).map_err(Failure::invalid)?.0;
        Ok(())
    })
}

/// Synthesize the monitor circuit for `n` samples and `m` formula nodes.
///
/// # Safety
/// `out_circuit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_circuit_build(
    n: usize,
    m: usize,
    width_bits: u32,
    out_circuit: *mut *mut PrivmonCircuit,
) -> PrivmonStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        *slot = ptr::null_mut();
        let net = build_monitor(n, m, width(width_bits)?).map_err(Failure::invalid)?;
        *slot = Box::into_raw(Box::new(PrivmonCircuit(net)));
        Ok(())
    })
}

/// Load a netlist in the text format.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_circuit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_circuit_load(
    path: *const c_char,
    out_circuit: *mut *mut PrivmonCircuit,
) -> PrivmonStatus {
    guard(|| {
        let slot = out(out_circuit, "out_circuit")?;
        *slot = ptr::null_mut();
        let path = text(path, "path")?;
        let data = std::fs::read_to_string(path)
            .map_err(|e| Failure(PrivmonStatus::Io, format!("{path}: {e}")))?;
        let net = Netlist::from_text(&data).map_err(Failure::invalid)?;
        *slot = Box::into_raw(Box::new(PrivmonCircuit(net)));
        Ok(())
    })
}

/// Write the netlist in the text format.
///
/// # Safety
/// `circuit` must be live; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn privmon_circuit_save(
    circuit: *const PrivmonCircuit,
    path: *const c_char,
) -> PrivmonStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let path = text(path, "path")?;
        std::fs::write(path, c.0.to_text())
            .map_err(|e| Failure(PrivmonStatus::Io, format!("{path}: {e}")))
    })
}

/// # Safety
/// `circuit` must be live; `out_stats` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_circuit_stats(
    circuit: *const PrivmonCircuit,
    out_stats: *mut PrivmonStats,
) -> PrivmonStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let slot = out(out_stats, "out_stats")?;
        let (s, p) = (c.0.stats(), c.0.params());
        *slot = PrivmonStats {
            total: s.total,
            and_gates: s.and,
            xor_gates: s.xor,
            not_gates: s.not,
            const_gates: s.constant,
            dffs: s.dff,
            wires: s.wires,
            n: p.n,
            m: p.m,
            width: p.w,
            cycles: p.cycles,
        };
        Ok(())
    })
}

/// # Safety
/// `circuit` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn privmon_circuit_free(circuit: *mut PrivmonCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Cleartext simulation for a fixed number of cycles; `cycles = 0` uses the
/// circuit's worst case.
///
/// # Safety
/// Handles must be live; `out_rob` must be writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_simulate(
    circuit: *const PrivmonCircuit,
    trace: *const PrivmonTrace,
    formula: *const PrivmonFormula,
    cycles: usize,
    out_rob: *mut i64,
) -> PrivmonStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let t = borrow(trace, "trace")?;
        let f = borrow(formula, "formula")?;
        let slot = out(out_rob, "out_rob")?;
        let cycles = (cycles > 0).then_some(cycles);
        let run =
            c.0.run_monitor(&t.0, &f.enc, SimMode::Fixed, cycles)
                .map_err(Failure::invalid)?;
        *slot = run.rob.0;
        Ok(())
    })
}

/// Run both protocol roles over a loopback connection and return the
/// evaluator's result. `kappa_bits` is 128 or 256; `cycles = 0` uses the
/// worst case; a null `seed` draws fresh randomness.
///
/// # Safety
/// Handles must be live; `seed` must be null or readable; `out_rob` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn privmon_garble_evaluate(
    circuit: *const PrivmonCircuit,
    trace: *const PrivmonTrace,
    formula: *const PrivmonFormula,
    kappa_bits: u32,
    cycles: usize,
    seed: *const u64,
    out_rob: *mut i64,
) -> PrivmonStatus {
    guard(|| {
        let c = borrow(circuit, "circuit")?;
        let t = borrow(trace, "trace")?;
        let f = borrow(formula, "formula")?;
        let slot = out(out_rob, "out_rob")?;
        let kappa = Kappa::from_bits(kappa_bits).ok_or_else(|| {
            Failure::invalid(format!("kappa must be 128 or 256, got {kappa_bits}"))
        })?;
        let p = c.0.params();
        let mut params = SessionParams::new(p.n, p.m, width(p.w)?, kappa);
        if cycles > 0 {
            params = params.with_cycles(cycles);
        }
        let (g, e) = run_loopback(params, &f.enc, &t.0, &c.0, seed.as_ref().copied())?;
        if g.rob != e.rob {
            return Err(Failure(
                PrivmonStatus::Protocol,
                "parties disagree on the result".into(),
            ));
        }
        *slot = e.rob.0;
        Ok(())
    })
}
