//! Gate-level compilation of the monitor and its cleartext simulation.

mod builder;
mod monitor;
mod netlist;

pub use builder::{Bit, Builder, DffRef, Word, ONE, ZERO};
pub use monitor::{build_monitor, worst_case_cycles, CircuitError, Layout};
pub use netlist::{Dff, Gate, Netlist, NetlistError, Params, SimError, SimMode, SimResult, Stats};

use crate::robustness::Trace;
use crate::stl::FormulaEncoding;
use crate::word::{Rob, Width};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonitorRunError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Outcome of a cleartext run of a monitor netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonitorRun {
    pub rob: Rob,
    pub cycles_used: usize,
}

impl Netlist {
    /// Input layout of a monitor netlist.
    pub fn layout(&self) -> Result<Layout, CircuitError> {
        let p = self.params();
        let width = Width::new(p.w).map_err(|_| CircuitError::WidthMismatch {
            expected: p.w,
            got: p.w,
        })?;
        Layout::new(p.n, p.m, width)
    }

    /// Simulate a monitor netlist on a trace and encoding. `max_cycles`
    /// defaults to the netlist's fixed cycle count.
    pub fn run_monitor(
        &self,
        trace: &Trace,
        enc: &FormulaEncoding,
        mode: SimMode,
        max_cycles: Option<usize>,
    ) -> Result<MonitorRun, MonitorRunError> {
        let layout = self.layout()?;
        let g = layout.formula_bits(enc)?;
        let e = layout.trace_bits(trace)?;
        let r = self.simulate(&g, &e, max_cycles.unwrap_or(self.params().cycles), mode)?;
        Ok(MonitorRun {
            rob: layout.decode_output(&r.outputs),
            cycles_used: r.cycles_used,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::dp_taliro;
    use crate::stl::{encode, parse_formula};

    fn w32() -> Width {
        Width::new(32).unwrap()
    }

    fn table2() -> Trace {
        Trace::new(vec![0, 5, 7, 10], vec![3, 11, -2, -3], w32()).unwrap()
    }

    #[test]
    fn worked_example_on_circuit() {
        let net = build_monitor(4, 4, w32()).unwrap();
        let f = parse_formula("(x >= 0) U[4,9) !(x >= 10)").unwrap();
        let enc = encode(&f, 4, w32()).unwrap();
        let early = net
            .run_monitor(&table2(), &enc, SimMode::UntilDone, None)
            .unwrap();
        assert_eq!(early.rob, Rob(3));
        assert!(early.cycles_used <= worst_case_cycles(4, 4));
        let fixed = net
            .run_monitor(&table2(), &enc, SimMode::Fixed, None)
            .unwrap();
        assert_eq!(fixed.rob, Rob(3));
        assert_eq!(fixed.cycles_used, worst_case_cycles(4, 4));
    }

    #[test]
    fn true_on_minimal_circuit() {
        let w = Width::new(8).unwrap();
        let net = build_monitor(1, 1, w).unwrap();
        let t = Trace::new(vec![0], vec![5], w).unwrap();
        let enc = encode(&crate::stl::Formula::True, 1, w).unwrap();
        let r = net.run_monitor(&t, &enc, SimMode::UntilDone, None).unwrap();
        assert_eq!(r.rob, w.rob_pinf());
        assert_eq!(r.cycles_used, 2);
        assert_eq!(worst_case_cycles(1, 1), 2);
    }

    #[test]
    fn short_trace_is_padded() {
        let net = build_monitor(4, 4, w32()).unwrap();
        for text in [
            "(x >= 0) U[4,9) !(x >= 10)",
            "G[0,inf) x > -5",
            "F[1,inf) x > 2",
            "x > 0 U[0,inf) x > 10",
        ] {
            let f = parse_formula(text).unwrap();
            let enc = encode(&f, 4, w32()).unwrap();
            for len in 1..=4 {
                let t = table2().prefix(len).unwrap();
                let r = net.run_monitor(&t, &enc, SimMode::Fixed, None).unwrap();
                assert_eq!(r.rob, dp_taliro(&t, &enc).unwrap(), "{text} len {len}");
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            build_monitor(0, 4, w32()),
            Err(CircuitError::ZeroSamples)
        ));
        assert!(matches!(
            build_monitor(4, 0, w32()),
            Err(CircuitError::ZeroNodes)
        ));
        assert!(matches!(
            build_monitor(5, 4, Width::new(4).unwrap()),
            Err(CircuitError::Overflow { .. })
        ));
    }

    #[test]
    fn capacity_errors() {
        let net = build_monitor(2, 3, w32()).unwrap();
        let f = parse_formula("(x >= 0) U[4,9) !(x >= 10)").unwrap();
        let enc = encode(&f, 4, w32()).unwrap();
        assert!(net
            .run_monitor(&table2().prefix(2).unwrap(), &enc, SimMode::Fixed, None)
            .is_err());
        let small = encode(&parse_formula("x > 0").unwrap(), 3, w32()).unwrap();
        assert!(matches!(
            net.run_monitor(&table2(), &small, SimMode::Fixed, None),
            Err(MonitorRunError::Circuit(CircuitError::TraceTooLong { .. }))
        ));
    }

    #[test]
    fn cycle_bound_is_monotone() {
        for n in 1..20 {
            for m in 1..10 {
                assert!(worst_case_cycles(n + 1, m) >= worst_case_cycles(n, m));
                assert!(worst_case_cycles(n, m + 1) >= worst_case_cycles(n, m));
            }
        }
        assert_eq!(worst_case_cycles(10, 8), 513);
    }

    #[test]
    fn removing_flip_flops_leaves_acyclic_graph() {
        // from_parts rejects loops, and a flip-flop's q is a graph source,
        // so a successful text round trip witnesses the property
        let net = build_monitor(3, 3, Width::new(8).unwrap()).unwrap();
        assert_eq!(Netlist::from_text(&net.to_text()).unwrap(), net);
    }
}
