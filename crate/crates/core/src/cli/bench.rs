//! Loopback protocol sweep.
//!
//! CSV columns, in order: `n, depth, m, template, gates, and_gates, dffs,
//! cycles, garble_ms, evaluate_ms, total_ms, bytes, peak_buffer_bytes, rob,
//! expected, status`. `gates` counts gates plus flip-flops, `bytes` both
//! directions, `peak_buffer_bytes` the evaluator's largest held cycle
//! tables. `status` is `ok`, `mismatch` or the error text.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::circuit::{build_monitor, Netlist};
use crate::gen::{capacity_for_depth, random_formula, random_trace, Pools};
use crate::mpc::Kappa;
use crate::protocol::{run_loopback, SessionParams};
use crate::robustness::dp_taliro;
use crate::stl::encode;
use crate::word::Width;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub depths: Vec<usize>,
    pub reps: usize,
    pub kappa: Kappa,
    pub width: Width,
    pub cycle_factor: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub depth: usize,
    pub m: usize,
    pub template: String,
    pub gates: usize,
    pub and_gates: usize,
    pub dffs: usize,
    pub cycles: usize,
    pub garble_ms: f64,
    pub evaluate_ms: f64,
    pub total_ms: f64,
    pub bytes: u64,
    pub peak_buffer_bytes: usize,
    pub rob: i64,
    pub expected: i64,
    pub status: String,
}

/// Run every `(N, depth, rep)` combination and stream rows to `sink`.
/// Failed runs are recorded and the sweep continues.
pub fn run_bench<W: Write>(cfg: &BenchConfig, sink: W) -> io::Result<Vec<BenchRecord>> {
    let mut csv = csv::Writer::from_writer(sink);
    let mut nets: HashMap<(usize, usize), Netlist> = HashMap::new();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let pools = Pools::standard();
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        for &depth in &cfg.depths {
            for rep in 0..cfg.reps {
                let row = bench_one(cfg, &mut nets, &mut rng, &pools, n, depth);
                log::info!("n={n} depth={depth} rep={rep}: {}", row.status);
                csv.serialize(&row)?;
                csv.flush()?;
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn bench_one(
    cfg: &BenchConfig,
    nets: &mut HashMap<(usize, usize), Netlist>,
    rng: &mut ChaCha20Rng,
    pools: &Pools,
    n: usize,
    depth: usize,
) -> BenchRecord {
    let m = capacity_for_depth(depth);
    let mut row = BenchRecord {
        n,
        depth,
        m,
        template: String::new(),
        gates: 0,
        and_gates: 0,
        dffs: 0,
        cycles: 0,
        garble_ms: 0.0,
        evaluate_ms: 0.0,
        total_ms: 0.0,
        bytes: 0,
        peak_buffer_bytes: 0,
        rob: 0,
        expected: 0,
        status: String::new(),
    };
    let Some((template, formula)) = random_formula(rng, depth, pools) else {
        row.status = format!("no templates of depth {depth}");
        return row;
    };
    row.template = format!("{template:?}");
    if n == 0 {
        row.status = "N must be positive".into();
        return row;
    }
    let trace = random_trace(rng, n, cfg.width);
    let session_seed = rand::Rng::gen(rng);
    let net = match nets.get(&(n, m)) {
        Some(net) => net,
        None => match build_monitor(n, m, cfg.width) {
            Ok(net) => nets.entry((n, m)).or_insert(net),
            Err(e) => {
                row.status = e.to_string();
                return row;
            }
        },
    };
    let s = net.stats();
    row.gates = s.total;
    row.and_gates = s.and;
    row.dffs = s.dff;
    let params = SessionParams::new(n, m, cfg.width, cfg.kappa);
    let params = params.with_cycles(params.cycles * cfg.cycle_factor.max(1));
    row.cycles = params.cycles;
    let outcome = encode(&formula, m, cfg.width)
        .map_err(|e| e.to_string())
        .and_then(|enc| {
            let expected = dp_taliro(&trace, &enc).map_err(|e| e.to_string())?;
            let (g, e) = run_loopback(params, &enc, &trace, net, Some(session_seed))
                .map_err(|e| e.to_string())?;
            Ok((expected, g, e))
        });
    match outcome {
        Ok((expected, g, e)) => {
            row.garble_ms = g.compute_ms;
            row.evaluate_ms = e.compute_ms;
            row.total_ms = g.total_ms.max(e.total_ms);
            row.bytes = g.bytes_sent + g.bytes_received;
            row.peak_buffer_bytes = e.peak_table_buffer;
            row.rob = e.rob.0;
            row.expected = expected.0;
            row.status = if g.rob == e.rob && e.rob == expected {
                "ok".into()
            } else {
                "mismatch".into()
            };
        }
        Err(e) => row.status = e,
    }
    row
}
