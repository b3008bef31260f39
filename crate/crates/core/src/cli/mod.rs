//! The `privmon` command line.
//!
//! Exit codes: 0 success, 2 validation error, 3 protocol error, 4 I/O error.

mod bench;

pub use bench::{run_bench, BenchConfig, BenchRecord};

use std::io::Write;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::circuit::{build_monitor, Netlist, SimMode};
use crate::gen::{random_formula, random_trace, Pools};
use crate::mpc::Kappa;
use crate::protocol::{run_evaluator, run_garbler, ProtocolError, SessionParams};
use crate::robustness::{dp_taliro, Trace};
use crate::stl::{encode, parse_formula, FormulaEncoding};
use crate::word::{Rob, Width};

#[derive(Debug, Parser)]
#[command(name = "privmon", version, about = "Private STL robustness monitoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SessionArgs {
    /// Trace capacity N.
    #[arg(long)]
    pub n: usize,
    /// Formula node capacity M.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 32)]
    pub width: u32,
    /// Label length in bits, 128 or 256.
    #[arg(long, default_value_t = 128)]
    pub kappa: u32,
    /// Fixed cycle count; defaults to the worst case for N and M.
    #[arg(long)]
    pub cycles: Option<usize>,
    /// Seed the party's randomness. Reproducible and therefore insecure.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Trace,
    Formula,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cleartext robustness of a trace against a formula.
    Monitor {
        #[arg(long)]
        trace: PathBuf,
        /// Formula text, or `@path` to read it from a file.
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 32)]
        width: u32,
    },
    /// Build a monitor netlist and print its statistics.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 32)]
        width: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a netlist in the clear.
    Sim {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        formula: String,
        /// Fixed cycle count; defaults to the netlist's.
        #[arg(long)]
        cycles: Option<usize>,
    },
    /// Verifier role: listen, then garble the formula's monitor.
    Garble {
        #[arg(long)]
        listen: String,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Designer role: connect, then evaluate on the trace.
    Evaluate {
        #[arg(long)]
        connect: String,
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Random trace (CSV) or template formula (text).
    Gen {
        kind: GenKind,
        /// Trace length.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Formula depth, 3 or 4.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        width: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Loopback protocol sweep; one CSV row per run.
    Bench {
        /// Trace capacities, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        ns: Vec<usize>,
        /// Formula depths, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        depths: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 128)]
        kappa: u32,
        #[arg(long, default_value_t = 32)]
        width: u32,
        /// Cycles as a multiple of the worst case.
        #[arg(long, default_value_t = 1)]
        cycle_factor: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Protocol(ProtocolError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Protocol(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }

    fn io(context: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.to_string(),
            source,
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Io(source) => CliError::io("session transport", source),
            ProtocolError::Circuit(e) => CliError::invalid(e),
            ProtocolError::NetlistMismatch => CliError::invalid(e),
            e => CliError::Protocol(e),
        }
    }
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PRIVMON_LOG", "warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn width(bits: u32) -> Result<Width, CliError> {
    Width::new(bits).map_err(CliError::invalid)
}

fn kappa(bits: u32) -> Result<Kappa, CliError> {
    Kappa::from_bits(bits)
        .ok_or_else(|| CliError::Validation(format!("kappa must be 128 or 256, got {bits}")))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

fn load_trace(path: &Path, w: Width) -> Result<Trace, CliError> {
    Trace::from_csv(read_text(path)?.as_bytes(), w)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn formula_text(arg: &str) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => read_text(Path::new(path)),
        None => Ok(arg.to_string()),
    }
}

fn load_encoding(arg: &str, m: usize, w: Width) -> Result<FormulaEncoding, CliError> {
    let f = parse_formula(formula_text(arg)?.trim()).map_err(CliError::invalid)?;
    encode(&f, m, w).map_err(CliError::invalid)
}

fn write_out(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p.display(), e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("stdout", e)),
    }
}

fn print_rob(out: &mut dyn Write, w: Width, rob: Rob) -> Result<(), CliError> {
    writeln!(out, "{} {}", w.display(rob), rob.verdict()).map_err(|e| CliError::io("stdout", e))
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn session_params(a: &SessionArgs) -> Result<(SessionParams, Netlist), CliError> {
    let w = width(a.width)?;
    let net = build_monitor(a.n, a.m, w).map_err(CliError::invalid)?;
    let mut p = SessionParams::new(a.n, a.m, w, kappa(a.kappa)?);
    if let Some(c) = a.cycles {
        p = p.with_cycles(c);
    }
    Ok((p, net))
}

/// Connecting side retries while the listener comes up.
fn connect(addr: &str) -> Result<TcpStream, CliError> {
    let addrs: Vec<SocketAddr> = addr
        .to_socket_addrs()
        .map_err(|e| CliError::io(addr, e))?
        .collect();
    let deadline = Instant::now() + Duration::from_secs(30);
    loop {
        match TcpStream::connect(&addrs[..]) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() >= deadline => return Err(CliError::io(addr, e)),
            Err(_) => std::thread::sleep(Duration::from_millis(50)),
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Monitor {
            trace,
            formula,
            width: bits,
        } => {
            let w = width(bits)?;
            let trace = load_trace(&trace, w)?;
            let f = parse_formula(formula_text(&formula)?.trim()).map_err(CliError::invalid)?;
            let enc = encode(&f, f.node_count(), w).map_err(CliError::invalid)?;
            let rob = dp_taliro(&trace, &enc).map_err(CliError::invalid)?;
            print_rob(out, w, rob)
        }
        Command::Synth {
            n,
            m,
            width: bits,
            out: path,
        } => {
            let net = build_monitor(n, m, width(bits)?).map_err(CliError::invalid)?;
            if let Some(p) = &path {
                std::fs::write(p, net.to_text()).map_err(|e| CliError::io(p.display(), e))?;
            }
            let s = net.stats();
            writeln!(
                out,
                "n={n} m={m} w={bits} gates={} and={} xor={} not={} const={} dff={} wires={} cycles={}",
                s.total,
                s.and,
                s.xor,
                s.not,
                s.constant,
                s.dff,
                s.wires,
                net.params().cycles
            )
            .map_err(|e| CliError::io("stdout", e))
        }
        Command::Sim {
            netlist,
            trace,
            formula,
            cycles,
        } => {
            let net = Netlist::from_text(&read_text(&netlist)?)
                .map_err(|e| CliError::Validation(format!("{}: {e}", netlist.display())))?;
            let w = width(net.params().w)?;
            let trace = load_trace(&trace, w)?;
            let enc = load_encoding(&formula, net.params().m, w)?;
            let run = net
                .run_monitor(&trace, &enc, SimMode::Fixed, cycles)
                .map_err(CliError::invalid)?;
            print_rob(out, w, run.rob)
        }
        Command::Garble {
            listen,
            formula,
            session,
        } => {
            let (params, net) = session_params(&session)?;
            let enc = load_encoding(&formula, session.m, params.width)?;
            let listener = TcpListener::bind(&listen).map_err(|e| CliError::io(&listen, e))?;
            log::info!("garbler listening on {}", listen);
            let (mut stream, peer) = listener.accept().map_err(|e| CliError::io(&listen, e))?;
            stream
                .set_nodelay(true)
                .map_err(|e| CliError::io(peer, e))?;
            let report = run_garbler(&mut stream, params, &enc, &net, &mut rng(session.seed))?;
            log::info!(
                "sent {} bytes, received {}",
                report.bytes_sent,
                report.bytes_received
            );
            print_rob(out, params.width, report.rob)
        }
        Command::Evaluate {
            connect: addr,
            trace,
            session,
        } => {
            let (params, net) = session_params(&session)?;
            let trace = load_trace(&trace, params.width)?;
            let mut stream = connect(&addr)?;
            stream
                .set_nodelay(true)
                .map_err(|e| CliError::io(&addr, e))?;
            let report = run_evaluator(&mut stream, params, &trace, &net, &mut rng(session.seed))?;
            log::info!(
                "peak table buffer {} bytes, received {}",
                report.peak_table_buffer,
                report.bytes_received
            );
            print_rob(out, params.width, report.rob)
        }
        Command::Gen {
            kind,
            n,
            depth,
            seed,
            width: bits,
            out: path,
        } => {
            let mut r = ChaCha20Rng::seed_from_u64(seed);
            let text = match kind {
                GenKind::Trace => {
                    if n == 0 {
                        return Err(CliError::Validation("trace length must be positive".into()));
                    }
                    random_trace(&mut r, n, width(bits)?).to_csv()
                }
                GenKind::Formula => {
                    let (_, f) = random_formula(&mut r, depth, &Pools::standard())
                        .ok_or_else(|| CliError::Validation("depth must be 3 or 4".into()))?;
                    format!("{f}\n")
                }
            };
            write_out(out, path.as_deref(), &text)
        }
        Command::Bench {
            ns,
            depths,
            reps,
            kappa: kbits,
            width: bits,
            cycle_factor,
            seed,
            out: path,
        } => {
            let cfg = BenchConfig {
                ns,
                depths,
                reps,
                kappa: kappa(kbits)?,
                width: width(bits)?,
                cycle_factor,
                seed,
            };
            let file = std::fs::File::create(&path).map_err(|e| CliError::io(path.display(), e))?;
            let rows = run_bench(&cfg, file).map_err(|e| CliError::io(path.display(), e))?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            writeln!(out, "{} runs, {} failed", rows.len(), failed)
                .map_err(|e| CliError::io("stdout", e))
        }
    }
}
