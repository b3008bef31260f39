use std::io::{Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::thread;
use std::time::Instant;

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::frame::{expect_frame, write_frame, Metered, MsgType};
use super::{ProtocolError, Reason, SessionParams};
use crate::circuit::{Gate, Layout, Netlist};
use crate::mpc::{
    DecodeInfo, Evaluator, GarbledCycle, Garbler, GarblerInputs, Kappa, Label, OtChooser, OtSender,
};
use crate::robustness::Trace;
use crate::stl::FormulaEncoding;
use crate::word::Rob;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Garbler,
    Evaluator,
}

/// What one party observed in a completed session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub rob: Rob,
    pub params: SessionParams,
    pub bytes_sent: u64,
    pub bytes_received: u64,
    /// Largest cycle-table payload held at once; zero on the garbler.
    pub peak_table_buffer: usize,
    /// Largest frame buffer of any kind held at once.
    pub peak_frame_buffer: usize,
    pub and_count: usize,
    /// Time spent garbling or evaluating, excluding transport waits on the
    /// other role's work.
    pub compute_ms: f64,
    pub total_ms: f64,
}

/// Agree on public parameters. The evaluator opens with HELLO, the garbler
/// proposes, the evaluator accepts or rejects. Both sides check their own
/// proposal, so an invalid one is rejected whichever side holds it.
pub fn negotiate<S: Read + Write + ?Sized>(
    stream: &mut S,
    proposed: SessionParams,
    role: Role,
) -> Result<SessionParams, ProtocolError> {
    let mut buf = Vec::new();
    let peer_reason = |e: ProtocolError| match e {
        ProtocolError::Peer { code, .. } => match Reason::from_code(code) {
            Some(r) if r.is_negotiation() => ProtocolError::Negotiate(r),
            _ => ProtocolError::Peer {
                code,
                message: String::new(),
            },
        },
        e => e,
    };
    match role {
        Role::Evaluator => {
            write_frame(stream, MsgType::Hello, &[proposed.version])?;
            stream.flush()?;
            expect_frame(stream, MsgType::Params, &mut buf).map_err(peer_reason)?;
            let verdict = SessionParams::from_bytes(&buf).and_then(|theirs| {
                proposed.validate()?;
                theirs.validate()?;
                match proposed.mismatch(&theirs) {
                    Some(r) => Err(r),
                    None => Ok(theirs),
                }
            });
            let status = verdict.err().map_or(0, |r| r as u8);
            write_frame(stream, MsgType::ParamsAck, &[status])?;
            stream.flush()?;
            verdict.map_err(ProtocolError::Negotiate)
        }
        Role::Garbler => {
            expect_frame(stream, MsgType::Hello, &mut buf)?;
            let check = match buf.as_slice() {
                [v] if *v == proposed.version => proposed.validate(),
                [_] => Err(Reason::Version),
                _ => Err(Reason::Malformed),
            };
            if let Err(r) = check {
                send_error(stream, r, "handshake refused");
                return Err(ProtocolError::Negotiate(r));
            }
            write_frame(stream, MsgType::Params, &proposed.to_bytes())?;
            stream.flush()?;
            expect_frame(stream, MsgType::ParamsAck, &mut buf)?;
            match buf.as_slice() {
                [0] => Ok(proposed),
                [code] => Err(ProtocolError::Negotiate(
                    Reason::from_code(*code).unwrap_or(Reason::Malformed),
                )),
                _ => Err(ProtocolError::Malformed("PARAMS-ACK")),
            }
        }
    }
}

fn send_error<S: Write + ?Sized>(stream: &mut S, reason: Reason, message: &str) {
    let mut payload = vec![reason as u8];
    payload.extend_from_slice(message.as_bytes());
    // best effort: the session is already lost
    let _ = write_frame(stream, MsgType::Error, &payload).and_then(|_| Ok(stream.flush()?));
}

/// Tell the peer why we stop, unless it already knows.
fn abort<S: Write + ?Sized>(stream: &mut S, e: ProtocolError) -> ProtocolError {
    let peer_knows = matches!(
        e,
        ProtocolError::Io(_) | ProtocolError::Peer { .. } | ProtocolError::Negotiate(_)
    );
    if !peer_knows {
        send_error(stream, e.reason(), &e.to_string());
    }
    e
}

fn check_netlist(params: &SessionParams, net: &Netlist) -> Result<Layout, ProtocolError> {
    let p = net.params();
    if p.n != params.n || p.m != params.m || p.w != params.width.bits() {
        return Err(ProtocolError::NetlistMismatch);
    }
    Ok(net.layout()?)
}

fn const_count(net: &Netlist) -> usize {
    net.gates()
        .iter()
        .filter(|g| matches!(g, Gate::Const { .. }))
        .count()
}

fn labels_bytes(kappa: Kappa, labels: &[Label]) -> Vec<u8> {
    let kb = kappa.bytes();
    let mut out = vec![0u8; labels.len() * kb];
    for (l, chunk) in labels.iter().zip(out.chunks_exact_mut(kb)) {
        l.write(kappa, chunk);
    }
    out
}

fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (k, &b) in bits.iter().enumerate() {
        out[k / 8] |= (b as u8) << (k % 8);
    }
    out
}

fn unpack_bits(bytes: &[u8], count: usize) -> Option<Vec<bool>> {
    (bytes.len() == count.div_ceil(8)).then(|| {
        (0..count)
            .map(|k| bytes[k / 8] >> (k % 8) & 1 == 1)
            .collect()
    })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Verifier side. `enc` may have fewer nodes than `M`; it is padded.
pub fn run_garbler<S, R>(
    stream: &mut S,
    params: SessionParams,
    enc: &FormulaEncoding,
    netlist: &Netlist,
    rng: &mut R,
) -> Result<SessionReport, ProtocolError>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let mut s = Metered::new(stream);
    let start = Instant::now();
    let mut compute = 0.0;
    let result = garbler_session(&mut s, params, enc, netlist, rng, &mut compute);
    let (sent, received) = (s.sent, s.received);
    let rob = result.map_err(|e| abort(&mut s, e))?;
    Ok(SessionReport {
        rob,
        params,
        bytes_sent: sent,
        bytes_received: received,
        peak_table_buffer: 0,
        peak_frame_buffer: 0,
        and_count: netlist.and_count(),
        compute_ms: compute,
        total_ms: ms(start),
    })
}

fn garbler_session<S, R>(
    s: &mut S,
    params: SessionParams,
    enc: &FormulaEncoding,
    net: &Netlist,
    rng: &mut R,
    compute: &mut f64,
) -> Result<Rob, ProtocolError>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let layout = check_netlist(&params, net)?;
    let gbits = layout.formula_bits(enc)?;
    let params = negotiate(s, params, Role::Garbler)?;
    let kappa = params.kappa;
    let mut buf = Vec::new();

    let t = Instant::now();
    let mut garbler = Garbler::new(net, kappa, rng);
    let (sender, m1) = OtSender::new(rng);
    *compute += ms(t);
    write_frame(s, MsgType::Ot1, &m1)?;
    s.flush()?;
    expect_frame(s, MsgType::Ot2, &mut buf)?;
    let t = Instant::now();
    let m3 = sender.respond(kappa, &buf, &garbler.evaluator_pairs())?;
    *compute += ms(t);
    write_frame(s, MsgType::Ot3, &m3)?;

    let gin = garbler.garbler_inputs(&gbits)?;
    let mut payload = labels_bytes(kappa, &gin.inputs);
    payload.extend(labels_bytes(kappa, &gin.constants));
    payload.extend(labels_bytes(kappa, &gin.dff_init));
    write_frame(s, MsgType::GarblerInputs, &payload)?;

    for _ in 0..params.cycles {
        let t = Instant::now();
        let gc = garbler.garble_cycle();
        *compute += ms(t);
        payload.clear();
        payload.extend_from_slice(&gc.cycle.to_be_bytes());
        payload.extend_from_slice(&gc.tables);
        write_frame(s, MsgType::CycleTables, &payload)?;
    }
    let info = garbler.decode_info()?;
    write_frame(s, MsgType::DecodeInfo, &pack_bits(&info.colors))?;
    s.flush()?;
    log::debug!("garbler streamed {} cycles", params.cycles);

    expect_frame(s, MsgType::Output, &mut buf)?;
    let raw: [u8; 8] = buf
        .as_slice()
        .try_into()
        .map_err(|_| ProtocolError::Malformed("OUTPUT"))?;
    let rob = i64::from_be_bytes(raw);
    if !params.width.contains(rob) {
        return Err(ProtocolError::Malformed("OUTPUT"));
    }
    write_frame(s, MsgType::Close, &[])?;
    s.flush()?;
    Ok(Rob(rob))
}

/// Designer side. Shorter traces are padded to `N` rows.
pub fn run_evaluator<S, R>(
    stream: &mut S,
    params: SessionParams,
    trace: &Trace,
    netlist: &Netlist,
    rng: &mut R,
) -> Result<SessionReport, ProtocolError>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let mut s = Metered::new(stream);
    let start = Instant::now();
    let mut compute = 0.0;
    let mut peaks = (0, 0);
    let result = evaluator_session(
        &mut s,
        params,
        trace,
        netlist,
        rng,
        &mut compute,
        &mut peaks,
    );
    let (sent, received) = (s.sent, s.received);
    let rob = result.map_err(|e| abort(&mut s, e))?;
    Ok(SessionReport {
        rob,
        params,
        bytes_sent: sent,
        bytes_received: received,
        peak_table_buffer: peaks.0,
        peak_frame_buffer: peaks.1,
        and_count: netlist.and_count(),
        compute_ms: compute,
        total_ms: ms(start),
    })
}

fn evaluator_session<S, R>(
    s: &mut S,
    params: SessionParams,
    trace: &Trace,
    net: &Netlist,
    rng: &mut R,
    compute: &mut f64,
    peaks: &mut (usize, usize),
) -> Result<Rob, ProtocolError>
where
    S: Read + Write + ?Sized,
    R: RngCore + CryptoRng + ?Sized,
{
    let layout = check_netlist(&params, net)?;
    let ebits = layout.trace_bits(trace)?;
    let params = negotiate(s, params, Role::Evaluator)?;
    let kappa = params.kappa;
    let kb = kappa.bytes();
    let mut buf = Vec::new();

    expect_frame(s, MsgType::Ot1, &mut buf)?;
    let t = Instant::now();
    let (chooser, m2) = OtChooser::new(rng, &ebits, &buf)?;
    *compute += ms(t);
    write_frame(s, MsgType::Ot2, &m2)?;
    s.flush()?;
    expect_frame(s, MsgType::Ot3, &mut buf)?;
    let t = Instant::now();
    let mine = chooser.finish(kappa, &buf)?;
    *compute += ms(t);

    expect_frame(s, MsgType::GarblerInputs, &mut buf)?;
    let counts = [
        net.garbler_inputs().len(),
        const_count(net),
        net.dffs().len(),
    ];
    if buf.len() != counts.iter().sum::<usize>() * kb {
        return Err(ProtocolError::Malformed("GARBLER-INPUTS"));
    }
    let mut chunks = buf.chunks_exact(kb).map(|c| Label::read(kappa, c));
    let mut take = |k: usize| chunks.by_ref().take(k).collect::<Vec<_>>();
    let gin = GarblerInputs {
        inputs: take(counts[0]),
        constants: take(counts[1]),
        dff_init: take(counts[2]),
    };
    let mut evaluator = Evaluator::new(net, kappa, &gin, &mine)?;

    let mut gc = GarbledCycle {
        cycle: 0,
        tables: Vec::new(),
    };
    for _ in 0..params.cycles {
        expect_frame(s, MsgType::CycleTables, &mut buf)?;
        if buf.len() < 4 {
            return Err(ProtocolError::Malformed("CYCLE-TABLES"));
        }
        peaks.1 = peaks.1.max(buf.capacity());
        gc.cycle = u32::from_be_bytes(buf[..4].try_into().unwrap());
        gc.tables.clear();
        gc.tables.extend_from_slice(&buf[4..]);
        let t = Instant::now();
        evaluator.eval_cycle(&gc)?;
        *compute += ms(t);
    }
    peaks.0 = evaluator.peak_buffer();
    peaks.1 = peaks.1.max(buf.capacity()).max(gc.tables.capacity());

    expect_frame(s, MsgType::DecodeInfo, &mut buf)?;
    let labels = evaluator.output_labels()?;
    let colors = unpack_bits(&buf, labels.len()).ok_or(ProtocolError::Malformed("DECODE-INFO"))?;
    let bits = DecodeInfo { colors }.decode(labels)?;
    let (done, value) = bits.split_last().ok_or(ProtocolError::NotDone)?;
    if !done {
        return Err(ProtocolError::NotDone);
    }
    let rob = layout.decode_output(value);
    write_frame(s, MsgType::Output, &rob.0.to_be_bytes())?;
    s.flush()?;
    expect_frame(s, MsgType::Close, &mut buf)?;
    Ok(rob)
}

/// Both roles in one process over a loopback TCP connection, the garbler on
/// a scoped thread. `seed` makes both parties' randomness reproducible.
pub fn run_loopback(
    params: SessionParams,
    enc: &FormulaEncoding,
    trace: &Trace,
    netlist: &Netlist,
    seed: Option<u64>,
) -> Result<(SessionReport, SessionReport), ProtocolError> {
    let rng = |salt: u64| match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s ^ salt),
        None => ChaCha20Rng::from_entropy(),
    };
    let listener = TcpListener::bind(("127.0.0.1", 0))?;
    let mut client = TcpStream::connect(listener.local_addr()?)?;
    let (mut server, _) = listener.accept()?;
    server.set_nodelay(true)?;
    client.set_nodelay(true)?;
    thread::scope(|scope| {
        let g = scope.spawn(|| {
            let r = run_garbler(&mut server, params, enc, netlist, &mut rng(0x6761));
            // unblock the evaluator if the garbler stopped early
            let _ = server.shutdown(Shutdown::Both);
            r
        });
        let e = run_evaluator(&mut client, params, trace, netlist, &mut rng(0x6576));
        if e.is_err() {
            let _ = client.shutdown(Shutdown::Both);
        }
        let g = g.join().expect("garbler thread panicked");
        // report the root cause, not its echo on the other side
        let echo =
            |e: &ProtocolError| matches!(e, ProtocolError::Peer { .. } | ProtocolError::Io(_));
        match (g, e) {
            (Ok(g), Ok(e)) => Ok((g, e)),
            (Err(g), Err(e)) if echo(&e) && !echo(&g) => Err(g),
            (_, Err(e)) | (Err(e), _) => Err(e),
        }
    })
}
