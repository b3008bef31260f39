use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::thread;

use privmon::circuit::{build_monitor, worst_case_cycles, Netlist};
use privmon::gen::{random_formula, random_trace, Pools};
use privmon::mpc::Kappa;
use privmon::protocol::{
    negotiate, read_frame, run_evaluator, run_garbler, write_frame, MsgType, ProtocolError, Reason,
    Role, SessionParams, SessionReport,
};
use privmon::robustness::{dp_taliro, Trace};
use privmon::stl::{encode, parse_formula, FormulaEncoding};
use privmon::word::{Rob, Width};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn w32() -> Width {
    Width::new(32).unwrap()
}

fn table2() -> Trace {
    Trace::new(vec![0, 5, 7, 10], vec![3, 11, -2, -3], w32()).unwrap()
}

fn example_enc(m: usize) -> FormulaEncoding {
    let f = parse_formula("(x >= 0) U[4,9) !(x >= 10)").unwrap();
    encode(&f, m, w32()).unwrap()
}

type Outcome = Result<SessionReport, ProtocolError>;

fn pair() -> (TcpStream, TcpStream) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let client = TcpStream::connect(listener.local_addr().unwrap()).unwrap();
    let (server, _) = listener.accept().unwrap();
    server.set_nodelay(true).unwrap();
    client.set_nodelay(true).unwrap();
    (server, client)
}

fn session(
    gp: SessionParams,
    ep: SessionParams,
    enc: &FormulaEncoding,
    trace: &Trace,
    seed: u64,
) -> (Outcome, Outcome) {
    let (mut server, mut client) = pair();
    let gnet = build_monitor(gp.n, gp.m, gp.width).unwrap();
    let enet = build_monitor(ep.n, ep.m, ep.width).unwrap();
    let enc = enc.clone();
    let g = thread::spawn(move || {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        run_garbler(&mut server, gp, &enc, &gnet, &mut rng)
    });
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xe);
    let e = run_evaluator(&mut client, ep, trace, &enet, &mut rng);
    (g.join().unwrap(), e)
}

#[test]
fn worked_example_both_sides_agree() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K128);
    let (g, e) = session(p, p, &example_enc(4), &table2(), 1);
    let (g, e) = (g.unwrap(), e.unwrap());
    assert_eq!(g.rob, Rob(3));
    assert_eq!(e.rob, Rob(3));
    assert_eq!(g.bytes_sent, e.bytes_received);
    assert_eq!(e.bytes_sent, g.bytes_received);
}

#[test]
fn kappa_256_session() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K256);
    let (g, e) = session(p, p, &example_enc(4), &table2(), 2);
    assert_eq!(g.unwrap().rob, Rob(3));
    assert_eq!(e.unwrap().rob, Rob(3));
}

#[test]
fn random_sessions_match_cleartext() {
    let pools = Pools::standard();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let p = SessionParams::new(4, 5, w32(), Kappa::K128);
    for k in 0..50 {
        let (_, f) = random_formula(&mut rng, 3, &pools).unwrap();
        let enc = encode(&f, 5, w32()).unwrap();
        let len = rng.gen_range(1..=4);
        let trace = random_trace(&mut rng, len, w32());
        let want = dp_taliro(&trace, &enc).unwrap();
        let (g, e) = session(p, p, &enc, &trace, 100 + k);
        assert_eq!(g.unwrap().rob, want, "session {k}");
        assert_eq!(e.unwrap().rob, want, "session {k}");
    }
}

#[test]
fn short_trace_is_padded() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K128);
    let short = table2().prefix(2).unwrap();
    let want = dp_taliro(&short, &example_enc(4)).unwrap();
    let (g, e) = session(p, p, &example_enc(4), &short, 4);
    assert_eq!(g.unwrap().rob, want);
    assert_eq!(e.unwrap().rob, want);
}

fn assert_negotiate_fail(o: Outcome, reason: Reason) {
    match o {
        Err(ProtocolError::Negotiate(r)) => assert_eq!(r, reason),
        other => panic!("expected rejection {reason:?}, got {other:?}"),
    }
}

#[test]
fn mismatched_n_rejected_on_both_sides() {
    let gp = SessionParams::new(4, 4, w32(), Kappa::K128);
    let ep = SessionParams::new(3, 4, w32(), Kappa::K128);
    let (g, e) = session(gp, ep, &example_enc(4), &table2().prefix(3).unwrap(), 5);
    assert_negotiate_fail(g, Reason::TraceCapacity);
    assert_negotiate_fail(e, Reason::TraceCapacity);
}

#[test]
fn mismatched_kappa_rejected() {
    let gp = SessionParams::new(4, 4, w32(), Kappa::K128);
    let ep = SessionParams::new(4, 4, w32(), Kappa::K256);
    let (g, e) = session(gp, ep, &example_enc(4), &table2(), 6);
    assert_negotiate_fail(g, Reason::Kappa);
    assert_negotiate_fail(e, Reason::Kappa);
}

#[test]
fn too_few_cycles_rejected() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K128);
    let short = p.with_cycles(worst_case_cycles(4, 4) - 1);
    // garbler proposes too few
    let (g, e) = session(short, short, &example_enc(4), &table2(), 7);
    assert_negotiate_fail(g, Reason::TooFewCycles);
    assert_negotiate_fail(e, Reason::TooFewCycles);

    // a peer that skips its own check still gets rejected
    let (mut server, mut client) = pair();
    let rogue = thread::spawn(move || {
        read_frame(&mut server).unwrap();
        write_frame(&mut server, MsgType::Params, &short.to_bytes()).unwrap();
        read_frame(&mut server).unwrap()
    });
    assert_negotiate_fail(
        negotiate(&mut client, short, Role::Evaluator).map(|_| unreachable!()),
        Reason::TooFewCycles,
    );
    let (ty, ack) = rogue.join().unwrap();
    assert_eq!(ty, MsgType::ParamsAck);
    assert_eq!(ack, [Reason::TooFewCycles as u8]);
}

#[test]
fn out_of_order_frame_aborts_evaluator() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K128);
    let net = build_monitor(4, 4, w32()).unwrap();
    let (mut server, mut client) = pair();
    let rogue = thread::spawn(move || {
        negotiate(&mut server, p, Role::Garbler).unwrap();
        // skip OT entirely
        write_frame(&mut server, MsgType::CycleTables, &[0; 4]).unwrap();
        server.flush().unwrap();
        read_frame(&mut server).unwrap()
    });
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let e = run_evaluator(&mut client, p, &table2(), &net, &mut rng);
    assert!(matches!(
        e,
        Err(ProtocolError::UnexpectedFrame {
            expected: MsgType::Ot1,
            got: MsgType::CycleTables
        })
    ));
    let (ty, payload) = rogue.join().unwrap();
    assert_eq!(ty, MsgType::Error);
    assert_eq!(payload[0], Reason::OutOfOrder as u8);
}

#[test]
fn tampered_tables_abort_both_sides() {
    let p = SessionParams::new(2, 3, w32(), Kappa::K128);
    let net = build_monitor(2, 3, w32()).unwrap();
    let enc = encode(&parse_formula("G[0,5) x >= 0").unwrap(), 3, w32()).unwrap();
    let trace = table2().prefix(2).unwrap();

    // a relay that flips a byte in every row of each cycle's first table
    let (mut g_end, mut relay_g) = pair();
    let (mut relay_e, mut e_end) = pair();
    let gnet = net.clone();
    let g = thread::spawn(move || {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        run_garbler(&mut g_end, p, &enc, &gnet, &mut rng)
    });
    let mut up = relay_e.try_clone().unwrap();
    let mut down = relay_g.try_clone().unwrap();
    let to_g = thread::spawn(move || {
        while let Ok((ty, payload)) = read_frame(&mut up) {
            if write_frame(&mut down, ty, &payload).is_err() {
                break;
            }
        }
    });
    let to_e = thread::spawn(move || {
        while let Ok((ty, mut payload)) = read_frame(&mut relay_g) {
            if ty == MsgType::CycleTables && payload.len() > 4 {
                payload[4] ^= 1;
                payload[20] ^= 1;
                payload[36] ^= 1;
                payload[52] ^= 1;
            }
            if write_frame(&mut relay_e, ty, &payload).is_err() {
                break;
            }
        }
        let _ = relay_e.shutdown(std::net::Shutdown::Both);
    });
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let e = run_evaluator(&mut e_end, p, &trace, &net, &mut rng);
    assert!(
        matches!(
            e,
            Err(ProtocolError::Mpc(privmon::mpc::MpcError::Integrity { .. }))
        ),
        "{e:?}"
    );
    drop(e_end);
    let g = g.join().unwrap();
    assert!(
        g.is_err(),
        "garbler must not return a result after an abort"
    );
    let _ = to_g.join();
    let _ = to_e.join();
}

#[test]
fn evaluator_buffer_independent_of_cycles() {
    let base = SessionParams::new(4, 4, w32(), Kappa::K128);
    let c = base.cycles;
    let mut peaks = Vec::new();
    for cycles in [c, 2 * c] {
        let p = base.with_cycles(cycles);
        let (g, e) = session(p, p, &example_enc(4), &table2(), 12);
        assert_eq!(g.unwrap().rob, Rob(3));
        let e = e.unwrap();
        assert_eq!(e.rob, Rob(3));
        peaks.push((e.peak_table_buffer, e.peak_frame_buffer));
    }
    assert_eq!(peaks[0], peaks[1]);
}

#[test]
fn netlist_must_match_params() {
    let p = SessionParams::new(4, 4, w32(), Kappa::K128);
    let other: Netlist = build_monitor(3, 4, w32()).unwrap();
    let (_, mut client) = pair();
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    assert!(matches!(
        run_evaluator(
            &mut client,
            p,
            &table2().prefix(3).unwrap(),
            &other,
            &mut rng
        ),
        Err(ProtocolError::NetlistMismatch)
    ));
}
