//! Sequential netlists: storage, validation, the text format and the
//! cycle-accurate cleartext simulator.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

/// Public sizing of a monitor circuit. `cycles` is the fixed cycle count the
/// circuit is run for under MPC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub w: u32,
    pub cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    And { a: u32, b: u32, y: u32 },
    Xor { a: u32, b: u32, y: u32 },
    Not { a: u32, y: u32 },
    Const { value: bool, y: u32 },
}

impl Gate {
    pub fn output(&self) -> u32 {
        match *self {
            Gate::And { y, .. }
            | Gate::Xor { y, .. }
            | Gate::Not { y, .. }
            | Gate::Const { y, .. } => y,
        }
    }

    fn inputs(&self) -> impl Iterator<Item = u32> {
        let (a, b) = match *self {
            Gate::And { a, b, .. } | Gate::Xor { a, b, .. } => (Some(a), Some(b)),
            Gate::Not { a, .. } => (Some(a), None),
            Gate::Const { .. } => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// Flip-flop: `q` holds `init` in cycle 0 and the previous cycle's `d` after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dff {
    pub d: u32,
    pub q: u32,
    pub init: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("wire {0} has more than one driver")]
    MultipleDrivers(u32),
    #[error("wire {0} is used but never driven")]
    Undriven(u32),
    #[error("wire ids are not dense: {count} drivers but highest id {max}")]
    Sparse { count: usize, max: u32 },
    #[error("combinational loop through {0} gates")]
    Cycle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("max_cycles must be at least 1")]
    ZeroCycles,
    #[error("expected {expected} {group} input bits, got {got}")]
    InputLength {
        group: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("done flag not raised within {0} cycles")]
    NotDone(usize),
    #[error("netlist has no outputs")]
    NoOutputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub total: usize,
    pub and: usize,
    pub xor: usize,
    pub not: usize,
    pub constant: usize,
    pub dff: usize,
    pub wires: usize,
}

/// How long `simulate` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Stop at the first cycle in which the done output is high.
    UntilDone,
    /// Run exactly `max_cycles` and sample outputs in the final cycle.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    /// Output wire values in the sampled cycle, done flag excluded.
    pub outputs: Vec<bool>,
    pub done: bool,
    pub cycles_used: usize,
}

/// Gates are stored in a topological order of the combinational graph with
/// flip-flop outputs, inputs and constants as sources. The last output wire
/// is the done flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    params: Params,
    num_wires: u32,
    garbler_inputs: Vec<u32>,
    evaluator_inputs: Vec<u32>,
    gates: Vec<Gate>,
    dffs: Vec<Dff>,
    outputs: Vec<u32>,
}

impl Netlist {
    /// Validate drivers and order gates topologically. Gate order already
    /// topological is preserved.
    pub fn from_parts(
        params: Params,
        num_wires: u32,
        garbler_inputs: Vec<u32>,
        evaluator_inputs: Vec<u32>,
        gates: Vec<Gate>,
        dffs: Vec<Dff>,
        outputs: Vec<u32>,
    ) -> Result<Self, NetlistError> {
        const SOURCE: usize = usize::MAX - 1;
        const NONE: usize = usize::MAX;
        let mut driver = vec![NONE; num_wires as usize];
        let mut claim = |w: u32, by: usize| -> Result<(), NetlistError> {
            let slot = driver
                .get_mut(w as usize)
                .ok_or(NetlistError::Undriven(w))?;
            if *slot != NONE {
                return Err(NetlistError::MultipleDrivers(w));
            }
            *slot = by;
            Ok(())
        };
        for &w in garbler_inputs.iter().chain(&evaluator_inputs) {
            claim(w, SOURCE)?;
        }
        for f in &dffs {
            claim(f.q, SOURCE)?;
        }
        for (k, g) in gates.iter().enumerate() {
            claim(g.output(), k)?;
        }
        if let Some(w) = driver.iter().position(|&d| d == NONE) {
            return Err(NetlistError::Undriven(w as u32));
        }
        let used = gates
            .iter()
            .flat_map(|g| g.inputs())
            .chain(dffs.iter().map(|f| f.d))
            .chain(outputs.iter().copied());
        for w in used {
            if w >= num_wires {
                return Err(NetlistError::Undriven(w));
            }
        }

        // Kahn's algorithm, smallest original index first
        let mut pending = vec![0usize; gates.len()];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
        for (k, g) in gates.iter().enumerate() {
            for w in g.inputs() {
                let d = driver[w as usize];
                if d != SOURCE {
                    pending[k] += 1;
                    users[d].push(k);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..gates.len())
            .filter(|&k| pending[k] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(gates.len());
        while let Some(Reverse(k)) = ready.pop() {
            order.push(gates[k]);
            for &u in &users[k] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(Reverse(u));
                }
            }
        }
        if order.len() != gates.len() {
            return Err(NetlistError::Cycle(gates.len() - order.len()));
        }
        Ok(Netlist {
            params,
            num_wires,
            garbler_inputs,
            evaluator_inputs,
            gates: order,
            dffs,
            outputs,
        })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn num_wires(&self) -> u32 {
        self.num_wires
    }

    pub fn garbler_inputs(&self) -> &[u32] {
        &self.garbler_inputs
    }

    pub fn evaluator_inputs(&self) -> &[u32] {
        &self.evaluator_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn dffs(&self) -> &[Dff] {
        &self.dffs
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn and_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::And { .. }))
            .count()
    }

    pub fn stats(&self) -> Stats {
        let mut s = Stats {
            dff: self.dffs.len(),
            wires: self.num_wires as usize,
            ..Stats::default()
        };
        for g in &self.gates {
            match g {
                Gate::And { .. } => s.and += 1,
                Gate::Xor { .. } => s.xor += 1,
                Gate::Not { .. } => s.not += 1,
                Gate::Const { .. } => s.constant += 1,
            }
        }
        s.total = self.gates.len() + self.dffs.len();
        s
    }

    fn check_inputs(&self, g: &[bool], e: &[bool]) -> Result<(), SimError> {
        if g.len() != self.garbler_inputs.len() {
            return Err(SimError::InputLength {
                group: "garbler",
                expected: self.garbler_inputs.len(),
                got: g.len(),
            });
        }
        if e.len() != self.evaluator_inputs.len() {
            return Err(SimError::InputLength {
                group: "evaluator",
                expected: self.evaluator_inputs.len(),
                got: e.len(),
            });
        }
        Ok(())
    }

    fn settle(&self, v: &mut [bool]) {
        for g in &self.gates {
            match *g {
                Gate::And { a, b, y } => v[y as usize] = v[a as usize] & v[b as usize],
                Gate::Xor { a, b, y } => v[y as usize] = v[a as usize] ^ v[b as usize],
                Gate::Not { a, y } => v[y as usize] = !v[a as usize],
                Gate::Const { value, y } => v[y as usize] = value,
            }
        }
    }

    fn load(&self, g: &[bool], e: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.num_wires as usize];
        for (&w, &b) in self
            .garbler_inputs
            .iter()
            .zip(g)
            .chain(self.evaluator_inputs.iter().zip(e))
        {
            v[w as usize] = b;
        }
        for f in &self.dffs {
            v[f.q as usize] = f.init;
        }
        v
    }

    /// All output wires after one cycle from the initial state.
    pub fn eval_combinational(&self, g: &[bool], e: &[bool]) -> Vec<bool> {
        let mut v = self.load(g, e);
        self.settle(&mut v);
        self.outputs.iter().map(|&w| v[w as usize]).collect()
    }

    pub fn simulate(
        &self,
        g: &[bool],
        e: &[bool],
        max_cycles: usize,
        mode: SimMode,
    ) -> Result<SimResult, SimError> {
        if max_cycles == 0 {
            return Err(SimError::ZeroCycles);
        }
        self.check_inputs(g, e)?;
        let (&done_wire, value_wires) = self.outputs.split_last().ok_or(SimError::NoOutputs)?;
        let mut v = self.load(g, e);
        let mut next = vec![false; self.dffs.len()];
        for cycle in 1..=max_cycles {
            self.settle(&mut v);
            let done = v[done_wire as usize];
            if (mode == SimMode::UntilDone && done) || cycle == max_cycles {
                if !done {
                    return Err(SimError::NotDone(max_cycles));
                }
                let outputs = value_wires.iter().map(|&w| v[w as usize]).collect();
                return Ok(SimResult {
                    outputs,
                    done,
                    cycles_used: cycle,
                });
            }
            for (slot, f) in next.iter_mut().zip(&self.dffs) {
                *slot = v[f.d as usize];
            }
            for (&b, f) in next.iter().zip(&self.dffs) {
                v[f.q as usize] = b;
            }
        }
        unreachable!()
    }

    pub fn to_text(&self) -> String {
        let p = self.params;
        let mut s = String::new();
        let _ = writeln!(s, "PARAMS {} {} {} {}", p.n, p.m, p.w, p.cycles);
        let list = |s: &mut String, head: &str, ws: &[u32]| {
            s.push_str(head);
            for w in ws {
                let _ = write!(s, " {w}");
            }
            s.push('\n');
        };
        list(&mut s, "IN G", &self.garbler_inputs);
        list(&mut s, "IN E", &self.evaluator_inputs);
        for f in &self.dffs {
            let _ = writeln!(s, "DFF {} {} {}", f.d, f.q, f.init as u8);
        }
        for g in &self.gates {
            let _ = match *g {
                Gate::And { a, b, y } => writeln!(s, "AND {a} {b} {y}"),
                Gate::Xor { a, b, y } => writeln!(s, "XOR {a} {b} {y}"),
                Gate::Not { a, y } => writeln!(s, "NOT {a} {y}"),
                Gate::Const { value, y } => writeln!(s, "CONST{} {y}", value as u8),
            };
        }
        list(&mut s, "OUT", &self.outputs);
        s
    }

    pub fn from_text(text: &str) -> Result<Self, NetlistError> {
        let mut params = None;
        let (mut gi, mut ei, mut outs) = (None, None, None);
        let (mut gates, mut dffs) = (Vec::new(), Vec::new());
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: &str| NetlistError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let mut toks = body.split_whitespace();
            let head = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();
            let nums = |skip: usize| -> Result<Vec<u64>, NetlistError> {
                rest[skip..]
                    .iter()
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|_| err(&format!("bad number `{t}`")))
                    })
                    .collect()
            };
            let wires = |skip: usize| -> Result<Vec<u32>, NetlistError> {
                nums(skip)?
                    .into_iter()
                    .map(|v| u32::try_from(v).map_err(|_| err("wire id too large")))
                    .collect()
            };
            let exact = |ws: Vec<u32>, n: usize| -> Result<Vec<u32>, NetlistError> {
                if ws.len() == n {
                    Ok(ws)
                } else {
                    Err(err(&format!("`{head}` takes {n} operands")))
                }
            };
            let once = |slot: &mut Option<Vec<u32>>, v: Vec<u32>| -> Result<(), NetlistError> {
                if slot.replace(v).is_some() {
                    return Err(err("duplicate line"));
                }
                Ok(())
            };
            match head {
                "PARAMS" => {
                    let v = nums(0)?;
                    if v.len() != 4 || params.is_some() {
                        return Err(err("expected a single `PARAMS N M W cycles`"));
                    }
                    let w = u32::try_from(v[2]).map_err(|_| err("width too large"))?;
                    params = Some(Params {
                        n: v[0] as usize,
                        m: v[1] as usize,
                        w,
                        cycles: v[3] as usize,
                    });
                }
                "IN" => match rest.first() {
                    Some(&"G") => once(&mut gi, wires(1)?)?,
                    Some(&"E") => once(&mut ei, wires(1)?)?,
                    _ => return Err(err("input group must be G or E")),
                },
                "OUT" => once(&mut outs, wires(0)?)?,
                "AND" | "XOR" => {
                    let w = exact(wires(0)?, 3)?;
                    let (a, b, y) = (w[0], w[1], w[2]);
                    gates.push(if head == "AND" {
                        Gate::And { a, b, y }
                    } else {
                        Gate::Xor { a, b, y }
                    });
                }
                "NOT" => {
                    let w = exact(wires(0)?, 2)?;
                    gates.push(Gate::Not { a: w[0], y: w[1] });
                }
                "CONST0" | "CONST1" => {
                    let w = exact(wires(0)?, 1)?;
                    gates.push(Gate::Const {
                        value: head == "CONST1",
                        y: w[0],
                    });
                }
                "DFF" => {
                    let w = exact(wires(0)?, 3)?;
                    if w[2] > 1 {
                        return Err(err("DFF init must be 0 or 1"));
                    }
                    dffs.push(Dff {
                        d: w[0],
                        q: w[1],
                        init: w[2] == 1,
                    });
                }
                other => return Err(err(&format!("unknown directive `{other}`"))),
            }
        }
        let eof = |what: &str| NetlistError::Syntax {
            line: text.lines().count(),
            msg: format!("missing {what}"),
        };
        let params = params.ok_or_else(|| eof("PARAMS"))?;
        let garbler_inputs = gi.ok_or_else(|| eof("IN G"))?;
        let evaluator_inputs = ei.ok_or_else(|| eof("IN E"))?;
        let outputs = outs.ok_or_else(|| eof("OUT"))?;
        let count = garbler_inputs.len() + evaluator_inputs.len() + dffs.len() + gates.len();
        let max = garbler_inputs
            .iter()
            .chain(&evaluator_inputs)
            .copied()
            .chain(dffs.iter().map(|f| f.q))
            .chain(gates.iter().map(|g| g.output()))
            .max();
        if let Some(max) = max {
            if max as usize + 1 != count {
                return Err(NetlistError::Sparse { count, max });
            }
        }
        Netlist::from_parts(
            params,
            count as u32,
            garbler_inputs,
            evaluator_inputs,
            gates,
            dffs,
            outputs,
        )
    }
}
