//! Shared helpers for the integration and acceptance tests: a seeded random
//! network generator and an exhaustive schedulability oracle for tiny task
//! graphs.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use fppn::model::{ChannelSpec, NetworkModel, ProcessKind, ProcessSpec};
use fppn::sim::{Event, EventTrace};
use fppn::taskgraph::TaskGraph;
use fppn::time::Micros;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PERIODS_MS: [u64; 4] = [10, 20, 25, 50];

const BEHAVIORS: [&str; 7] = ["identity", "square", "constant(7)", "sum", "sink", "source(1,2,3)", "source(-4,5)"];

/// Random valid network with `1..=max_procs` processes. Sporadic processes
/// are coupled to a periodic one through exactly one channel.
pub fn random_network(rng: &mut TestRng, max_procs: usize) -> NetworkModel {
    let n = rng.gen_range(1..=max_procs);
    let mut prios: Vec<u32> = (1..=n as u32).collect();
    prios.shuffle(rng);
    let mut processes = Vec::with_capacity(n);
    for (i, &fpriority) in prios.iter().enumerate() {
        let period = Micros::from_ms(*PERIODS_MS.choose(rng).unwrap());
        let kind = if i > 0 && rng.gen_bool(0.2) {
            ProcessKind::Sporadic
        } else {
            ProcessKind::Periodic
        };
        // Multiples of 100 µs keep the model format's millisecond decimals exercised.
        let deadline = if rng.gen_bool(0.7) {
            period
        } else {
            Micros(rng.gen_range(period.as_us() / 2 / 100..=period.as_us() / 100) * 100)
        };
        let wcet = Micros(rng.gen_range(1..=(deadline.as_us() * 2 / 5 / 100).max(1)) * 100);
        processes.push(ProcessSpec {
            id: format!("p{i}"),
            kind,
            period,
            deadline,
            wcet: Some(wcet),
            fpriority,
            behavior: BEHAVIORS.choose(rng).unwrap().to_string(),
        });
    }

    let periodic: Vec<String> = processes
        .iter()
        .filter(|p| p.kind == ProcessKind::Periodic)
        .map(|p| p.id.clone())
        .collect();
    let mut channels = Vec::new();
    let mut couplings = BTreeMap::new();
    let mut channel = |rng: &mut TestRng, writer: &str, reader: &str| {
        let id = format!("c{}", channels.len());
        let mut c = if rng.gen_bool(0.5) {
            ChannelSpec::mailbox(&id, writer, reader, rng.gen_range(1..=3))
        } else {
            ChannelSpec::blackboard(&id, writer, reader)
        };
        c.data_size = rng.gen_range(1..=64);
        c.ordered = rng.gen_bool(0.8);
        channels.push(c);
    };

    for p in processes.iter().filter(|p| p.kind == ProcessKind::Sporadic) {
        let target = periodic.choose(rng).unwrap().clone();
        if rng.gen_bool(0.7) {
            channel(rng, &p.id, &target);
        } else {
            channel(rng, &target, &p.id);
        }
        couplings.insert(p.id.clone(), target);
    }
    if periodic.len() >= 2 {
        for _ in 0..rng.gen_range(0..=periodic.len() + 1) {
            let w = periodic.choose(rng).unwrap();
            let r = periodic.choose(rng).unwrap();
            if w != r {
                channel(rng, w, r);
            }
        }
    }

    NetworkModel {
        processes,
        channels,
        couplings,
    }
}

/// Random events respecting every sporadic process's minimal inter-arrival
/// time, all strictly before `horizon`.
pub fn random_events(rng: &mut TestRng, net: &NetworkModel, horizon: Micros) -> EventTrace {
    let mut events = Vec::new();
    for p in net.processes.iter().filter(|p| p.kind == ProcessKind::Sporadic) {
        let mut t = Micros(rng.gen_range(0..p.period.as_us()));
        while t < horizon {
            if rng.gen_bool(0.7) {
                events.push(Event {
                    time: t,
                    process: p.id.clone(),
                    payload: rng.gen_range(-9..=9),
                });
            }
            t = t + p.period + Micros(rng.gen_range(0..=p.period.as_us() / 2));
        }
    }
    events.sort_by(|a, b| (a.time, &a.process).cmp(&(b.time, &b.process)));
    EventTrace::new(events)
}

/// A uniformly shuffled topological order of `tg` (random choice among
/// available jobs at every step).
pub fn random_topological_order(rng: &mut TestRng, tg: &TaskGraph) -> Vec<usize> {
    let n = tg.jobs.len();
    let succs = tg.successors();
    let mut indeg = vec![0usize; n];
    for &(_, v) in &tg.edges {
        indeg[v] += 1;
    }
    let mut avail: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !avail.is_empty() {
        let u = avail.swap_remove(rng.gen_range(0..avail.len()));
        order.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                avail.push(v);
            }
        }
    }
    order
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Feasible,
    Infeasible,
    /// Search budget exhausted.
    Unknown,
}

/// Exhaustive non-preemptive schedulability under the engine model: with
/// one core every job runs contiguously with its four transitions; with more
/// cores core 0 serializes 2δ dispatch and 2δ retire operations while
/// computes run on cores `1..cores`, each compute core reserved from
/// dispatch until compute end. Every interleaving of engine operations and
/// every core choice is explored, each operation at its earliest instant.
pub fn oracle_feasible(tg: &TaskGraph, cores: usize, delta: Micros, budget: usize) -> OracleVerdict {
    let n = tg.jobs.len();
    assert!(n <= 16, "oracle is for tiny graphs");
    let preds: Vec<u32> = {
        let mut m = vec![0u32; n];
        for &(u, v) in &tg.edges {
            m[v] |= 1 << u;
        }
        m
    };
    let mut search = Search {
        tg,
        preds,
        delta,
        nodes: 0,
        budget,
    };
    let found = if cores == 1 {
        search.single(Micros::ZERO, 0, &mut vec![Micros::ZERO; n])
    } else {
        let state = State {
            engine: Micros::ZERO,
            core_free: vec![Micros::ZERO; cores - 1],
            running: Vec::new(),
            dispatched: 0,
            retired: 0,
            completion: vec![Micros::ZERO; n],
        };
        search.multi(state)
    };
    match found {
        Some(true) => OracleVerdict::Feasible,
        Some(false) => OracleVerdict::Infeasible,
        None => OracleVerdict::Unknown,
    }
}

struct Search<'a> {
    tg: &'a TaskGraph,
    preds: Vec<u32>,
    delta: Micros,
    nodes: usize,
    budget: usize,
}

#[derive(Clone)]
struct State {
    engine: Micros,
    core_free: Vec<Micros>,
    running: Vec<(Micros, usize)>,
    dispatched: u32,
    retired: u32,
    completion: Vec<Micros>,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    /// `Some(found)`, or `None` when the budget ran out.
    fn single(&mut self, t: Micros, done: u32, completion: &mut Vec<Micros>) -> Option<bool> {
        if !self.tick() {
            return None;
        }
        let n = self.tg.jobs.len();
        if done.count_ones() as usize == n {
            return Some(true);
        }
        let mut exhausted = false;
        for j in 0..n {
            if done & (1 << j) != 0 || self.preds[j] & !done != 0 {
                continue;
            }
            let job = &self.tg.jobs[j];
            let mut start = t.max(job.arrival);
            for p in 0..n {
                if self.preds[j] & (1 << p) != 0 {
                    start = start.max(completion[p]);
                }
            }
            let end = start + self.delta * 4 + job.wcet;
            if end > job.deadline {
                continue;
            }
            completion[j] = end;
            match self.single(end, done | (1 << j), completion) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => exhausted = true,
            }
        }
        if exhausted {
            None
        } else {
            Some(false)
        }
    }

    fn multi(&mut self, s: State) -> Option<bool> {
        if !self.tick() {
            return None;
        }
        let n = self.tg.jobs.len();
        if s.retired.count_ones() as usize == n {
            return Some(true);
        }
        let two = self.delta * 2;
        // A running job only gets later to retire.
        if s.running.iter().any(|&(end, j)| s.engine.max(end) + two > self.tg.jobs[j].deadline) {
            return Some(false);
        }
        let mut exhausted = false;
        let mut explore = |this: &mut Self, next: State| match this.multi(next) {
            Some(true) => Some(true),
            Some(false) => None,
            None => {
                exhausted = true;
                None
            }
        };

        for (i, &(end, j)) in s.running.iter().enumerate() {
            let done = s.engine.max(end) + two;
            let mut next = s.clone();
            next.running.swap_remove(i);
            next.engine = done;
            next.retired |= 1 << j;
            next.completion[j] = done;
            if explore(self, next).is_some() {
                return Some(true);
            }
        }

        for j in 0..n {
            if s.dispatched & (1 << j) != 0 || self.preds[j] & !s.retired != 0 {
                continue;
            }
            let job = &self.tg.jobs[j];
            let mut ready = s.engine.max(job.arrival);
            for p in 0..n {
                if self.preds[j] & (1 << p) != 0 {
                    ready = ready.max(s.completion[p]);
                }
            }
            // Cores with equal free instants are interchangeable.
            let mut tried: Vec<Micros> = Vec::new();
            for c in 0..s.core_free.len() {
                let at = ready.max(s.core_free[c]);
                if tried.contains(&at) {
                    continue;
                }
                tried.push(at);
                let end = at + two + job.wcet;
                if end + two > job.deadline {
                    continue;
                }
                let mut next = s.clone();
                next.engine = at + two;
                next.core_free[c] = end;
                next.running.push((end, j));
                next.dispatched |= 1 << j;
                if explore(self, next).is_some() {
                    return Some(true);
                }
            }
        }
        if exhausted {
            None
        } else {
            Some(false)
        }
    }
}
