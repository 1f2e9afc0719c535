//! Static list scheduling onto a time-triggered multicore table.
//!
//! Every job costs four engine transitions of length `delta` around its
//! compute segment: `arrive` and `start` before, `finish` and `complete`
//! after. Transitions are serialized on the engine. With a single core the
//! engine shares that core with the compute segments; with two or more,
//! core 0 is reserved for the engine and jobs run on cores `1..cores`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::NetworkModel;
use crate::taskgraph::{JobId, TaskGraph, TaskGraphError};
use crate::time::Micros;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionTag {
    Arrive,
    Start,
    Finish,
    Complete,
}

impl TransitionTag {
    pub const ALL: [TransitionTag; 4] = [
        TransitionTag::Arrive,
        TransitionTag::Start,
        TransitionTag::Finish,
        TransitionTag::Complete,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransitionTag::Arrive => "arrive",
            TransitionTag::Start => "start",
            TransitionTag::Finish => "finish",
            TransitionTag::Complete => "complete",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryKind {
    Compute,
    Transition(TransitionTag),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub kind: EntryKind,
    pub job: JobId,
    pub core: usize,
    pub start: Micros,
    pub duration: Micros,
}

impl ScheduleEntry {
    pub fn end(&self) -> Micros {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadlineMiss {
    pub job: JobId,
    pub completion: Micros,
    pub deadline: Micros,
}

/// Total demand exceeding what a resource can supply over the jobs' span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overload {
    pub demand: Micros,
    pub capacity: Micros,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasibility {
    pub misses: Vec<DeadlineMiss>,
    pub overload: Option<Overload>,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(o) = &self.overload {
            return write!(f, "demand {} > {}", o.demand, o.capacity);
        }
        match self.misses.first() {
            Some(m) => {
                write!(f, "deadline miss: {} completes at {} > {}", m.job, m.completion, m.deadline)?;
                if self.misses.len() > 1 {
                    write!(f, " (and {} more)", self.misses.len() - 1)?;
                }
                Ok(())
            }
            None => f.write_str("unknown reason"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible(Infeasibility),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Feasible => f.write_str("feasible"),
            Verdict::Infeasible(why) => write!(f, "infeasible: {why}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTable {
    /// Sorted by `(start, core)`.
    pub entries: Vec<ScheduleEntry>,
    /// Total core count, engine core included.
    pub cores: usize,
    pub delta: Micros,
    pub verdict: Verdict,
}

impl ScheduleTable {
    /// Index of the core hosting engine transitions.
    pub const ENGINE_CORE: usize = 0;

    pub fn makespan(&self) -> Micros {
        self.entries.iter().map(ScheduleEntry::end).max().unwrap_or_default()
    }

    /// Completion instant of every job: end of its `complete` transition, or
    /// of its compute segment when `delta` is zero.
    pub fn completions(&self) -> BTreeMap<JobId, Micros> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            let done = match e.kind {
                EntryKind::Transition(TransitionTag::Complete) => true,
                EntryKind::Compute => self.delta.is_zero(),
                _ => false,
            };
            if done {
                let slot = out.entry(e.job.clone()).or_insert(e.end());
                *slot = (*slot).max(e.end());
            }
        }
        out
    }

    /// Compute segment of `job`, if scheduled.
    pub fn compute_of(&self, job: &JobId) -> Option<&ScheduleEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == EntryKind::Compute && &e.job == job)
    }

    pub fn sort_entries(&mut self) {
        self.entries.sort_by(|a, b| {
            (a.start, a.core, a.kind, &a.job).cmp(&(b.start, b.core, b.kind, &b.job))
        });
    }
}

/// For each frame `[m * frame, (m + 1) * frame)` holding at least one
/// arrival, the latest completion among the jobs arriving in it, measured
/// from the frame start.
pub fn frame_completions(table: &ScheduleTable, tg: &TaskGraph, frame: Micros) -> Vec<(Micros, Micros)> {
    assert!(!frame.is_zero(), "frame length must be positive");
    let done = table.completions();
    let mut frames: BTreeMap<u64, Micros> = BTreeMap::new();
    for job in &tg.jobs {
        if let Some(&c) = done.get(&job.id) {
            let m = job.arrival.as_us() / frame.as_us();
            let rel = c - frame * m;
            let slot = frames.entry(m).or_default();
            *slot = (*slot).max(rel);
        }
    }
    frames.into_iter().map(|(m, c)| (frame * m, c)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("at least one core is required")]
    NoCores,
    #[error("priority order is not a permutation of the graph's jobs")]
    BadOrder,
    #[error(transparent)]
    Graph(#[from] TaskGraphError),
}

/// Latest completion instant of each job that still leaves its successors
/// room for their own WCETs.
fn effective_deadlines(tg: &TaskGraph) -> Result<Vec<Micros>, TaskGraphError> {
    let order = tg.topological_order()?;
    let succs = tg.successors();
    let mut eff: Vec<Micros> = tg.jobs.iter().map(|j| j.deadline).collect();
    for &u in order.iter().rev() {
        for &v in &succs[u] {
            let bound = eff[v].saturating_sub(tg.jobs[v].wcet);
            if bound < eff[u] {
                eff[u] = bound;
            }
        }
    }
    Ok(eff)
}

/// Total dispatch priority: a topological order of `tg`, choosing among
/// available jobs by earliest successor-adjusted deadline, then arrival,
/// then functional priority, then job id.
pub fn priority_order(tg: &TaskGraph, net: &NetworkModel) -> Result<Vec<usize>, ScheduleError> {
    let eff = effective_deadlines(tg)?;
    let fprio = |i: usize| {
        net.process(&tg.jobs[i].id.process)
            .map(|p| p.fpriority)
            .unwrap_or(u32::MAX)
    };
    let key = |i: usize| (eff[i], tg.jobs[i].arrival, fprio(i), tg.jobs[i].id.clone(), i);

    let mut indeg = vec![0usize; tg.jobs.len()];
    for &(_, v) in &tg.edges {
        indeg[v] += 1;
    }
    let succs = tg.successors();
    let mut ready: BTreeSet<_> = (0..tg.jobs.len()).filter(|&i| indeg[i] == 0).map(key).collect();
    let mut order = Vec::with_capacity(tg.jobs.len());
    while let Some(k) = ready.pop_first() {
        let u = k.4;
        order.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.insert(key(v));
            }
        }
    }
    if order.len() != tg.jobs.len() {
        return Err(TaskGraphError::Cyclic.into());
    }
    Ok(order)
}

/// How ready jobs compete for the next dispatch slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Policy {
    /// Highest rank first.
    Priority,
    /// Earliest ready instant first, rank breaks ties.
    FirstReady,
}

struct Builder<'a> {
    tg: &'a TaskGraph,
    delta: Micros,
    entries: Vec<ScheduleEntry>,
}

impl Builder<'_> {
    fn push(&mut self, job: usize, kind: EntryKind, core: usize, start: Micros, duration: Micros) {
        if duration.is_zero() {
            return;
        }
        self.entries.push(ScheduleEntry {
            kind,
            job: self.tg.jobs[job].id.clone(),
            core,
            start,
            duration,
        });
    }

    fn transitions(&mut self, job: usize, core: usize, at: Micros, tags: [TransitionTag; 2]) {
        let d = self.delta;
        self.push(job, EntryKind::Transition(tags[0]), core, at, d);
        self.push(job, EntryKind::Transition(tags[1]), core, at + d, d);
    }
}

fn dispatch(
    tg: &TaskGraph,
    cores: usize,
    delta: Micros,
    rank: &[usize],
    policy: Policy,
) -> Result<ScheduleTable, ScheduleError> {
    if cores == 0 {
        return Err(ScheduleError::NoCores);
    }
    let n = tg.jobs.len();
    let preds = tg.predecessors();
    let mut completion: Vec<Option<Micros>> = vec![None; n];
    let mut dispatched = vec![false; n];
    let mut b = Builder {
        tg,
        delta,
        entries: Vec::new(),
    };
    let two = delta * 2;

    // Ready instant if `j` can be dispatched at `t`.
    let ready_at = |j: usize, t: Micros, completion: &[Option<Micros>]| -> Option<Micros> {
        let job = &tg.jobs[j];
        if job.arrival > t {
            return None;
        }
        let mut r = job.arrival;
        for &p in &preds[j] {
            match completion[p] {
                Some(c) if c <= t => r = r.max(c),
                _ => return None,
            }
        }
        Some(r)
    };
    let pick = |t: Micros, dispatched: &[bool], completion: &[Option<Micros>]| -> Option<usize> {
        (0..n)
            .filter(|&j| !dispatched[j])
            .filter_map(|j| ready_at(j, t, completion).map(|r| (j, r)))
            .min_by_key(|&(j, r)| match policy {
                Policy::Priority => (Micros::ZERO, rank[j]),
                Policy::FirstReady => (r, rank[j]),
            })
            .map(|(j, _)| j)
    };

    let mut t = Micros::ZERO;
    let mut done = 0;

    if cores == 1 {
        while done < n {
            match pick(t, &dispatched, &completion) {
                Some(j) => {
                    let c = tg.jobs[j].wcet;
                    b.transitions(j, 0, t, [TransitionTag::Arrive, TransitionTag::Start]);
                    b.push(j, EntryKind::Compute, 0, t + two, c);
                    b.transitions(j, 0, t + two + c, [TransitionTag::Finish, TransitionTag::Complete]);
                    t = t + two + c + two;
                    completion[j] = Some(t);
                    dispatched[j] = true;
                    done += 1;
                }
                None => {
                    t = (0..n)
                        .filter(|&j| !dispatched[j] && tg.jobs[j].arrival > t)
                        .map(|j| tg.jobs[j].arrival)
                        .min()
                        .expect("undispatched job with no future arrival");
                }
            }
        }
    } else {
        let mut core_free = vec![Micros::ZERO; cores - 1];
        let mut engine_free = Micros::ZERO;
        // (compute end, job) awaiting finish/complete.
        let mut running: Vec<(Micros, usize)> = Vec::new();
        while done < n {
            while engine_free <= t {
                let retire = running
                    .iter()
                    .enumerate()
                    .filter(|(_, (end, _))| *end <= t)
                    .min_by_key(|(_, &(end, j))| (end, rank[j]))
                    .map(|(i, _)| i);
                if let Some(i) = retire {
                    let (_, j) = running.swap_remove(i);
                    b.transitions(j, ScheduleTable::ENGINE_CORE, t, [TransitionTag::Finish, TransitionTag::Complete]);
                    engine_free = t + two;
                    completion[j] = Some(engine_free);
                    done += 1;
                    continue;
                }
                let Some(core) = core_free.iter().position(|&f| f <= t) else {
                    break;
                };
                let Some(j) = pick(t, &dispatched, &completion) else {
                    break;
                };
                let c = tg.jobs[j].wcet;
                b.transitions(j, ScheduleTable::ENGINE_CORE, t, [TransitionTag::Arrive, TransitionTag::Start]);
                b.push(j, EntryKind::Compute, core + 1, t + two, c);
                core_free[core] = t + two + c;
                engine_free = t + two;
                running.push((t + two + c, j));
                dispatched[j] = true;
            }
            if done == n {
                break;
            }
            let next = std::iter::once(engine_free)
                .chain(core_free.iter().copied())
                .chain(running.iter().map(|&(end, _)| end))
                .chain(completion.iter().flatten().copied())
                .chain((0..n).filter(|&j| !dispatched[j]).map(|j| tg.jobs[j].arrival))
                .filter(|&x| x > t)
                .min();
            t = next.expect("dispatcher stalled with pending jobs");
        }
    }

    let mut table = ScheduleTable {
        entries: b.entries,
        cores,
        delta,
        verdict: Verdict::Feasible,
    };
    table.sort_entries();
    table.verdict = judge(tg, cores, delta, &completion);
    Ok(table)
}

fn judge(tg: &TaskGraph, cores: usize, delta: Micros, completion: &[Option<Micros>]) -> Verdict {
    let misses: Vec<_> = tg
        .jobs
        .iter()
        .zip(completion)
        .filter_map(|(job, c)| {
            let c = c.expect("every job completes");
            (c > job.deadline).then(|| DeadlineMiss {
                job: job.id.clone(),
                completion: c,
                deadline: job.deadline,
            })
        })
        .collect();
    if misses.is_empty() {
        return Verdict::Feasible;
    }
    Verdict::Infeasible(Infeasibility {
        misses,
        overload: overload(tg, cores, delta),
    })
}

/// Demand over the span `[min arrival, max deadline)` exceeding the supply
/// of the single core, the engine, or the compute cores.
pub fn overload(tg: &TaskGraph, cores: usize, delta: Micros) -> Option<Overload> {
    let first = tg.jobs.iter().map(|j| j.arrival).min()?;
    let last = tg.jobs.iter().map(|j| j.deadline).max()?;
    let span = last - first;
    let engine: Micros = delta * 4 * tg.jobs.len() as u64;
    let compute: Micros = tg.jobs.iter().map(|j| j.wcet).sum();
    let check = |demand: Micros, capacity: Micros| {
        (demand > capacity).then_some(Overload { demand, capacity })
    };
    if cores == 1 {
        check(engine + compute, span)
    } else {
        check(engine, span).or_else(|| check(compute, span * (cores as u64 - 1)))
    }
}

fn rank_of(order: &[usize], n: usize) -> Result<Vec<usize>, ScheduleError> {
    let mut rank = vec![usize::MAX; n];
    if order.len() != n {
        return Err(ScheduleError::BadOrder);
    }
    for (r, &j) in order.iter().enumerate() {
        if j >= n || rank[j] != usize::MAX {
            return Err(ScheduleError::BadOrder);
        }
        rank[j] = r;
    }
    Ok(rank)
}

/// Non-preemptive fixed-priority list schedule of `tg` on `cores` cores.
pub fn list_schedule(
    tg: &TaskGraph,
    net: &NetworkModel,
    cores: usize,
    delta: Micros,
) -> Result<ScheduleTable, ScheduleError> {
    let order = priority_order(tg, net)?;
    list_schedule_with_order(tg, cores, delta, &order)
}

/// [`list_schedule`] with a caller-supplied priority order (a permutation of
/// job indices; earlier is higher priority).
pub fn list_schedule_with_order(
    tg: &TaskGraph,
    cores: usize,
    delta: Micros,
    order: &[usize],
) -> Result<ScheduleTable, ScheduleError> {
    let rank = rank_of(order, tg.jobs.len())?;
    let table = dispatch(tg, cores, delta, &rank, Policy::Priority)?;
    if table.verdict.is_feasible() || cores == 1 {
        return Ok(table);
    }
    // List scheduling is not monotone in the core count. A feasible table
    // for fewer cores is still a valid table for this platform.
    for fewer in (1..cores).rev() {
        let mut alt = dispatch(tg, fewer, delta, &rank, Policy::Priority)?;
        if alt.verdict.is_feasible() {
            if fewer == 1 {
                for e in &mut alt.entries {
                    if e.kind == EntryKind::Compute {
                        e.core = 1;
                    }
                }
                alt.sort_entries();
            }
            alt.cores = cores;
            return Ok(alt);
        }
    }
    Ok(table)
}

/// Online as-soon-as-possible dispatch: jobs start in the order they become
/// ready; simultaneous ones follow [`priority_order`].
pub fn asap_schedule(
    tg: &TaskGraph,
    net: &NetworkModel,
    cores: usize,
    delta: Micros,
) -> Result<ScheduleTable, ScheduleError> {
    let order = priority_order(tg, net)?;
    let rank = rank_of(&order, tg.jobs.len())?;
    dispatch(tg, cores, delta, &rank, Policy::FirstReady)
}

/// Smallest total core count in `1..=max_cores` with a feasible list schedule.
pub fn min_cores(
    tg: &TaskGraph,
    net: &NetworkModel,
    delta: Micros,
    max_cores: usize,
) -> Result<Option<usize>, ScheduleError> {
    for cores in 1..=max_cores {
        if list_schedule(tg, net, cores, delta)?.verdict.is_feasible() {
            return Ok(Some(cores));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScheduleViolation {
    UnknownJob(JobId),
    MissingJob(JobId),
    DuplicateCompute(JobId),
    WrongWcet { job: JobId, expected: Micros, found: Micros },
    BadCore { job: JobId, core: usize },
    ZeroDuration(JobId),
    Transitions { job: JobId, detail: String },
    Overlap { core: usize, first: JobId, second: JobId, at: Micros },
    EarlyStart { job: JobId, start: Micros, arrival: Micros },
    Precedence { pred: JobId, succ: JobId },
    DeadlineMiss { job: JobId, completion: Micros, deadline: Micros },
}

impl ScheduleViolation {
    /// Whether the violation concerns table structure rather than timeliness.
    pub fn is_structural(&self) -> bool {
        !matches!(self, ScheduleViolation::DeadlineMiss { .. })
    }
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ScheduleViolation::*;
        match self {
            UnknownJob(j) => write!(f, "{j}: not a job of the task graph"),
            MissingJob(j) => write!(f, "{j}: not scheduled"),
            DuplicateCompute(j) => write!(f, "{j}: scheduled more than once"),
            WrongWcet { job, expected, found } => {
                write!(f, "{job}: compute segment lasts {found}, WCET is {expected}")
            }
            BadCore { job, core } => write!(f, "{job}: entry on invalid core {core}"),
            ZeroDuration(j) => write!(f, "{j}: zero-length entry"),
            Transitions { job, detail } => write!(f, "{job}: {detail}"),
            Overlap { core, first, second, at } => {
                write!(f, "core {core}: {first} and {second} overlap at {at}")
            }
            EarlyStart { job, start, arrival } => {
                write!(f, "{job}: starts at {start} before arrival {arrival}")
            }
            Precedence { pred, succ } => write!(f, "{succ}: starts before predecessor {pred} completes"),
            DeadlineMiss { job, completion, deadline } => {
                write!(f, "{job}: completes at {completion} after deadline {deadline}")
            }
        }
    }
}

/// Independent audit of a table against its task graph.
pub fn check_schedule(table: &ScheduleTable, tg: &TaskGraph) -> Vec<ScheduleViolation> {
    use ScheduleViolation as V;
    let mut out = Vec::new();
    let n = tg.jobs.len();
    let mut per_job: Vec<Vec<&ScheduleEntry>> = vec![Vec::new(); n];

    for e in &table.entries {
        let Some(j) = tg.index_of(&e.job) else {
            out.push(V::UnknownJob(e.job.clone()));
            continue;
        };
        if e.duration.is_zero() {
            out.push(V::ZeroDuration(e.job.clone()));
        }
        let core_ok = match (e.kind, table.cores) {
            (_, 0) => false,
            (_, 1) => e.core == 0,
            (EntryKind::Compute, c) => e.core >= 1 && e.core < c,
            (EntryKind::Transition(_), _) => e.core == ScheduleTable::ENGINE_CORE,
        };
        if !core_ok {
            out.push(V::BadCore {
                job: e.job.clone(),
                core: e.core,
            });
        }
        per_job[j].push(e);
    }

    // Per core, entries must not overlap.
    let mut by_core: BTreeMap<usize, Vec<&ScheduleEntry>> = BTreeMap::new();
    for e in &table.entries {
        by_core.entry(e.core).or_default().push(e);
    }
    for (core, mut es) in by_core {
        es.sort_by_key(|e| (e.start, e.end()));
        for w in es.windows(2) {
            if w[1].start < w[0].end() {
                out.push(V::Overlap {
                    core,
                    first: w[0].job.clone(),
                    second: w[1].job.clone(),
                    at: w[1].start,
                });
            }
        }
    }

    // Per job: one compute segment of WCET length, framed by transitions.
    let mut span: Vec<Option<(Micros, Micros)>> = vec![None; n];
    for (j, es) in per_job.iter().enumerate() {
        let job = &tg.jobs[j];
        let computes: Vec<_> = es.iter().filter(|e| e.kind == EntryKind::Compute).collect();
        let seg = match computes.as_slice() {
            [] => {
                out.push(V::MissingJob(job.id.clone()));
                continue;
            }
            [one] => **one,
            _ => {
                out.push(V::DuplicateCompute(job.id.clone()));
                continue;
            }
        };
        if seg.duration != job.wcet {
            out.push(V::WrongWcet {
                job: job.id.clone(),
                expected: job.wcet,
                found: seg.duration,
            });
        }
        let (mut first, mut last) = (seg.start, seg.end());
        if !table.delta.is_zero() {
            let mut tags: BTreeMap<TransitionTag, Vec<&ScheduleEntry>> = BTreeMap::new();
            for e in es {
                if let EntryKind::Transition(tag) = e.kind {
                    tags.entry(tag).or_default().push(e);
                }
            }
            let mut problem = None;
            let mut at = BTreeMap::new();
            for tag in TransitionTag::ALL {
                match tags.get(&tag).map(Vec::as_slice) {
                    Some([e]) if e.duration == table.delta => {
                        at.insert(tag, (e.start, e.end()));
                    }
                    Some([e]) => {
                        problem = Some(format!("{} transition lasts {}, expected {}", tag.as_str(), e.duration, table.delta));
                    }
                    _ => problem = Some(format!("expected exactly one {} transition", tag.as_str())),
                }
            }
            if problem.is_none() {
                let arrive = at[&TransitionTag::Arrive];
                let start = at[&TransitionTag::Start];
                let finish = at[&TransitionTag::Finish];
                let complete = at[&TransitionTag::Complete];
                let ordered = arrive.1 <= start.0
                    && start.1 <= seg.start
                    && seg.end() <= finish.0
                    && finish.1 <= complete.0;
                if !ordered {
                    problem = Some("transitions out of lifecycle order".to_string());
                }
                first = arrive.0;
                last = complete.1;
            }
            if let Some(detail) = problem {
                out.push(V::Transitions {
                    job: job.id.clone(),
                    detail,
                });
            }
        }
        if first < job.arrival {
            out.push(V::EarlyStart {
                job: job.id.clone(),
                start: first,
                arrival: job.arrival,
            });
        }
        if last > job.deadline {
            out.push(V::DeadlineMiss {
                job: job.id.clone(),
                completion: last,
                deadline: job.deadline,
            });
        }
        span[j] = Some((first, last));
    }

    for &(u, v) in &tg.edges {
        if let (Some((_, done)), Some((begin, _))) = (span[u], span[v]) {
            if begin < done {
                out.push(V::Precedence {
                    pred: tg.jobs[u].id.clone(),
                    succ: tg.jobs[v].id.clone(),
                });
            }
        }
    }

    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelSpec, ProcessSpec};
    use crate::taskgraph::build_task_graph;

    fn three_tasks() -> (NetworkModel, TaskGraph) {
        let net = NetworkModel {
            processes: vec![
                ProcessSpec::periodic("split", 25, 1, 1, "source(1)"),
                ProcessSpec::periodic("A", 25, 12, 2, "sink"),
                ProcessSpec::periodic("B", 25, 6, 3, "sink"),
            ],
            channels: vec![
                ChannelSpec::mailbox("toA", "split", "A", 2),
                ChannelSpec::mailbox("toB", "split", "B", 2),
            ],
            couplings: Default::default(),
        };
        let tg = build_task_graph(&net, Micros::from_ms(25)).unwrap();
        (net, tg)
    }

    fn names(tg: &TaskGraph, order: &[usize]) -> Vec<String> {
        order.iter().map(|&i| tg.jobs[i].id.to_string()).collect()
    }

    const MS: Micros = Micros(1000);

    #[test]
    fn three_task_priority() {
        let (net, tg) = three_tasks();
        let order = priority_order(&tg, &net).unwrap();
        assert_eq!(names(&tg, &order), ["split[0]", "A[0]", "B[0]"]);
    }

    #[test]
    fn independent_jobs_by_deadline_then_arrival() {
        let net = NetworkModel {
            processes: vec![
                ProcessSpec::periodic("late", 20, 1, 1, "sink"),
                ProcessSpec::periodic("early", 10, 1, 2, "sink"),
            ],
            ..Default::default()
        };
        let tg = build_task_graph(&net, Micros::from_ms(20)).unwrap();
        let order = priority_order(&tg, &net).unwrap();
        assert_eq!(names(&tg, &order), ["early[0]", "late[0]", "early[1]"]);
    }

    #[test]
    fn single_core_with_engine_is_infeasible() {
        let (net, tg) = three_tasks();
        let table = list_schedule(&tg, &net, 1, MS).unwrap();
        assert_eq!(table.verdict.to_string(), "infeasible: demand 31 ms > 25 ms");
        assert_eq!(table.makespan(), Micros::from_ms(31));
        assert!(check_schedule(&table, &tg)
            .iter()
            .all(|v| !v.is_structural()));
    }

    #[test]
    fn two_compute_cores_fit() {
        let (net, tg) = three_tasks();
        let table = list_schedule(&tg, &net, 3, MS).unwrap();
        assert!(table.verdict.is_feasible(), "{}", table.verdict);
        assert!(check_schedule(&table, &tg).is_empty());
        let core = |p: &str| table.compute_of(&JobId::new(p, 0)).unwrap().core;
        assert_eq!((core("split"), core("A"), core("B")), (1, 1, 2));
        for e in &table.entries {
            if let EntryKind::Transition(_) = e.kind {
                assert_eq!((e.core, e.duration), (0, MS));
            }
        }
        assert_eq!(table.entries.len(), 3 * 5);
    }

    #[test]
    fn zero_delta_single_core() {
        let (net, tg) = three_tasks();
        let table = list_schedule(&tg, &net, 1, Micros::ZERO).unwrap();
        assert!(table.verdict.is_feasible());
        assert_eq!(table.makespan(), Micros::from_ms(19));
        assert_eq!(table.entries.len(), 3);
    }

    #[test]
    fn min_core_search() {
        let (net, tg) = three_tasks();
        assert_eq!(min_cores(&tg, &net, MS, 4), Ok(Some(3)));
        assert_eq!(min_cores(&tg, &net, Micros::ZERO, 4), Ok(Some(1)));
        assert_eq!(min_cores(&tg, &net, MS, 2), Ok(None));
    }

    #[test]
    fn overlap_is_reported() {
        let (net, tg) = three_tasks();
        let mut table = list_schedule(&tg, &net, 3, Micros::ZERO).unwrap();
        let a = table.entries.iter().position(|e| e.job.process == "A").unwrap();
        let b = table.entries.iter().position(|e| e.job.process == "B").unwrap();
        table.entries[b].core = table.entries[a].core;
        table.entries[b].start = table.entries[a].start;
        let v = check_schedule(&table, &tg);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(matches!(v[0], ScheduleViolation::Overlap { core: 1, .. }));
    }

    #[test]
    fn missing_job_is_reported() {
        let (net, tg) = three_tasks();
        let mut table = list_schedule(&tg, &net, 3, MS).unwrap();
        table.entries.retain(|e| e.job.process != "B");
        assert_eq!(
            check_schedule(&table, &tg),
            [ScheduleViolation::MissingJob(JobId::new("B", 0))]
        );
    }

    #[test]
    fn precedence_is_checked() {
        let (net, tg) = three_tasks();
        let mut table = list_schedule(&tg, &net, 3, Micros::ZERO).unwrap();
        for e in &mut table.entries {
            if e.job.process == "A" {
                e.start = Micros::ZERO;
                e.core = 2;
            }
            if e.job.process == "B" {
                e.start = Micros::from_ms(13);
            }
        }
        let v = check_schedule(&table, &tg);
        assert_eq!(
            v,
            [ScheduleViolation::Precedence {
                pred: JobId::new("split", 0),
                succ: JobId::new("A", 0)
            }]
        );
    }

    #[test]
    fn asap_runs_a_and_b_together() {
        let (net, tg) = three_tasks();
        let table = asap_schedule(&tg, &net, 3, MS).unwrap();
        assert!(check_schedule(&table, &tg).is_empty());
        let a = table.compute_of(&JobId::new("A", 0)).unwrap();
        let b = table.compute_of(&JobId::new("B", 0)).unwrap();
        assert!(a.start < b.end() && b.start < a.end());
    }

    #[test]
    fn bad_orders_rejected() {
        let (_, tg) = three_tasks();
        assert_eq!(list_schedule_with_order(&tg, 2, MS, &[0, 1]), Err(ScheduleError::BadOrder));
        assert_eq!(list_schedule_with_order(&tg, 2, MS, &[0, 0, 1]), Err(ScheduleError::BadOrder));
        assert_eq!(list_schedule_with_order(&tg, 0, MS, &[0, 1, 2]), Err(ScheduleError::NoCores));
    }
}
