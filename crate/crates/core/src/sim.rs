//! Deterministic execution of a network under a schedule table.
//!
//! Each job reads its inputs once when it starts and writes its outputs when
//! it ends. Channels that carry a functional-priority arc are accessed at
//! those physical instants; the task graph orders every racing pair. Channels
//! without an arc behave as double buffers: the reader sees them as of its
//! arrival and the writer's values land at its absolute deadline. A feasible
//! table always completes the writer by then, so any realization of the
//! table observes the same contents.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::behavior::{Behavior, BehaviorRegistry, LocalState, StepInput, UnknownBehavior};
use crate::channel::{ChannelState, Value, WriteStatus};
use crate::model::{NetworkModel, ProcessKind};
use crate::scheduler::{asap_schedule, check_schedule, EntryKind, ScheduleError, ScheduleTable, ScheduleViolation};
use crate::taskgraph::{build_task_graph, JobId, TaskGraphError};
use crate::time::Micros;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub time: Micros,
    pub process: String,
    pub payload: Value,
}

/// Environment stimuli for sporadic processes, in time order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventTrace {
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EventError {
    #[error("event at {time} for unknown process `{process}`")]
    UnknownProcess { time: Micros, process: String },
    #[error("event at {time} targets `{process}`, which is not sporadic")]
    NotSporadic { time: Micros, process: String },
    #[error("event at {time} precedes the previous event at {previous}")]
    NonMonotone { time: Micros, previous: Micros },
    #[error("events for `{process}` at {first} and {second} are closer than its minimal inter-arrival time {miat}")]
    RateViolation {
        process: String,
        first: Micros,
        second: Micros,
        miat: Micros,
    },
}

impl EventTrace {
    pub fn new(events: Vec<Event>) -> Self {
        EventTrace { events }
    }

    /// Time order, known sporadic targets, and the minimal inter-arrival law.
    pub fn validate(&self, net: &NetworkModel) -> Result<(), EventError> {
        let mut last_of: BTreeMap<&str, Micros> = BTreeMap::new();
        let mut previous = Micros::ZERO;
        for e in &self.events {
            if e.time < previous {
                return Err(EventError::NonMonotone {
                    time: e.time,
                    previous,
                });
            }
            previous = e.time;
            let p = net.process(&e.process).ok_or_else(|| EventError::UnknownProcess {
                time: e.time,
                process: e.process.clone(),
            })?;
            if p.kind != ProcessKind::Sporadic {
                return Err(EventError::NotSporadic {
                    time: e.time,
                    process: e.process.clone(),
                });
            }
            if let Some(&first) = last_of.get(e.process.as_str()) {
                if e.time - first < p.period {
                    return Err(EventError::RateViolation {
                        process: e.process.clone(),
                        first,
                        second: e.time,
                        miat: p.period,
                    });
                }
            }
            last_of.insert(&e.process, e.time);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    JobStart { job: JobId, core: usize },
    JobEnd { job: JobId },
    Read { job: JobId, channel: String, value: Option<Value> },
    Write { job: JobId, channel: String, value: Value, status: WriteStatus },
    Output { process: String, value: Value },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: Micros,
    pub event: TraceEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecutionTrace {
    pub records: Vec<TraceRecord>,
}

impl ExecutionTrace {
    /// Output values per process.
    pub fn outputs(&self) -> BTreeMap<&str, Vec<Value>> {
        let mut out: BTreeMap<&str, Vec<Value>> = BTreeMap::new();
        for r in &self.records {
            if let TraceEvent::Output { process, value } = &r.event {
                out.entry(process).or_default().push(*value);
            }
        }
        out
    }

    /// Written values per channel, dropped writes included.
    pub fn writes(&self) -> BTreeMap<&str, Vec<Value>> {
        let mut out: BTreeMap<&str, Vec<Value>> = BTreeMap::new();
        for r in &self.records {
            if let TraceEvent::Write { channel, value, .. } = &r.event {
                out.entry(channel).or_default().push(*value);
            }
        }
        out
    }

    pub fn count(&self, pred: impl Fn(&TraceEvent) -> bool) -> usize {
        self.records.iter().filter(|r| pred(&r.event)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("schedule table does not match the network: {0}")]
    TableMismatch(ScheduleViolation),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error(transparent)]
    Behavior(#[from] UnknownBehavior),
    #[error(transparent)]
    Graph(#[from] TaskGraphError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Channel actions at one instant run in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    End,
    DeferredWrite,
    EarlyRead,
    Start,
}

#[derive(Debug)]
struct Action {
    time: Micros,
    phase: Phase,
    /// Position of the job's compute segment in the table.
    seq: usize,
    job: usize,
}

struct JobRun {
    id: JobId,
    process: usize,
    core: usize,
    start: Micros,
    end: Micros,
    /// `None` for periodic jobs; `Some(None)` for a sporadic job without event.
    event: Option<Option<Value>>,
    early_reads: BTreeMap<usize, Option<Value>>,
    effects: Option<(Vec<Option<Value>>, Vec<Value>)>,
}

impl JobRun {
    fn skipped(&self) -> bool {
        self.event == Some(None)
    }
}

/// Execute every job of `table` over `horizon`, driving `behaviors` with
/// `events`.
pub fn simulate(
    net: &NetworkModel,
    behaviors: &BehaviorRegistry,
    table: &ScheduleTable,
    events: &EventTrace,
    horizon: Micros,
) -> Result<ExecutionTrace, SimError> {
    events.validate(net)?;
    let tg = build_task_graph(net, horizon)?;
    if let Some(v) = check_schedule(table, &tg).into_iter().find(ScheduleViolation::is_structural) {
        return Err(SimError::TableMismatch(v));
    }

    let proc_index: BTreeMap<&str, usize> = net
        .processes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let impls: Vec<Arc<dyn Behavior>> = net
        .processes
        .iter()
        .map(|p| behaviors.resolve(&p.behavior))
        .collect::<Result<_, _>>()?;
    let inputs: Vec<Vec<usize>> = net
        .processes
        .iter()
        .map(|p| net.inputs_of(&p.id).iter().map(|c| chan_index(net, &c.id)).collect())
        .collect();
    let outputs: Vec<Vec<usize>> = net
        .processes
        .iter()
        .map(|p| net.outputs_of(&p.id).iter().map(|c| chan_index(net, &c.id)).collect())
        .collect();

    // Each sporadic job takes the oldest pending event released by its arrival.
    let mut pending: BTreeMap<&str, std::collections::VecDeque<&Event>> = BTreeMap::new();
    for e in &events.events {
        pending.entry(e.process.as_str()).or_default().push_back(e);
    }

    let mut runs = Vec::with_capacity(tg.jobs.len());
    let mut actions = Vec::new();
    for (i, job) in tg.jobs.iter().enumerate() {
        let (seq, seg) = table
            .entries
            .iter()
            .enumerate()
            .find(|(_, e)| e.kind == EntryKind::Compute && e.job == job.id)
            .expect("checked table schedules every job");
        let p = proc_index[job.id.process.as_str()];
        let event = match net.processes[p].kind {
            ProcessKind::Periodic => None,
            ProcessKind::Sporadic => {
                let queue = pending.entry(job.id.process.as_str()).or_default();
                match queue.front() {
                    Some(e) if e.time <= job.arrival => Some(queue.pop_front().map(|e| e.payload)),
                    _ => Some(None),
                }
            }
        };
        let run = JobRun {
            id: job.id.clone(),
            process: p,
            core: seg.core,
            start: seg.start,
            end: seg.end(),
            event,
            early_reads: BTreeMap::new(),
            effects: None,
        };
        let mut at = |time, phase| actions.push(Action { time, phase, seq, job: i });
        at(run.start, Phase::Start);
        at(run.end, Phase::End);
        if !run.skipped() {
            if inputs[p].iter().any(|&c| !net.channels[c].ordered) {
                at(job.arrival, Phase::EarlyRead);
            }
            if outputs[p].iter().any(|&c| !net.channels[c].ordered) {
                // A late job publishes when it ends instead.
                at(job.deadline.max(run.end), Phase::DeferredWrite);
            }
        }
        runs.push(run);
    }
    actions.sort_by_key(|a| (a.time, a.phase, a.seq, a.job));

    let mut channels: Vec<ChannelState> = net.channels.iter().map(ChannelState::new).collect();
    let mut local: Vec<LocalState> = vec![Vec::new(); net.processes.len()];
    let mut records = Vec::new();
    let mut record = |time, event| records.push(TraceRecord { time, event });

    for a in actions {
        let run = &mut runs[a.job];
        let p = run.process;
        match a.phase {
            Phase::EarlyRead => {
                for &c in inputs[p].iter().filter(|&&c| !net.channels[c].ordered) {
                    let value = channels[c].read();
                    run.early_reads.insert(c, value);
                    record(a.time, read_record(run, net, c, value));
                }
            }
            Phase::Start => {
                record(
                    a.time,
                    TraceEvent::JobStart {
                        job: run.id.clone(),
                        core: run.core,
                    },
                );
                if run.skipped() {
                    record(a.time, TraceEvent::JobEnd { job: run.id.clone() });
                    continue;
                }
                let mut values = Vec::with_capacity(inputs[p].len());
                for &c in &inputs[p] {
                    let value = match run.early_reads.get(&c) {
                        Some(v) => *v,
                        None => {
                            let v = channels[c].read();
                            record(a.time, read_record(run, net, c, v));
                            v
                        }
                    };
                    values.push(value);
                }
                let (effects, next) = impls[p].step(
                    StepInput {
                        inputs: &values,
                        event: run.event.flatten(),
                        output_count: outputs[p].len(),
                    },
                    &local[p],
                );
                local[p] = next;
                run.effects = Some((effects.writes, effects.outputs));
            }
            Phase::End => {
                if run.skipped() {
                    continue;
                }
                let (writes, outs) = run.effects.as_ref().expect("job started before it ends");
                for (&c, value) in outputs[p].iter().zip(writes) {
                    if let (true, Some(v)) = (net.channels[c].ordered, value) {
                        let status = channels[c].write(*v);
                        record(a.time, write_record(run, net, c, *v, status));
                    }
                }
                for &value in outs {
                    record(
                        a.time,
                        TraceEvent::Output {
                            process: net.processes[p].id.clone(),
                            value,
                        },
                    );
                }
                record(a.time, TraceEvent::JobEnd { job: run.id.clone() });
            }
            Phase::DeferredWrite => {
                let (writes, _) = run.effects.as_ref().expect("job started before its deadline write");
                for (&c, value) in outputs[p].iter().zip(writes) {
                    if let (false, Some(v)) = (net.channels[c].ordered, value) {
                        let status = channels[c].write(*v);
                        record(a.time, write_record(run, net, c, *v, status));
                    }
                }
            }
        }
    }

    Ok(ExecutionTrace { records })
}

fn chan_index(net: &NetworkModel, id: &str) -> usize {
    net.channels.iter().position(|c| c.id == id).expect("channel of this network")
}

fn read_record(run: &JobRun, net: &NetworkModel, c: usize, value: Option<Value>) -> TraceEvent {
    TraceEvent::Read {
        job: run.id.clone(),
        channel: net.channels[c].id.clone(),
        value,
    }
}

fn write_record(run: &JobRun, net: &NetworkModel, c: usize, value: Value, status: WriteStatus) -> TraceEvent {
    TraceEvent::Write {
        job: run.id.clone(),
        channel: net.channels[c].id.clone(),
        value,
        status,
    }
}

/// Dispatch online with the ASAP policy and execute the result.
pub fn run_asap(
    net: &NetworkModel,
    behaviors: &BehaviorRegistry,
    events: &EventTrace,
    horizon: Micros,
    cores: usize,
    delta: Micros,
) -> Result<(ScheduleTable, ExecutionTrace), SimError> {
    let tg = build_task_graph(net, horizon)?;
    let table = asap_schedule(&tg, net, cores, delta)?;
    let trace = simulate(net, behaviors, &table, events, horizon)?;
    Ok((table, trace))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stream {
    Output(String),
    Channel(String),
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stream::Output(p) => write!(f, "outputs of {p}"),
            Stream::Channel(c) => write!(f, "writes to {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub stream: Stream,
    pub index: usize,
    pub left: Option<Value>,
    pub right: Option<Value>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<Value>| v.map_or("<none>".to_string(), |v| v.to_string());
        write!(
            f,
            "{} differ at #{}: {} vs {}",
            self.stream,
            self.index,
            show(self.left),
            show(self.right)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Diverged(Divergence),
}

/// Compare the functional content of two traces: output values per process
/// and written values per channel. Times and cores are ignored.
pub fn compare_traces(left: &ExecutionTrace, right: &ExecutionTrace) -> Comparison {
    fn first_diff(
        a: &BTreeMap<&str, Vec<Value>>,
        b: &BTreeMap<&str, Vec<Value>>,
        wrap: fn(String) -> Stream,
    ) -> Option<Divergence> {
        let empty = Vec::new();
        let mut keys: Vec<&str> = a.keys().chain(b.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            let (x, y) = (a.get(key).unwrap_or(&empty), b.get(key).unwrap_or(&empty));
            if x == y {
                continue;
            }
            let index = x.iter().zip(y).take_while(|(p, q)| p == q).count();
            return Some(Divergence {
                stream: wrap(key.to_string()),
                index,
                left: x.get(index).copied(),
                right: y.get(index).copied(),
            });
        }
        None
    }
    first_diff(&left.outputs(), &right.outputs(), Stream::Output)
        .or_else(|| first_diff(&left.writes(), &right.writes(), Stream::Channel))
        .map_or(Comparison::Equal, Comparison::Diverged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelSpec, ProcessSpec};
    use crate::scheduler::list_schedule;

    const MS: Micros = Micros(1000);

    fn fig1() -> NetworkModel {
        let mut net = NetworkModel {
            processes: vec![
                ProcessSpec::sporadic("X", 50, 1, 3, "identity"),
                ProcessSpec::periodic("Square", 50, 1, 2, "square"),
                ProcessSpec::periodic("Y", 50, 1, 1, "sink"),
            ],
            channels: vec![
                ChannelSpec::mailbox("x2sq", "X", "Square", 1),
                ChannelSpec::blackboard("sq2y", "Square", "Y"),
            ],
            couplings: Default::default(),
        };
        net.couplings.insert("X".into(), "Square".into());
        net
    }

    fn one_event(t: u64, payload: Value) -> EventTrace {
        EventTrace::new(vec![Event {
            time: Micros::from_ms(t),
            process: "X".into(),
            payload,
        }])
    }

    fn run(net: &NetworkModel, events: &EventTrace, horizon: Micros, cores: usize, delta: Micros) -> ExecutionTrace {
        let tg = build_task_graph(net, horizon).unwrap();
        let table = list_schedule(&tg, net, cores, delta).unwrap();
        simulate(net, &BehaviorRegistry::new(), &table, events, horizon).unwrap()
    }

    #[test]
    fn square_reaches_sink() {
        let net = fig1();
        let horizon = Micros::from_ms(150);
        for (cores, delta) in [(1, Micros::ZERO), (2, MS), (3, MS)] {
            let trace = run(&net, &one_event(0, 3), horizon, cores, delta);
            assert_eq!(trace.outputs()["Y"], [9], "cores={cores}");
        }
    }

    #[test]
    fn no_events_means_no_writes_from_sporadics() {
        let net = NetworkModel {
            processes: vec![
                ProcessSpec::sporadic("S", 10, 1, 1, "identity"),
                ProcessSpec::periodic("P", 10, 1, 2, "sink"),
            ],
            channels: vec![ChannelSpec::mailbox("c", "S", "P", 1)],
            couplings: [("S".to_string(), "P".to_string())].into(),
        };
        let trace = run(&net, &EventTrace::default(), Micros::from_ms(20), 2, MS);
        let starts = trace.count(|e| matches!(e, TraceEvent::JobStart { .. }));
        assert_eq!(starts, 4);
        assert_eq!(trace.count(|e| matches!(e, TraceEvent::Write { .. })), 0);
    }

    #[test]
    fn event_rate_law() {
        let net = fig1();
        let events = EventTrace::new(vec![
            Event { time: Micros::ZERO, process: "X".into(), payload: 1 },
            Event { time: MS, process: "X".into(), payload: 2 },
        ]);
        assert!(matches!(events.validate(&net), Err(EventError::RateViolation { .. })));
        let events = EventTrace::new(vec![Event { time: MS, process: "Y".into(), payload: 1 }]);
        assert!(matches!(events.validate(&net), Err(EventError::NotSporadic { .. })));
    }

    #[test]
    fn mismatched_table_rejected() {
        let net = fig1();
        let tg = build_task_graph(&net, Micros::from_ms(50)).unwrap();
        let mut table = list_schedule(&tg, &net, 2, MS).unwrap();
        table.entries.retain(|e| e.job.process != "Y");
        let err = simulate(&net, &BehaviorRegistry::new(), &table, &EventTrace::default(), Micros::from_ms(50));
        assert!(matches!(err, Err(SimError::TableMismatch(ScheduleViolation::MissingJob(_)))));
    }

    #[test]
    fn comparison() {
        let net = fig1();
        let horizon = Micros::from_ms(150);
        let a = run(&net, &one_event(0, 3), horizon, 1, Micros::ZERO);
        let b = run(&net, &one_event(0, 3), horizon, 3, MS);
        let c = run(&net, &one_event(0, 4), horizon, 3, MS);
        assert_eq!(compare_traces(&a, &a), Comparison::Equal);
        assert_eq!(compare_traces(&a, &b), Comparison::Equal);
        match compare_traces(&a, &c) {
            Comparison::Diverged(d) => {
                assert_eq!(d.stream, Stream::Output("Y".into()));
                assert_eq!((d.index, d.left, d.right), (0, Some(9), Some(16)));
            }
            Comparison::Equal => panic!("different events must diverge"),
        }
    }

    #[test]
    fn asap_single_job_starts_at_arrival() {
        let net = NetworkModel {
            processes: vec![ProcessSpec::periodic("p", 10, 2, 1, "constant(1)")],
            ..Default::default()
        };
        let (table, trace) =
            run_asap(&net, &BehaviorRegistry::new(), &EventTrace::default(), Micros::from_ms(10), 1, Micros::ZERO)
                .unwrap();
        assert_eq!(table.entries[0].start, Micros::ZERO);
        assert_eq!(trace.records[0].time, Micros::ZERO);
    }
}
