//! Network model: processes, channels, sporadic couplings and the
//! functional-priority relation they induce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::time::Micros;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    Periodic,
    Sporadic,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Periodic => "periodic",
            ProcessKind::Sporadic => "sporadic",
        }
    }
}

/// One process of the network.
///
/// For sporadic processes `period` holds the minimal inter-arrival time;
/// everything downstream treats it as a period (worst-case rate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessSpec {
    pub id: String,
    pub kind: ProcessKind,
    pub period: Micros,
    pub deadline: Micros,
    pub wcet: Option<Micros>,
    /// Functional priority index. Smaller index means higher priority.
    pub fpriority: u32,
    pub behavior: String,
}

impl ProcessSpec {
    pub fn periodic(id: &str, period_ms: u64, wcet_ms: u64, fpriority: u32, behavior: &str) -> Self {
        ProcessSpec {
            id: id.to_string(),
            kind: ProcessKind::Periodic,
            period: Micros::from_ms(period_ms),
            deadline: Micros::from_ms(period_ms),
            wcet: Some(Micros::from_ms(wcet_ms)),
            fpriority,
            behavior: behavior.to_string(),
        }
    }

    pub fn sporadic(id: &str, miat_ms: u64, wcet_ms: u64, fpriority: u32, behavior: &str) -> Self {
        ProcessSpec {
            kind: ProcessKind::Sporadic,
            ..Self::periodic(id, miat_ms, wcet_ms, fpriority, behavior)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// Bounded FIFO queue.
    Mailbox { length: usize },
    /// Last-value register.
    Blackboard,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Mailbox { .. } => "mailbox",
            ChannelKind::Blackboard => "blackboard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSpec {
    pub id: String,
    pub kind: ChannelKind,
    pub writer: String,
    pub reader: String,
    /// Bytes per item. Informational only.
    pub data_size: u32,
    /// Whether a functional-priority arc is attached to this channel.
    pub ordered: bool,
}

impl ChannelSpec {
    pub fn blackboard(id: &str, writer: &str, reader: &str) -> Self {
        ChannelSpec {
            id: id.to_string(),
            kind: ChannelKind::Blackboard,
            writer: writer.to_string(),
            reader: reader.to_string(),
            data_size: 4,
            ordered: true,
        }
    }

    pub fn mailbox(id: &str, writer: &str, reader: &str, length: usize) -> Self {
        ChannelSpec {
            kind: ChannelKind::Mailbox { length },
            ..Self::blackboard(id, writer, reader)
        }
    }

    pub fn unordered(mut self) -> Self {
        self.ordered = false;
        self
    }

    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.writer == a && self.reader == b) || (self.writer == b && self.reader == a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetworkModel {
    pub processes: Vec<ProcessSpec>,
    pub channels: Vec<ChannelSpec>,
    /// Sporadic process id to the periodic process that polls it.
    pub couplings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("functional priority query relates `{0}` to itself")]
    Reflexive(String),
    #[error("network has no processes")]
    Empty,
    #[error("process `{0}` has a zero period")]
    ZeroPeriod(String),
}

/// A structural problem found by [`validate_network`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// Id of the offending entity (first of them, for multi-entity problems).
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entity.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.entity, self.message)
        }
    }
}

impl NetworkModel {
    pub fn process(&self, id: &str) -> Option<&ProcessSpec> {
        self.processes.iter().find(|p| p.id == id)
    }

    pub fn channel(&self, id: &str) -> Option<&ChannelSpec> {
        self.channels.iter().find(|c| c.id == id)
    }

    fn require(&self, id: &str) -> Result<&ProcessSpec, ModelError> {
        self.process(id)
            .ok_or_else(|| ModelError::UnknownProcess(id.to_string()))
    }

    /// Channels read by `process`, sorted by channel id.
    pub fn inputs_of(&self, process: &str) -> Vec<&ChannelSpec> {
        let mut v: Vec<_> = self.channels.iter().filter(|c| c.reader == process).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Channels written by `process`, sorted by channel id.
    pub fn outputs_of(&self, process: &str) -> Vec<&ChannelSpec> {
        let mut v: Vec<_> = self.channels.iter().filter(|c| c.writer == process).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }
}

/// Collect every structural problem of `net`, sorted by entity id.
pub fn validate_network(net: &NetworkModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: &str, message: String| {
        out.push(Violation {
            entity: entity.to_string(),
            message,
        })
    };

    if net.processes.is_empty() {
        push("", "network has no processes".to_string());
    }

    let mut seen = BTreeSet::new();
    for p in &net.processes {
        if !seen.insert(p.id.as_str()) {
            push(&p.id, "duplicate process id".to_string());
        }
        if p.period.is_zero() {
            let what = match p.kind {
                ProcessKind::Periodic => "period",
                ProcessKind::Sporadic => "minimal inter-arrival time",
            };
            push(&p.id, format!("{what} must be positive"));
        }
        if p.deadline.is_zero() {
            push(&p.id, "deadline must be positive".to_string());
        }
        if p.fpriority == 0 {
            push(&p.id, "Fpriority must be a positive integer".to_string());
        }
        match p.wcet {
            Some(c) if c.is_zero() => push(&p.id, "WCET must be positive".to_string()),
            Some(c) if c > p.deadline => {
                push(&p.id, format!("WCET {c} exceeds deadline {}", p.deadline))
            }
            _ => {}
        }
    }

    let mut by_priority: BTreeMap<u32, Vec<&str>> = BTreeMap::new();
    for p in &net.processes {
        by_priority.entry(p.fpriority).or_default().push(&p.id);
    }
    for (prio, mut ids) in by_priority {
        if ids.len() > 1 {
            ids.sort_unstable();
            ids.dedup();
            if ids.len() > 1 {
                push(ids[0], format!("Fpriority {prio} shared by {}", ids.join(", ")));
            }
        }
    }

    let mut seen = BTreeSet::new();
    for c in &net.channels {
        if !seen.insert(c.id.as_str()) {
            push(&c.id, "duplicate channel id".to_string());
        }
        if c.writer == c.reader {
            push(&c.id, format!("writer and reader are both `{}`", c.writer));
        }
        for (role, end) in [("writer", &c.writer), ("reader", &c.reader)] {
            if net.process(end).is_none() {
                push(&c.id, format!("{role} `{end}` is not a process"));
            }
        }
        if let ChannelKind::Mailbox { length: 0 } = c.kind {
            push(&c.id, "mailbox length must be at least 1".to_string());
        }
    }

    for p in net.processes.iter().filter(|p| p.kind == ProcessKind::Sporadic) {
        match net.couplings.get(&p.id) {
            None => push(&p.id, "sporadic process is not coupled to a periodic process".to_string()),
            Some(target) => match net.process(target) {
                None => push(&p.id, format!("coupled to unknown process `{target}`")),
                Some(t) if t.kind != ProcessKind::Periodic => {
                    push(&p.id, format!("coupled to `{target}`, which is not periodic"))
                }
                Some(_) => {
                    let n = net.channels.iter().filter(|c| c.connects(&p.id, target)).count();
                    if n != 1 {
                        push(
                            &p.id,
                            format!("expected exactly one channel to coupled process `{target}`, found {n}"),
                        );
                    }
                }
            },
        }
    }
    for key in net.couplings.keys() {
        match net.process(key) {
            None => push(key, "coupling names an unknown process".to_string()),
            Some(p) if p.kind != ProcessKind::Sporadic => {
                push(key, "coupling source is not a sporadic process".to_string())
            }
            Some(_) => {}
        }
    }

    out.sort();
    out
}

/// Whether `p` functionally precedes `q`: `p` has the smaller priority index
/// and the two share a channel that carries a priority arc.
pub fn fp_precedes(net: &NetworkModel, p: &str, q: &str) -> Result<bool, ModelError> {
    if p == q {
        return Err(ModelError::Reflexive(p.to_string()));
    }
    let pp = net.require(p)?;
    let qq = net.require(q)?;
    Ok(pp.fpriority < qq.fpriority
        && net.channels.iter().any(|c| c.ordered && c.connects(p, q)))
}

/// Least common multiple of all periods (minimal inter-arrival times for
/// sporadic processes).
pub fn hyperperiod(net: &NetworkModel) -> Result<Micros, ModelError> {
    if net.processes.is_empty() {
        return Err(ModelError::Empty);
    }
    net.processes.iter().try_fold(Micros(1), |acc, p| {
        if p.period.is_zero() {
            Err(ModelError::ZeroPeriod(p.id.clone()))
        } else {
            Ok(Micros(acc.0.lcm(&p.period.0)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_tasks() -> NetworkModel {
        NetworkModel {
            processes: vec![
                ProcessSpec::periodic("split", 25, 1, 1, "source(1)"),
                ProcessSpec::periodic("A", 25, 12, 2, "sink"),
                ProcessSpec::periodic("B", 25, 6, 3, "sink"),
            ],
            channels: vec![
                ChannelSpec::mailbox("toA", "split", "A", 2),
                ChannelSpec::mailbox("toB", "split", "B", 2),
            ],
            couplings: BTreeMap::new(),
        }
    }

    #[test]
    fn valid_model_has_no_violations() {
        assert!(validate_network(&three_tasks()).is_empty());
    }

    #[test]
    fn shared_priority_is_one_violation_naming_both() {
        let mut net = three_tasks();
        net.processes[1].fpriority = 1;
        let v = validate_network(&net);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("A") && v[0].message.contains("split"), "{v:?}");
    }

    #[test]
    fn uncoupled_sporadic_is_one_violation() {
        let mut net = three_tasks();
        net.processes[0].kind = ProcessKind::Sporadic;
        let v = validate_network(&net);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "split");
    }

    #[test]
    fn coupling_needs_exactly_one_channel() {
        let mut net = three_tasks();
        net.processes[0].kind = ProcessKind::Sporadic;
        net.couplings.insert("split".into(), "A".into());
        assert!(validate_network(&net).is_empty());
        net.channels.push(ChannelSpec::blackboard("back", "A", "split"));
        assert_eq!(validate_network(&net).len(), 1);
    }

    #[test]
    fn violations_are_sorted_by_entity() {
        let mut net = three_tasks();
        net.processes[2].deadline = Micros::ZERO;
        net.channels[0].reader = "nobody".into();
        net.channels.push(ChannelSpec::mailbox("loop", "A", "A", 0));
        let v = validate_network(&net);
        let entities: Vec<_> = v.iter().map(|v| v.entity.as_str()).collect();
        let mut sorted = entities.clone();
        sorted.sort();
        assert_eq!(entities, sorted);
        assert_eq!(v.len(), 5, "{v:?}");
    }

    #[test]
    fn fp_relation() {
        let net = three_tasks();
        assert_eq!(fp_precedes(&net, "split", "A"), Ok(true));
        assert_eq!(fp_precedes(&net, "A", "split"), Ok(false));
        // No channel between A and B.
        assert_eq!(fp_precedes(&net, "A", "B"), Ok(false));
        assert_eq!(fp_precedes(&net, "A", "A"), Err(ModelError::Reflexive("A".into())));
        assert!(matches!(fp_precedes(&net, "A", "Z"), Err(ModelError::UnknownProcess(_))));
    }

    #[test]
    fn unordered_channel_carries_no_arc() {
        let mut net = three_tasks();
        net.channels[0].ordered = false;
        assert_eq!(fp_precedes(&net, "split", "A"), Ok(false));
        assert_eq!(fp_precedes(&net, "split", "B"), Ok(true));
    }

    #[test]
    fn hyperperiods() {
        assert_eq!(hyperperiod(&three_tasks()), Ok(Micros::from_ms(25)));
        let mut net = three_tasks();
        net.processes[0].period = Micros::from_ms(2);
        net.processes[1].period = Micros::from_ms(3);
        net.processes.truncate(2);
        assert_eq!(hyperperiod(&net), Ok(Micros::from_ms(6)));
        assert_eq!(hyperperiod(&NetworkModel::default()), Err(ModelError::Empty));
    }
}
