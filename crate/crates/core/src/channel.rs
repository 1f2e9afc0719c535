//! Runtime channel contents and the non-blocking read/write rules.

use std::collections::VecDeque;

use crate::model::{ChannelKind, ChannelSpec};

/// Payload carried over channels and events.
pub type Value = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WriteStatus {
    Accepted,
    /// The mailbox was full; the value was discarded and the queue left as is.
    Dropped,
}

impl WriteStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            WriteStatus::Accepted => "accepted",
            WriteStatus::Dropped => "dropped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contents {
    Mailbox { queue: VecDeque<Value>, capacity: usize },
    Blackboard(Option<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelState {
    pub channel: String,
    pub contents: Contents,
}

impl ChannelState {
    /// Empty state for `spec`.
    pub fn new(spec: &ChannelSpec) -> Self {
        let contents = match spec.kind {
            ChannelKind::Mailbox { length } => Contents::Mailbox {
                queue: VecDeque::with_capacity(length),
                capacity: length,
            },
            ChannelKind::Blackboard => Contents::Blackboard(None),
        };
        ChannelState {
            channel: spec.id.clone(),
            contents,
        }
    }

    pub fn write(&mut self, v: Value) -> WriteStatus {
        match &mut self.contents {
            Contents::Blackboard(slot) => {
                *slot = Some(v);
                WriteStatus::Accepted
            }
            Contents::Mailbox { queue, capacity } => {
                if queue.len() < *capacity {
                    queue.push_back(v);
                    WriteStatus::Accepted
                } else {
                    WriteStatus::Dropped
                }
            }
        }
    }

    pub fn read(&mut self) -> Option<Value> {
        match &mut self.contents {
            Contents::Blackboard(slot) => *slot,
            Contents::Mailbox { queue, .. } => queue.pop_front(),
        }
    }

    /// Number of values currently held.
    pub fn len(&self) -> usize {
        match &self.contents {
            Contents::Blackboard(slot) => usize::from(slot.is_some()),
            Contents::Mailbox { queue, .. } => queue.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pure form of [`ChannelState::write`].
pub fn channel_write(state: &ChannelState, spec: &ChannelSpec, v: Value) -> (ChannelState, WriteStatus) {
    debug_assert_eq!(state.channel, spec.id);
    let mut next = state.clone();
    let status = next.write(v);
    (next, status)
}

/// Pure form of [`ChannelState::read`].
pub fn channel_read(state: &ChannelState, spec: &ChannelSpec) -> (Option<Value>, ChannelState) {
    debug_assert_eq!(state.channel, spec.id);
    let mut next = state.clone();
    let v = next.read();
    (v, next)
}
