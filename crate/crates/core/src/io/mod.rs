//! Text formats for every artifact.
//!
//! | extension    | content                     |
//! |--------------|-----------------------------|
//! | `.fppn`      | network model               |
//! | `.events`    | sporadic event trace        |
//! | `.tg`        | task graph listing          |
//! | `.sched.csv` | schedule table              |
//! | `.trace`     | execution trace             |
//! | `.svg`       | Gantt chart                 |
//!
//! All times in the machine formats are integer microseconds. The model
//! format uses milliseconds (up to three decimals) to match how periods and
//! WCETs are usually quoted.

mod events;
mod gantt;
mod model;
mod schedule;
mod taskgraph;
mod trace;

use std::fmt;

pub use events::{emit_event_trace, parse_event_trace, EventParseError};
pub use gantt::{emit_gantt, emit_gantt_trace};
pub use model::{emit_model, parse_model, ModelParseError};
pub use schedule::{emit_schedule, parse_schedule};
pub use taskgraph::{emit_task_graph, parse_task_graph};
pub use trace::{emit_trace, parse_trace};

/// A located syntax or content error.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column of the offending token.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Ids are restricted to `[A-Za-z0-9_]+` so no format needs quoting.
pub fn is_valid_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Whitespace-separated tokens of a line with their 1-based columns.
/// Everything after `#` is a comment.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parse `[A-Za-z0-9_]+[k]`.
pub(crate) fn parse_job(s: &str) -> Option<crate::taskgraph::JobId> {
    let (process, rest) = s.split_once('[')?;
    let k = rest.strip_suffix(']')?.parse().ok()?;
    is_valid_id(process).then(|| crate::taskgraph::JobId::new(process, k))
}
