//! `.trace` execution traces, one record per line:
//!
//! ```text
//! <time_us> start <job> <core>
//! <time_us> end <job>
//! <time_us> read <job> <channel> <value|->
//! <time_us> write <job> <channel> <value> <accepted|dropped>
//! <time_us> output <process> <value>
//! ```

use std::fmt::Write as _;

use super::{is_valid_id, parse_job, tokens, ParseError};
use crate::channel::WriteStatus;
use crate::sim::{ExecutionTrace, TraceEvent, TraceRecord};
use crate::time::Micros;

pub fn emit_trace(trace: &ExecutionTrace) -> String {
    let mut out = String::new();
    for r in &trace.records {
        let t = r.time.as_us();
        let _ = match &r.event {
            TraceEvent::JobStart { job, core } => writeln!(out, "{t} start {job} {core}"),
            TraceEvent::JobEnd { job } => writeln!(out, "{t} end {job}"),
            TraceEvent::Read { job, channel, value } => match value {
                Some(v) => writeln!(out, "{t} read {job} {channel} {v}"),
                None => writeln!(out, "{t} read {job} {channel} -"),
            },
            TraceEvent::Write {
                job,
                channel,
                value,
                status,
            } => writeln!(out, "{t} write {job} {channel} {value} {}", status.as_str()),
            TraceEvent::Output { process, value } => writeln!(out, "{t} output {process} {value}"),
        };
    }
    out
}

pub fn parse_trace(text: &str) -> Result<ExecutionTrace, ParseError> {
    let mut records = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let err = |i: usize, what: &str| {
            let (c, t) = toks.get(i).copied().unwrap_or((raw.len() + 1, ""));
            ParseError::new(line, c, format!("{what}, got `{t}`"))
        };
        let tok = |i: usize| toks.get(i).map(|&(_, t)| t);
        let time: Micros = tok(0).and_then(|t| t.parse().ok()).ok_or_else(|| err(0, "expected time"))?;
        let job = |i: usize| tok(i).and_then(parse_job).ok_or_else(|| err(i, "expected job"));
        let id = |i: usize| {
            tok(i)
                .filter(|t| is_valid_id(t))
                .map(str::to_string)
                .ok_or_else(|| err(i, "expected id"))
        };
        let int = |i: usize| tok(i).and_then(|t| t.parse::<i64>().ok()).ok_or_else(|| err(i, "expected integer"));
        let (event, arity) = match tok(1) {
            Some("start") => {
                let core = tok(3).and_then(|t| t.parse().ok()).ok_or_else(|| err(3, "expected core"))?;
                (TraceEvent::JobStart { job: job(2)?, core }, 4)
            }
            Some("end") => (TraceEvent::JobEnd { job: job(2)? }, 3),
            Some("read") => {
                let value = match tok(4) {
                    Some("-") => None,
                    _ => Some(int(4)?),
                };
                (
                    TraceEvent::Read {
                        job: job(2)?,
                        channel: id(3)?,
                        value,
                    },
                    5,
                )
            }
            Some("write") => {
                let status = match tok(5) {
                    Some("accepted") => WriteStatus::Accepted,
                    Some("dropped") => WriteStatus::Dropped,
                    _ => return Err(err(5, "expected write status")),
                };
                (
                    TraceEvent::Write {
                        job: job(2)?,
                        channel: id(3)?,
                        value: int(4)?,
                        status,
                    },
                    6,
                )
            }
            Some("output") => (
                TraceEvent::Output {
                    process: id(2)?,
                    value: int(3)?,
                },
                4,
            ),
            _ => return Err(err(1, "expected record kind")),
        };
        if toks.len() != arity {
            return Err(err(arity, "unexpected trailing field"));
        }
        records.push(TraceRecord { time, event });
    }
    Ok(ExecutionTrace { records })
}
