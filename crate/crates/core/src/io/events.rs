//! `.events` files: one `time_us process_id payload` line per event.

use std::fmt::Write as _;

use super::{tokens, ParseError};
use crate::model::NetworkModel;
use crate::sim::{Event, EventError, EventTrace};
use crate::time::Micros;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EventParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: EventError },
}

/// Parse and validate an event trace against `net`.
pub fn parse_event_trace(text: &str, net: &NetworkModel) -> Result<EventTrace, EventParseError> {
    let mut events = Vec::new();
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokens(raw);
        match toks.as_slice() {
            [] => continue,
            [(ct, time), (_, process), (cp, payload)] => {
                let time = time
                    .parse::<Micros>()
                    .map_err(|_| ParseError::new(line, *ct, format!("bad time `{time}`")))?;
                let payload = payload
                    .parse()
                    .map_err(|_| ParseError::new(line, *cp, format!("bad payload `{payload}`")))?;
                events.push(Event {
                    time,
                    process: process.to_string(),
                    payload,
                });
                lines.push(line);
            }
            [(c, _), ..] => {
                return Err(ParseError::new(line, *c, "expected `time_us process payload`").into());
            }
        }
    }
    let trace = EventTrace::new(events);
    // Re-run the checks incrementally to report the first offending line.
    if let Err(source) = trace.validate(net) {
        let mut prefix = EventTrace::default();
        for (e, &line) in trace.events.iter().zip(&lines) {
            prefix.events.push(e.clone());
            if prefix.validate(net).is_err() {
                return Err(EventParseError::Invalid { line, source });
            }
        }
    }
    Ok(trace)
}

pub fn emit_event_trace(trace: &EventTrace) -> String {
    let mut out = String::new();
    for e in &trace.events {
        let _ = writeln!(out, "{} {} {}", e.time.as_us(), e.process, e.payload);
    }
    out
}
