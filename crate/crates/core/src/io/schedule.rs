//! `.sched.csv` schedule tables.

use std::fmt::Write as _;

use super::{is_valid_id, ParseError};
use crate::scheduler::{EntryKind, ScheduleEntry, ScheduleTable, TransitionTag};
use crate::taskgraph::JobId;
use crate::time::Micros;

pub const SCHEDULE_HEADER: &str = "kind,process,k,core,start_us,duration_us,tag";

/// One row per entry, sorted by `(start, core)`, after a header row.
pub fn emit_schedule(table: &ScheduleTable) -> String {
    let mut rows: Vec<&ScheduleEntry> = table.entries.iter().collect();
    rows.sort_by_key(|e| (e.start, e.core));
    let mut out = format!("{SCHEDULE_HEADER}\n");
    for e in rows {
        let (kind, tag) = match e.kind {
            EntryKind::Compute => ("compute", ""),
            EntryKind::Transition(t) => ("transition", t.as_str()),
        };
        let _ = writeln!(
            out,
            "{kind},{},{},{},{},{},{tag}",
            e.job.process,
            e.job.k,
            e.core,
            e.start.as_us(),
            e.duration.as_us()
        );
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Vec<ScheduleEntry>, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SCHEDULE_HEADER => {}
        _ => return Err(ParseError::new(1, 1, format!("expected header `{SCHEDULE_HEADER}`"))),
    }
    let mut entries = Vec::new();
    for (n, raw) in lines {
        let line = n + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != 7 {
            return Err(ParseError::new(line, 1, format!("expected 7 fields, got {}", cells.len())));
        }
        // Column of cell i.
        let col = |i: usize| 1 + cells[..i].iter().map(|c| c.len() + 1).sum::<usize>();
        let num = |i: usize| -> Result<u64, ParseError> {
            cells[i]
                .parse()
                .map_err(|_| ParseError::new(line, col(i), format!("expected an integer, got `{}`", cells[i])))
        };
        let kind = match (cells[0], cells[6]) {
            ("compute", "") => EntryKind::Compute,
            ("transition", tag) => EntryKind::Transition(
                TransitionTag::parse(tag)
                    .ok_or_else(|| ParseError::new(line, col(6), format!("unknown transition tag `{tag}`")))?,
            ),
            (kind, _) => return Err(ParseError::new(line, 1, format!("bad entry kind/tag `{kind}`"))),
        };
        if !is_valid_id(cells[1]) {
            return Err(ParseError::new(line, col(1), format!("`{}` is not a valid id", cells[1])));
        }
        let k = u32::try_from(num(2)?).map_err(|_| ParseError::new(line, col(2), "invocation out of range"))?;
        entries.push(ScheduleEntry {
            kind,
            job: JobId::new(cells[1], k),
            core: num(3)? as usize,
            start: Micros(num(4)?),
            duration: Micros(num(5)?),
        });
    }
    Ok(entries)
}
