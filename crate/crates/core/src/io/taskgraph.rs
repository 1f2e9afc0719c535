//! `.tg` task graph listings.
//!
//! ```text
//! job <process> <k> <arrival_us> <deadline_us> <wcet_us>
//! edge <process>[<k>] <process>[<k>]
//! ```

use std::fmt::Write as _;

use super::{is_valid_id, parse_job, tokens, ParseError};
use crate::taskgraph::{Job, JobId, TaskGraph};
use crate::time::Micros;

pub fn emit_task_graph(tg: &TaskGraph) -> String {
    let mut out = String::new();
    for j in &tg.jobs {
        let _ = writeln!(
            out,
            "job {} {} {} {} {}",
            j.id.process,
            j.id.k,
            j.arrival.as_us(),
            j.deadline.as_us(),
            j.wcet.as_us()
        );
    }
    for &(u, v) in &tg.edges {
        let _ = writeln!(out, "edge {} {}", tg.jobs[u].id, tg.jobs[v].id);
    }
    out
}

pub fn parse_task_graph(text: &str) -> Result<TaskGraph, ParseError> {
    let mut jobs = Vec::new();
    let mut raw_edges = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokens(raw);
        match toks.as_slice() {
            [] => {}
            [(_, "job"), (cp, p), rest @ ..] if rest.len() == 4 => {
                if !is_valid_id(p) {
                    return Err(ParseError::new(line, *cp, format!("`{p}` is not a valid id")));
                }
                let mut nums = [0u64; 4];
                for (slot, (c, t)) in nums.iter_mut().zip(rest) {
                    *slot = t
                        .parse()
                        .map_err(|_| ParseError::new(line, *c, format!("expected an integer, got `{t}`")))?;
                }
                let k = u32::try_from(nums[0]).map_err(|_| ParseError::new(line, rest[0].0, "k out of range"))?;
                jobs.push(Job {
                    id: JobId::new(p, k),
                    arrival: Micros(nums[1]),
                    deadline: Micros(nums[2]),
                    wcet: Micros(nums[3]),
                });
            }
            [(_, "edge"), (ca, a), (cb, b)] => {
                let a = parse_job(a).ok_or_else(|| ParseError::new(line, *ca, format!("bad job `{a}`")))?;
                let b = parse_job(b).ok_or_else(|| ParseError::new(line, *cb, format!("bad job `{b}`")))?;
                raw_edges.push((line, a, b));
            }
            [(c, t), ..] => return Err(ParseError::new(line, *c, format!("unexpected record `{t}`"))),
        }
    }
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = jobs.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(ParseError::new(1, 1, format!("duplicate job {}", w[0].id)));
    }
    let mut tg = TaskGraph { jobs, edges: Vec::new() };
    for (line, a, b) in raw_edges {
        let u = tg.index_of(&a).ok_or_else(|| ParseError::new(line, 1, format!("unknown job {a}")))?;
        let v = tg.index_of(&b).ok_or_else(|| ParseError::new(line, 1, format!("unknown job {b}")))?;
        tg.edges.push((u, v));
    }
    tg.edges.sort_unstable();
    Ok(tg)
}
