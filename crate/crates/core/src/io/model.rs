//! `.fppn` network model documents.
//!
//! ```text
//! [processes]
//! <id> FPPNClass=periodic Period=<ms> [Deadline=<ms>] [WCET=<ms>] Fpriority=<n> Behavior=<behavior>
//! <id> FPPNClass=sporadic MinInterArrival=<ms> [Deadline=<ms>] [WCET=<ms>] Fpriority=<n> Behavior=<behavior>
//!
//! [channels]
//! <id> FPPNClass=mailbox Writer=<id> Reader=<id> DataChannelSize=<bytes> DataChannelLength=<n> [Ordered=true|false]
//! <id> FPPNClass=blackboard Writer=<id> Reader=<id> DataChannelSize=<bytes> [Ordered=true|false]
//!
//! [couplings]
//! <sporadic id> <periodic id>
//! ```
//!
//! `Deadline` defaults to the period and `Ordered` to `true`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use super::{is_valid_id, tokens, ParseError};
use crate::model::{ChannelKind, ChannelSpec, NetworkModel, ProcessKind, ProcessSpec};
use crate::time::Micros;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ModelParseError {
    pub errors: Vec<ParseError>,
}

impl fmt::Display for ModelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Processes,
    Channels,
    Couplings,
}

/// Attribute list of one record, with column positions.
struct Attrs<'a, 'e> {
    line: usize,
    fields: BTreeMap<&'a str, (usize, &'a str)>,
    errors: &'e mut Vec<ParseError>,
}

impl<'a> Attrs<'a, '_> {
    fn take(&mut self, key: &str) -> Option<(usize, &'a str)> {
        self.fields.remove(key)
    }

    fn err(&mut self, column: usize, msg: String) {
        self.errors.push(ParseError::new(self.line, column, msg));
    }

    fn required(&mut self, key: &str, anchor: usize) -> Option<(usize, &'a str)> {
        let v = self.take(key);
        if v.is_none() {
            self.err(anchor, format!("missing field {key}"));
        }
        v
    }

    fn ms(&mut self, key: &str, value: Option<(usize, &str)>) -> Option<Micros> {
        let (col, text) = value?;
        match Micros::parse_ms(text) {
            Ok(m) => Some(m),
            Err(_) => {
                self.err(col, format!("{key} expects milliseconds, got `{text}`"));
                None
            }
        }
    }

    fn int<T: std::str::FromStr>(&mut self, key: &str, value: Option<(usize, &str)>) -> Option<T> {
        let (col, text) = value?;
        match text.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(col, format!("{key} expects an integer, got `{text}`"));
                None
            }
        }
    }

    fn id(&mut self, key: &str, value: Option<(usize, &'a str)>) -> Option<&'a str> {
        let (col, text) = value?;
        if is_valid_id(text) {
            Some(text)
        } else {
            self.err(col, format!("{key} `{text}` is not a valid id"));
            None
        }
    }

    fn finish(self) {
        for (key, (col, _)) in self.fields {
            self.errors
                .push(ParseError::new(self.line, col, format!("unknown field {key}")));
        }
    }
}

pub fn parse_model(text: &str) -> Result<NetworkModel, ModelParseError> {
    let mut errors = Vec::new();
    let mut net = NetworkModel::default();
    let mut section = Section::None;
    let mut process_ids = BTreeSet::new();
    let mut channel_ids = BTreeSet::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokens(raw);
        let Some(&(col, head)) = toks.first() else {
            continue;
        };
        if head.starts_with('[') {
            section = match head {
                "[processes]" => Section::Processes,
                "[channels]" => Section::Channels,
                "[couplings]" => Section::Couplings,
                _ => {
                    errors.push(ParseError::new(line, col, format!("unknown section {head}")));
                    Section::None
                }
            };
            if let Some(&(c, t)) = toks.get(1) {
                errors.push(ParseError::new(line, c, format!("unexpected `{t}` after section header")));
            }
            continue;
        }
        if !is_valid_id(head) {
            errors.push(ParseError::new(line, col, format!("`{head}` is not a valid id")));
            continue;
        }

        if section == Section::Couplings {
            match toks.as_slice() {
                [_, (c2, target)] => {
                    if !is_valid_id(target) {
                        errors.push(ParseError::new(line, *c2, format!("`{target}` is not a valid id")));
                    } else if net.couplings.insert(head.to_string(), target.to_string()).is_some() {
                        errors.push(ParseError::new(line, col, format!("`{head}` coupled twice")));
                    }
                }
                _ => errors.push(ParseError::new(line, col, "expected `<sporadic> <periodic>`")),
            }
            continue;
        }

        let mut fields = BTreeMap::new();
        for &(c, tok) in &toks[1..] {
            match tok.split_once('=') {
                Some((k, v)) if !k.is_empty() && !v.is_empty() => {
                    if fields.insert(k, (c, v)).is_some() {
                        errors.push(ParseError::new(line, c, format!("field {k} given twice")));
                    }
                }
                _ => errors.push(ParseError::new(line, c, format!("expected Key=Value, got `{tok}`"))),
            }
        }
        let mut attrs = Attrs {
            line,
            fields,
            errors: &mut errors,
        };
        match section {
            Section::None => {
                attrs.err(col, "record outside of any section".to_string());
                attrs.fields.clear();
            }
            Section::Processes => {
                if !process_ids.insert(head) {
                    attrs.err(col, format!("duplicate process id `{head}`"));
                }
                if let Some(p) = parse_process(head, col, &mut attrs) {
                    net.processes.push(p);
                }
            }
            Section::Channels => {
                if !channel_ids.insert(head) {
                    attrs.err(col, format!("duplicate channel id `{head}`"));
                }
                if let Some(c) = parse_channel(head, col, &mut attrs) {
                    net.channels.push(c);
                }
            }
            Section::Couplings => unreachable!(),
        }
        attrs.finish();
    }

    if errors.is_empty() && net.processes.is_empty() {
        errors.push(ParseError::new(1, 1, "document declares no processes"));
    }
    if errors.is_empty() {
        Ok(net)
    } else {
        Err(ModelParseError { errors })
    }
}

fn parse_process(id: &str, col: usize, a: &mut Attrs<'_, '_>) -> Option<ProcessSpec> {
    let class = a.required("FPPNClass", col);
    let kind = match class {
        Some((_, "periodic")) => Some(ProcessKind::Periodic),
        Some((_, "sporadic")) => Some(ProcessKind::Sporadic),
        Some((c, other)) => {
            a.err(c, format!("FPPNClass `{other}` is not a process class"));
            None
        }
        None => None,
    };
    let rate_key = match kind {
        Some(ProcessKind::Sporadic) => "MinInterArrival",
        _ => "Period",
    };
    let rate = a.required(rate_key, col);
    let period = a.ms(rate_key, rate);
    let deadline = match a.take("Deadline") {
        Some(v) => a.ms("Deadline", Some(v)),
        None => period,
    };
    let wcet = a.take("WCET").map(|v| a.ms("WCET", Some(v)));
    let prio = a.required("Fpriority", col);
    let fpriority = a.int("Fpriority", prio);
    let behavior = a.required("Behavior", col).map(|(_, b)| b.to_string());
    let wcet = match wcet {
        Some(None) => return None,
        Some(c) => c,
        None => None,
    };
    Some(ProcessSpec {
        id: id.to_string(),
        kind: kind?,
        period: period?,
        deadline: deadline?,
        wcet,
        fpriority: fpriority?,
        behavior: behavior?,
    })
}

fn parse_channel(id: &str, col: usize, a: &mut Attrs<'_, '_>) -> Option<ChannelSpec> {
    let class = a.required("FPPNClass", col);
    let writer = a.required("Writer", col);
    let writer = a.id("Writer", writer);
    let reader = a.required("Reader", col);
    let reader = a.id("Reader", reader);
    let size = a.required("DataChannelSize", col);
    let data_size = a.int("DataChannelSize", size);
    let length = a.take("DataChannelLength");
    let kind = match class {
        Some((_, "mailbox")) => {
            let len = if length.is_none() {
                a.err(col, "missing field DataChannelLength".to_string());
                None
            } else {
                a.int("DataChannelLength", length)
            };
            len.map(|length| ChannelKind::Mailbox { length })
        }
        Some((_, "blackboard")) => {
            if let Some((c, _)) = length {
                a.err(c, "DataChannelLength only applies to mailboxes".to_string());
            }
            Some(ChannelKind::Blackboard)
        }
        Some((c, other)) => {
            a.err(c, format!("FPPNClass `{other}` is not a channel class"));
            None
        }
        None => None,
    };
    let ordered = match a.take("Ordered") {
        None | Some((_, "true")) => Some(true),
        Some((_, "false")) => Some(false),
        Some((c, other)) => {
            a.err(c, format!("Ordered expects true or false, got `{other}`"));
            None
        }
    };
    Some(ChannelSpec {
        id: id.to_string(),
        kind: kind?,
        writer: writer?.to_string(),
        reader: reader?.to_string(),
        data_size: data_size?,
        ordered: ordered?,
    })
}

pub fn emit_model(net: &NetworkModel) -> String {
    let mut out = String::from("[processes]\n");
    for p in &net.processes {
        let (class, rate) = match p.kind {
            ProcessKind::Periodic => ("periodic", "Period"),
            ProcessKind::Sporadic => ("sporadic", "MinInterArrival"),
        };
        let _ = write!(
            out,
            "{} FPPNClass={class} {rate}={} Deadline={}",
            p.id,
            p.period.ms_string(),
            p.deadline.ms_string()
        );
        if let Some(c) = p.wcet {
            let _ = write!(out, " WCET={}", c.ms_string());
        }
        let _ = writeln!(out, " Fpriority={} Behavior={}", p.fpriority, p.behavior);
    }
    out.push_str("\n[channels]\n");
    for c in &net.channels {
        let _ = write!(
            out,
            "{} FPPNClass={} Writer={} Reader={} DataChannelSize={}",
            c.id,
            c.kind.as_str(),
            c.writer,
            c.reader,
            c.data_size
        );
        if let ChannelKind::Mailbox { length } = c.kind {
            let _ = write!(out, " DataChannelLength={length}");
        }
        let _ = writeln!(out, " Ordered={}", c.ordered);
    }
    if !net.couplings.is_empty() {
        out.push_str("\n[couplings]\n");
        for (s, p) in &net.couplings {
            let _ = writeln!(out, "{s} {p}");
        }
    }
    out
}
