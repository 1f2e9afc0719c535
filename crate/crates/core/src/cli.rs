//! Command-line front end.
//!
//! Exit codes: 0 on success or a feasible result, 1 on violations or an
//! infeasible result, 2 on usage, I/O and parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::behavior::BehaviorRegistry;
use crate::io::{
    emit_gantt, emit_gantt_trace, emit_schedule, emit_task_graph, emit_trace, parse_event_trace, parse_model,
};
use crate::model::{hyperperiod, validate_network, NetworkModel};
use crate::scheduler::{
    asap_schedule, frame_completions, list_schedule, min_cores, EntryKind, ScheduleTable,
};
use crate::sim::{simulate, EventTrace};
use crate::taskgraph::{build_task_graph, TaskGraph};
use crate::time::Micros;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fppn", version, about = "Fixed Priority Process Network design flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural rules of a model.
    Validate {
        /// Network model (.fppn).
        #[arg(long)]
        model: PathBuf,
    },
    /// Unroll the task graph over the horizon.
    Taskgraph {
        #[command(flatten)]
        common: Common,
    },
    /// Build the static list schedule.
    Schedule {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        platform: Platform,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Dispatch with the online ASAP policy.
    Asap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        platform: Platform,
        /// Sporadic event trace (.events).
        #[arg(long)]
        events: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Execute the list schedule and print the execution trace.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        platform: Platform,
        /// Sporadic event trace (.events).
        #[arg(long)]
        events: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Render the list schedule as an SVG Gantt chart.
    Gantt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        platform: Platform,
    },
    /// Smallest total core count with a feasible list schedule.
    Mincores {
        #[command(flatten)]
        common: Common,
        /// Engine transition cost in microseconds.
        #[arg(long, default_value_t = 0)]
        delta: u64,
        /// Largest total core count to try.
        #[arg(long, default_value_t = 8)]
        max_cores: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Network model (.fppn).
    #[arg(long)]
    model: PathBuf,
    /// Horizon in milliseconds; defaults to one hyperperiod.
    #[arg(long, value_parser = parse_horizon)]
    horizon: Option<Micros>,
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Platform {
    /// Total cores, engine core included.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    cores: u64,
    /// Engine transition cost in microseconds.
    #[arg(long, default_value_t = 0)]
    delta: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Svg,
}

fn parse_horizon(s: &str) -> Result<Micros, String> {
    Micros::parse_ms(s).map_err(|e| e.to_string())
}

/// A failure that maps onto exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Write `text` to `path`, or to stdout when no path is given.
    fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<(), Usage> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| Usage(format!("{}: {e}", p.display()))),
            None => self.out.write_all(text.as_bytes()).map_err(Usage::from),
        }
    }
}

/// Run the CLI with `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
            return code;
        }
    };
    let mut ctx = Ctx { out, err };
    match execute(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn load_model(path: &Path) -> Result<NetworkModel, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Usage(format!("{}:{e}", path.display())))
}

fn load_events(path: Option<&Path>, net: &NetworkModel) -> Result<EventTrace, Usage> {
    match path {
        None => Ok(EventTrace::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            parse_event_trace(&text, net).map_err(|e| Usage(format!("{}: {e}", p.display())))
        }
    }
}

/// Load, validate and unroll. `Ok(Err(code))` short-circuits with a domain exit code.
fn prepare(common: &Common, ctx: &mut Ctx<'_>) -> Result<Result<(NetworkModel, Micros, TaskGraph), i32>, Usage> {
    let net = load_model(&common.model)?;
    let violations = validate_network(&net);
    if !violations.is_empty() {
        for v in &violations {
            let _ = writeln!(ctx.err, "{v}");
        }
        return Ok(Err(EXIT_INFEASIBLE));
    }
    let horizon = match common.horizon {
        Some(h) => h,
        None => hyperperiod(&net)?,
    };
    let tg = build_task_graph(&net, horizon)?;
    Ok(Ok((net, horizon, tg)))
}

fn verdict_code(table: &ScheduleTable) -> i32 {
    if table.verdict.is_feasible() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

/// Human-readable table listing followed by the verdict line.
pub fn table_text(table: &ScheduleTable) -> String {
    let mut s = format!("# cores={} delta={}\n", table.cores, table.delta);
    for e in &table.entries {
        let what = match e.kind {
            EntryKind::Compute => "compute",
            EntryKind::Transition(t) => t.as_str(),
        };
        let _ = writeln!(
            s,
            "{}..{} ms core {} {} {what}",
            e.start.ms_string(),
            e.end().ms_string(),
            e.core,
            e.job
        );
    }
    let _ = writeln!(s, "{}", table.verdict);
    s
}

/// Verdict, makespan and per-frame completion, the frame being the
/// shortest period of the network.
pub fn summary_text(table: &ScheduleTable, tg: &TaskGraph, net: &NetworkModel) -> String {
    let frame = net.processes.iter().map(|p| p.period).min().unwrap_or(Micros(1));
    let frames = frame_completions(table, tg, frame);
    let mut s = format!("{}\nmakespan: {}\nframe: {}\n", table.verdict, table.makespan(), frame);
    for (start, done) in &frames {
        let _ = writeln!(s, "frame {}: completes {} after start", start.ms_string(), done);
    }
    let worst = frames.iter().map(|&(_, d)| d).max().unwrap_or_default();
    let _ = writeln!(s, "max frame completion: {worst}");
    s
}

fn render(table: &ScheduleTable, format: Format) -> String {
    match format {
        Format::Text => table_text(table),
        Format::Csv => emit_schedule(table),
        Format::Svg => emit_gantt(table),
    }
}

fn execute(cmd: Command, ctx: &mut Ctx<'_>) -> Result<i32, Usage> {
    match cmd {
        Command::Validate { model } => {
            let net = load_model(&model)?;
            let violations = validate_network(&net);
            for v in &violations {
                let _ = writeln!(ctx.out, "{v}");
            }
            if violations.is_empty() {
                let _ = writeln!(ctx.out, "valid");
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_INFEASIBLE)
            }
        }
        Command::Taskgraph { common } => {
            let (_, _, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            ctx.emit(common.out.as_deref(), &emit_task_graph(&tg))?;
            Ok(EXIT_OK)
        }
        Command::Schedule {
            common,
            platform,
            format,
        } => {
            let (net, _, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let table = list_schedule(&tg, &net, platform.cores as usize, Micros(platform.delta))?;
            finish_table(ctx, &table, format, common.out.as_deref())
        }
        Command::Gantt { common, platform } => {
            let (net, _, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let table = list_schedule(&tg, &net, platform.cores as usize, Micros(platform.delta))?;
            finish_table(ctx, &table, Format::Svg, common.out.as_deref())
        }
        Command::Asap {
            common,
            platform,
            events,
            format,
        } => {
            let (net, horizon, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let events = load_events(events.as_deref(), &net)?;
            let table = asap_schedule(&tg, &net, platform.cores as usize, Micros(platform.delta))?;
            // Execute as well so that bad behaviors or events surface here.
            simulate(&net, &BehaviorRegistry::new(), &table, &events, horizon)?;
            match format {
                Format::Text => ctx.emit(common.out.as_deref(), &summary_text(&table, &tg, &net))?,
                other => finish_table(ctx, &table, other, common.out.as_deref()).map(|_| ())?,
            }
            Ok(verdict_code(&table))
        }
        Command::Simulate {
            common,
            platform,
            events,
            format,
        } => {
            let (net, horizon, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let events = load_events(events.as_deref(), &net)?;
            let table = list_schedule(&tg, &net, platform.cores as usize, Micros(platform.delta))?;
            let trace = simulate(&net, &BehaviorRegistry::new(), &table, &events, horizon)?;
            let text = match format {
                Format::Svg => emit_gantt_trace(&trace),
                _ => emit_trace(&trace),
            };
            ctx.emit(common.out.as_deref(), &text)?;
            if !table.verdict.is_feasible() {
                let _ = writeln!(ctx.err, "{}", table.verdict);
            }
            Ok(verdict_code(&table))
        }
        Command::Mincores {
            common,
            delta,
            max_cores,
        } => {
            let (net, _, tg) = match prepare(&common, ctx)? {
                Ok(x) => x,
                Err(code) => return Ok(code),
            };
            let text = match min_cores(&tg, &net, Micros(delta), max_cores)? {
                Some(n) => format!("{n}\n"),
                None => format!("none <= {max_cores}\n"),
            };
            ctx.emit(common.out.as_deref(), &text)?;
            Ok(if text.starts_with("none") {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            })
        }
    }
}

/// Write the table in `format`. When it goes to a file, the verdict is
/// echoed on stdout; CSV and SVG on stdout get the verdict on stderr.
fn finish_table(ctx: &mut Ctx<'_>, table: &ScheduleTable, format: Format, out: Option<&Path>) -> Result<i32, Usage> {
    ctx.emit(out, &render(table, format))?;
    if out.is_some() {
        let _ = writeln!(ctx.out, "{}", table.verdict);
    } else if format != Format::Text {
        let _ = writeln!(ctx.err, "{}", table.verdict);
    }
    Ok(verdict_code(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
    }

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("fppn").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["schedule"]).0, EXIT_USAGE);
        assert_eq!(call(&["schedule", "--model", "x", "--cores", "0"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["validate", "--model", "/nonexistent.fppn"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("schedule"));
    }

    #[test]
    fn validate_gnc() {
        let model = models().join("gnc.fppn");
        let (code, out, _) = call(&["validate", "--model", model.to_str().unwrap()]);
        assert_eq!((code, out.as_str()), (EXIT_OK, "valid\n"));
    }

    #[test]
    fn bad_horizon_is_usage_error() {
        let model = models().join("three_tasks.fppn");
        let m = model.to_str().unwrap();
        assert_eq!(call(&["taskgraph", "--model", m, "--horizon", "30"]).0, EXIT_USAGE);
        assert_eq!(call(&["taskgraph", "--model", m, "--horizon", "abc"]).0, EXIT_USAGE);
    }

    #[test]
    fn mincores_prints_count() {
        let model = models().join("three_tasks.fppn");
        let m = model.to_str().unwrap();
        assert_eq!(call(&["mincores", "--model", m, "--delta", "1000"]), (0, "3\n".into(), String::new()));
        assert_eq!(call(&["mincores", "--model", m, "--delta", "1000", "--max-cores", "2"]).0, EXIT_INFEASIBLE);
    }
}
