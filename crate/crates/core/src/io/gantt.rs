//! Gantt chart SVG rendering, one lane per core with the engine core on top.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::scheduler::{EntryKind, ScheduleTable};
use crate::sim::{ExecutionTrace, TraceEvent};
use crate::time::Micros;

const LEFT: f64 = 70.0;
const TOP: f64 = 20.0;
const LANE: f64 = 28.0;
const PLOT_WIDTH: f64 = 1000.0;
const AXIS: f64 = 30.0;

struct Bar {
    core: usize,
    start: Micros,
    end: Micros,
    class: String,
    label: String,
    title: String,
}

/// Render a schedule table. An empty table renders the time axis only.
pub fn emit_gantt(table: &ScheduleTable) -> String {
    let bars: Vec<Bar> = table
        .entries
        .iter()
        .map(|e| {
            let (class, label, what) = match e.kind {
                EntryKind::Compute => (format!("job p-{}", e.job.process), e.job.to_string(), "compute".to_string()),
                EntryKind::Transition(t) => (format!("transition t-{}", t.as_str()), String::new(), t.as_str().to_string()),
            };
            Bar {
                core: e.core,
                start: e.start,
                end: e.end(),
                class,
                label,
                title: format!("{} {what} {}..{} ms", e.job, e.start.ms_string(), e.end().ms_string()),
            }
        })
        .collect();
    let lanes = if bars.is_empty() { 0 } else { table.cores };
    render(&bars, lanes)
}

/// Render the realized job intervals of an execution trace.
pub fn emit_gantt_trace(trace: &ExecutionTrace) -> String {
    let mut bars = Vec::new();
    for (i, r) in trace.records.iter().enumerate() {
        let TraceEvent::JobStart { job, core } = &r.event else {
            continue;
        };
        let end = trace.records[i..].iter().find_map(|e| match &e.event {
            TraceEvent::JobEnd { job: j } if j == job => Some(e.time),
            _ => None,
        });
        if let Some(end) = end.filter(|&end| end > r.time) {
            bars.push(Bar {
                core: *core,
                start: r.time,
                end,
                class: format!("job p-{}", job.process),
                label: job.to_string(),
                title: format!("{job} {}..{} ms", r.time.ms_string(), end.ms_string()),
            });
        }
    }
    let lanes = bars.iter().map(|b| b.core + 1).max().unwrap_or(0);
    render(&bars, lanes)
}

fn tick_step(span: Micros) -> Micros {
    const STEPS_MS: [u64; 12] = [1, 2, 5, 10, 20, 25, 50, 100, 200, 250, 500, 1000];
    let ms = span.as_us().div_ceil(1000).max(1);
    let step = STEPS_MS.iter().copied().find(|s| ms / s <= 20).unwrap_or(ms.div_ceil(20));
    Micros::from_ms(step)
}

fn render(bars: &[Bar], lanes: usize) -> String {
    let end = bars.iter().map(|b| b.end).max().unwrap_or_default();
    let step = tick_step(end);
    let span = Micros(end.as_us().div_ceil(step.as_us()).max(1) * step.as_us());
    let scale = PLOT_WIDTH / span.as_us() as f64;
    let x = |t: Micros| LEFT + t.as_us() as f64 * scale;
    let y = |core: usize| TOP + core as f64 * LANE;
    let axis_y = TOP + lanes as f64 * LANE;
    let width = LEFT + PLOT_WIDTH + 20.0;
    let height = axis_y + AXIS;

    let processes: BTreeSet<&str> = bars
        .iter()
        .filter_map(|b| b.class.strip_prefix("job p-"))
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="monospace" font-size="10">"#
    );
    s.push_str("<style>\n");
    s.push_str(".lane{fill:#f6f6f6;stroke:#ddd}\n.transition{fill:#555}\n.job{stroke:#222;stroke-width:0.5}\n.axis{stroke:#000}\n");
    for (i, p) in processes.iter().enumerate() {
        let _ = writeln!(s, ".p-{p}{{fill:hsl({},60%,70%)}}", (i * 67) % 360);
    }
    s.push_str("</style>\n");

    for core in 0..lanes {
        let _ = writeln!(
            s,
            r#"<rect class="lane" x="{LEFT:.2}" y="{:.2}" width="{PLOT_WIDTH:.2}" height="{LANE:.2}"/>"#,
            y(core)
        );
        let _ = writeln!(
            s,
            r#"<text x="4" y="{:.2}">Core {core}</text>"#,
            y(core) + LANE / 2.0 + 3.0
        );
    }
    for b in bars {
        let (x0, x1) = (x(b.start), x(b.end));
        let _ = writeln!(
            s,
            r#"<rect class="{}" x="{x0:.2}" y="{:.2}" width="{:.2}" height="{:.2}"><title>{}</title></rect>"#,
            b.class,
            y(b.core) + 3.0,
            x1 - x0,
            LANE - 6.0,
            b.title
        );
        if !b.label.is_empty() && x1 - x0 >= 6.5 * b.label.len() as f64 {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                x0 + 2.0,
                y(b.core) + LANE / 2.0 + 3.0,
                b.label
            );
        }
    }

    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{LEFT:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}"/>"#,
        LEFT + PLOT_WIDTH
    );
    let mut t = Micros::ZERO;
    while t <= span {
        let tx = x(t);
        let _ = writeln!(
            s,
            r#"<line class="axis" x1="{tx:.2}" y1="{axis_y:.2}" x2="{tx:.2}" y2="{:.2}"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            axis_y + 4.0,
            axis_y + 16.0,
            t.ms_string()
        );
        t += step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">time (ms)</text>"#,
        LEFT + PLOT_WIDTH,
        axis_y + 28.0
    );
    s.push_str("</svg>\n");
    s
}
