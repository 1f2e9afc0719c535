//! Bundled example networks and the golden files derived from them.

use crate::io::{parse_event_trace, parse_model};
use crate::model::{validate_network, NetworkModel};
use crate::sim::EventTrace;

pub const EXAMPLE_NAMES: [&str; 4] = ["fig1", "three_tasks", "gnc", "gnc_pipelined"];

/// A golden file: the stdout of one CLI invocation, stored under
/// `models/golden/`. `{model}` and `{events}` in `args` stand for the
/// bundle's files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Golden {
    pub file: &'static str,
    pub args: &'static [&'static str],
}

#[derive(Debug, Clone)]
pub struct ExampleBundle {
    pub name: &'static str,
    pub model_file: &'static str,
    pub model: NetworkModel,
    pub events_file: Option<&'static str>,
    pub events: Option<EventTrace>,
    pub goldens: &'static [Golden],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExampleError {
    #[error("unknown example `{0}` (expected one of fig1, three_tasks, gnc, gnc_pipelined)")]
    Unknown(String),
    #[error("bundled example `{name}` is broken: {detail}")]
    Broken { name: String, detail: String },
}

const FIG1_GOLDENS: &[Golden] = &[Golden {
    file: "fig1.trace",
    args: &["simulate", "--model", "{model}", "--events", "{events}", "--horizon", "150", "--cores", "2", "--delta", "1000"],
}];

const THREE_TASKS_GOLDENS: &[Golden] = &[
    Golden {
        file: "three_tasks_c1_d1000.txt",
        args: &["schedule", "--model", "{model}", "--cores", "1", "--delta", "1000"],
    },
    Golden {
        file: "three_tasks_c3_d1000.sched.csv",
        args: &["schedule", "--model", "{model}", "--cores", "3", "--delta", "1000", "--format", "csv"],
    },
    Golden {
        file: "three_tasks_c3_d1000.svg",
        args: &["gantt", "--model", "{model}", "--cores", "3", "--delta", "1000"],
    },
];

const GNC_GOLDENS: &[Golden] = &[
    Golden {
        file: "gnc.tg",
        args: &["taskgraph", "--model", "{model}"],
    },
    Golden {
        file: "gnc_c4_d1000.sched.csv",
        args: &["schedule", "--model", "{model}", "--cores", "4", "--delta", "1000", "--format", "csv"],
    },
];

const GNC_PIPELINED_GOLDENS: &[Golden] = &[
    Golden {
        file: "gnc_pipelined.tg",
        args: &["taskgraph", "--model", "{model}"],
    },
    Golden {
        file: "gnc_pipelined_asap_c4_d1000.txt",
        args: &["asap", "--model", "{model}", "--cores", "4", "--delta", "1000"],
    },
    Golden {
        file: "gnc_pipelined_asap_c4_d1000.svg",
        args: &["asap", "--model", "{model}", "--cores", "4", "--delta", "1000", "--format", "svg"],
    },
];

/// Parse and validate one of [`EXAMPLE_NAMES`].
pub fn load_example(name: &str) -> Result<ExampleBundle, ExampleError> {
    let (name, model_file, model_text, events_file, events_text, goldens): (
        &'static str,
        &'static str,
        &str,
        Option<&'static str>,
        Option<&str>,
        &'static [Golden],
    ) = match name {
        "fig1" => (
            "fig1",
            "fig1.fppn",
            include_str!("../models/fig1.fppn"),
            Some("fig1.events"),
            Some(include_str!("../models/fig1.events")),
            FIG1_GOLDENS,
        ),
        "three_tasks" => (
            "three_tasks",
            "three_tasks.fppn",
            include_str!("../models/three_tasks.fppn"),
            None,
            None,
            THREE_TASKS_GOLDENS,
        ),
        "gnc" => ("gnc", "gnc.fppn", include_str!("../models/gnc.fppn"), None, None, GNC_GOLDENS),
        "gnc_pipelined" => (
            "gnc_pipelined",
            "gnc_pipelined.fppn",
            include_str!("../models/gnc_pipelined.fppn"),
            None,
            None,
            GNC_PIPELINED_GOLDENS,
        ),
        other => return Err(ExampleError::Unknown(other.to_string())),
    };
    let broken = |detail: String| ExampleError::Broken {
        name: name.to_string(),
        detail,
    };
    let model = parse_model(model_text).map_err(|e| broken(e.to_string()))?;
    if let Some(v) = validate_network(&model).first() {
        return Err(broken(v.to_string()));
    }
    let events = events_text
        .map(|t| parse_event_trace(t, &model))
        .transpose()
        .map_err(|e| broken(e.to_string()))?;
    Ok(ExampleBundle {
        name,
        model_file,
        model,
        events_file,
        events,
        goldens,
    })
}
