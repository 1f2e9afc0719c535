//! Fixed Priority Process Networks (FPPN) at desk scale.
//!
//! The crate follows the design flow of a process network from model to
//! time-triggered multicore table:
//!
//! 1. [`model`]: processes, mailbox/blackboard channels, functional
//!    priorities and their structural validation.
//! 2. [`taskgraph`]: unrolling the network into jobs over a hyperperiod and
//!    deriving precedence edges from functional priority.
//! 3. [`scheduler`]: list scheduling with per-job engine transition overhead,
//!    table checking and minimum core search.
//! 4. [`sim`]: deterministic execution of scripted behaviors under a table
//!    or the ASAP policy, and trace comparison.
//! 5. [`io`]: text formats for every artifact plus SVG Gantt charts.

pub mod behavior;
pub mod channel;
pub mod cli;
pub mod examples;
pub mod io;
pub mod model;
pub mod scheduler;
pub mod sim;
pub mod taskgraph;
pub mod time;

pub use channel::{channel_read, channel_write, ChannelState, Value, WriteStatus};
pub use model::{fp_precedes, hyperperiod, validate_network, ChannelKind, ChannelSpec, NetworkModel, ProcessKind, ProcessSpec};
pub use scheduler::{check_schedule, list_schedule, min_cores, priority_order, ScheduleTable, Verdict};
pub use sim::{compare_traces, run_asap, simulate, Comparison, EventTrace, ExecutionTrace};
pub use taskgraph::{build_task_graph, derive_edges, unroll_jobs, Job, JobId, TaskGraph};
pub use time::Micros;
