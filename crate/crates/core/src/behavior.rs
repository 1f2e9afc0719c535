//! Scripted process behaviors.
//!
//! A behavior is a pure step function: given the values read from each
//! input channel (in channel-id order), the sporadic event payload if any,
//! and the process's local state, it yields the values to write on each
//! output channel, the external outputs, and the next local state.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::channel::Value;

pub type LocalState = Vec<Value>;

#[derive(Debug, Clone, Copy)]
pub struct StepInput<'a> {
    pub inputs: &'a [Option<Value>],
    pub event: Option<Value>,
    pub output_count: usize,
}

impl StepInput<'_> {
    /// Event payload followed by every present input.
    fn present(&self) -> impl Iterator<Item = Value> + '_ {
        self.event.into_iter().chain(self.inputs.iter().flatten().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Effects {
    /// One slot per output channel; `None` leaves the channel untouched.
    pub writes: Vec<Option<Value>>,
    /// Values emitted to the environment.
    pub outputs: Vec<Value>,
}

impl Effects {
    fn broadcast(v: Option<Value>, n: usize) -> Self {
        Effects {
            writes: vec![v; n],
            outputs: Vec::new(),
        }
    }
}

pub trait Behavior: Send + Sync {
    fn step(&self, input: StepInput<'_>, state: &LocalState) -> (Effects, LocalState);
}

/// Behaviors addressable by id in model files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    /// Forwards the first present value (event first, then inputs).
    Identity,
    /// Forwards the square of the first present value.
    Square,
    Constant(Value),
    /// Forwards the sum of all present values, if any.
    Sum,
    /// Emits every present value as an output; writes nothing.
    Sink,
    /// Writes the next element of a cyclic sequence on every invocation.
    Source(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown behavior `{0}`")]
pub struct UnknownBehavior(pub String);

impl Builtin {
    pub fn parse(id: &str) -> Result<Self, UnknownBehavior> {
        let bad = || UnknownBehavior(id.to_string());
        let args = |name: &str| -> Option<&str> {
            id.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
        };
        let values = |s: &str| -> Result<Vec<Value>, UnknownBehavior> {
            s.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
        };
        Ok(match id {
            "identity" => Builtin::Identity,
            "square" => Builtin::Square,
            "sum" => Builtin::Sum,
            "sink" => Builtin::Sink,
            _ => {
                if let Some(a) = args("constant") {
                    Builtin::Constant(a.trim().parse().map_err(|_| bad())?)
                } else if let Some(a) = args("source") {
                    Builtin::Source(values(a)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Identity => f.write_str("identity"),
            Builtin::Square => f.write_str("square"),
            Builtin::Constant(c) => write!(f, "constant({c})"),
            Builtin::Sum => f.write_str("sum"),
            Builtin::Sink => f.write_str("sink"),
            Builtin::Source(seq) => {
                let items: Vec<_> = seq.iter().map(Value::to_string).collect();
                write!(f, "source({})", items.join(","))
            }
        }
    }
}

impl Behavior for Builtin {
    fn step(&self, input: StepInput<'_>, state: &LocalState) -> (Effects, LocalState) {
        let n = input.output_count;
        match self {
            Builtin::Identity => (Effects::broadcast(input.present().next(), n), state.clone()),
            Builtin::Square => (
                Effects::broadcast(input.present().next().map(|v| v.wrapping_mul(v)), n),
                state.clone(),
            ),
            Builtin::Constant(c) => (Effects::broadcast(Some(*c), n), state.clone()),
            Builtin::Sum => {
                let mut any = false;
                let total = input.present().fold(0 as Value, |acc, v| {
                    any = true;
                    acc.wrapping_add(v)
                });
                (Effects::broadcast(any.then_some(total), n), state.clone())
            }
            Builtin::Sink => (
                Effects {
                    writes: vec![None; n],
                    outputs: input.present().collect(),
                },
                state.clone(),
            ),
            Builtin::Source(seq) => {
                let i = state.first().copied().unwrap_or(0);
                let v = if seq.is_empty() {
                    None
                } else {
                    Some(seq[i.rem_euclid(seq.len() as Value) as usize])
                };
                (Effects::broadcast(v, n), vec![i.wrapping_add(1)])
            }
        }
    }
}

/// Resolves behavior ids: registered custom behaviors first, then builtins.
#[derive(Clone, Default)]
pub struct BehaviorRegistry {
    custom: BTreeMap<String, Arc<dyn Behavior>>,
}

impl BehaviorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: &str, behavior: impl Behavior + 'static) -> &mut Self {
        self.custom.insert(id.to_string(), Arc::new(behavior));
        self
    }

    pub fn resolve(&self, id: &str) -> Result<Arc<dyn Behavior>, UnknownBehavior> {
        if let Some(b) = self.custom.get(id) {
            return Ok(Arc::clone(b));
        }
        Ok(Arc::new(Builtin::parse(id)?))
    }
}

impl fmt::Debug for BehaviorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BehaviorRegistry")
            .field("custom", &self.custom.keys().collect::<Vec<_>>())
            .finish()
    }
}
