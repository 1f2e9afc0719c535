//! Unrolling a network into the job-level task graph over a horizon.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::model::{fp_precedes, hyperperiod, ModelError, NetworkModel};
use crate::time::Micros;

/// Identity of the `k`-th invocation of a process, written `p[k]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobId {
    pub process: String,
    pub k: u32,
}

impl JobId {
    pub fn new(process: &str, k: u32) -> Self {
        JobId {
            process: process.to_string(),
            k,
        }
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.process, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub arrival: Micros,
    /// Absolute deadline.
    pub deadline: Micros,
    pub wcet: Micros,
}

impl Job {
    /// Whether the scheduling windows `[arrival, deadline)` intersect.
    pub fn overlaps(&self, other: &Job) -> bool {
        self.arrival < other.deadline && other.arrival < self.deadline
    }
}

/// Jobs sorted by `(process, k)` plus precedence edges as index pairs into
/// `jobs`, sorted and transitively reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    pub jobs: Vec<Job>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskGraphError {
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("horizon {horizon} is not a multiple of the hyperperiod {hyperperiod}")]
    HorizonNotMultiple { horizon: Micros, hyperperiod: Micros },
    #[error("process `{0}` has no WCET")]
    MissingWcet(String),
    #[error("job {0} does not match the network")]
    InconsistentJob(JobId),
    #[error("precedence graph contains a cycle")]
    Cyclic,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl TaskGraph {
    pub fn index_of(&self, id: &JobId) -> Option<usize> {
        self.jobs
            .binary_search_by(|j| (j.id.process.as_str(), j.id.k).cmp(&(id.process.as_str(), id.k)))
            .ok()
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.jobs.len()];
        for &(u, v) in &self.edges {
            preds[v].push(u);
        }
        preds
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succs = vec![Vec::new(); self.jobs.len()];
        for &(u, v) in &self.edges {
            succs[u].push(v);
        }
        succs
    }

    /// Kahn topological order, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Result<Vec<usize>, TaskGraphError> {
        topological_order(self.jobs.len(), &self.edges)
    }

    /// Whether `to` is reachable from `from` through one or more edges.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let succs = self.successors();
        let mut seen = vec![false; self.jobs.len()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &v in &succs[u] {
                if v == to {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }
}

fn topological_order(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, TaskGraphError> {
    let mut indeg = vec![0usize; n];
    let mut succs = vec![Vec::new(); n];
    for &(u, v) in edges {
        indeg[v] += 1;
        succs[u].push(v);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = ready.pop_first() {
        order.push(u);
        for &v in &succs[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.insert(v);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(TaskGraphError::Cyclic)
    }
}

/// All jobs released in `[0, horizon)` with zero offsets, sorted by `(process, k)`.
pub fn unroll_jobs(net: &NetworkModel, horizon: Micros) -> Result<Vec<Job>, TaskGraphError> {
    if horizon.is_zero() {
        return Err(TaskGraphError::ZeroHorizon);
    }
    let hp = hyperperiod(net)?;
    if !horizon.0.is_multiple_of(hp.0) {
        return Err(TaskGraphError::HorizonNotMultiple {
            horizon,
            hyperperiod: hp,
        });
    }
    let mut jobs = Vec::new();
    for p in &net.processes {
        let wcet = p.wcet.ok_or_else(|| TaskGraphError::MissingWcet(p.id.clone()))?;
        let count = horizon.0 / p.period.0;
        for k in 0..count {
            let arrival = p.period * k;
            jobs.push(Job {
                id: JobId::new(&p.id, k as u32),
                arrival,
                deadline: arrival + p.deadline,
                wcet,
            });
        }
    }
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(jobs)
}

/// Precedence edges: functional priority between window-overlapping jobs of
/// communicating processes, plus `p[k] -> p[k+1]`. Transitively reduced.
pub fn derive_edges(net: &NetworkModel, jobs: &[Job]) -> Result<Vec<(usize, usize)>, TaskGraphError> {
    for j in jobs {
        let p = net
            .process(&j.id.process)
            .ok_or_else(|| TaskGraphError::InconsistentJob(j.id.clone()))?;
        let k = u64::from(j.id.k);
        if j.arrival != p.period * k || j.deadline != j.arrival + p.deadline || Some(j.wcet) != p.wcet {
            return Err(TaskGraphError::InconsistentJob(j.id.clone()));
        }
    }

    let mut by_process: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, j) in jobs.iter().enumerate() {
        by_process.entry(j.id.process.as_str()).or_default().push(i);
    }

    let mut edges = BTreeSet::new();
    for idx in by_process.values_mut() {
        idx.sort_by_key(|&i| jobs[i].id.k);
        for w in idx.windows(2) {
            edges.insert((w[0], w[1]));
        }
    }

    let mut names: Vec<&str> = by_process.keys().copied().collect();
    names.sort_unstable();
    for &p in &names {
        for &q in &names {
            if p == q || !fp_precedes(net, p, q)? {
                continue;
            }
            for &a in &by_process[p] {
                for &b in &by_process[q] {
                    if jobs[a].overlaps(&jobs[b]) {
                        edges.insert((a, b));
                    }
                }
            }
        }
    }

    let edges: Vec<_> = edges.into_iter().collect();
    transitive_reduction(jobs.len(), &edges)
}

/// Remove every edge implied by a longer path.
fn transitive_reduction(n: usize, edges: &[(usize, usize)]) -> Result<Vec<(usize, usize)>, TaskGraphError> {
    let order = topological_order(n, edges)?;
    let words = n.div_ceil(64);
    let mut succs = vec![Vec::new(); n];
    for &(u, v) in edges {
        succs[u].push(v);
    }
    // reach[u]: nodes reachable from u via at least one edge.
    let mut reach = vec![vec![0u64; words]; n];
    for &u in order.iter().rev() {
        let mut acc = vec![0u64; words];
        for &v in &succs[u] {
            acc[v / 64] |= 1 << (v % 64);
            for (a, r) in acc.iter_mut().zip(&reach[v]) {
                *a |= r;
            }
        }
        reach[u] = acc;
    }
    let kept = edges
        .iter()
        .copied()
        .filter(|&(u, v)| {
            // Drop u -> v when another direct successor of u already reaches v.
            !succs[u]
                .iter()
                .any(|&w| w != v && reach[w][v / 64] & (1 << (v % 64)) != 0)
        })
        .collect();
    Ok(kept)
}

pub fn build_task_graph(net: &NetworkModel, horizon: Micros) -> Result<TaskGraph, TaskGraphError> {
    let jobs = unroll_jobs(net, horizon)?;
    let edges = derive_edges(net, &jobs)?;
    Ok(TaskGraph { jobs, edges })
}
