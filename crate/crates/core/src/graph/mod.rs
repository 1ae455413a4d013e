//! Finite simple graphs: hyperfiniteness certificates (exact and greedy),
//! small-scale expansion profiles, and the robustness check that small
//! vertex deletions from an expander never make it hyperfinite.

mod expansion;
pub mod generators;
mod hyperfinite;
mod robustness;

pub use expansion::{expansion_profile, ExpansionProfile, SizeMinimum, DEFAULT_SET_BUDGET};
pub use hyperfinite::{
    hyperfinite_exact, hyperfinite_greedy, min_cut_at_most, verify_certificate, HyperfinitenessCertificate,
    DEFAULT_NODE_BUDGET, EXACT_MAX_EDGES, EXACT_MAX_VERTICES,
};
pub use robustness::{robustness_check, robustness_threshold, Counterexample, RobustnessMode, RobustnessReport};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable overriding every enumeration budget.
pub const BUDGET_ENV: &str = "IRELAB_BUDGET";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid edge ({0},{1}): self-loops are not allowed")]
    SelfLoop(usize, usize),
    #[error("edge ({u},{v}) out of range for {n} vertices")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("exact infeasible, use greedy: {0}")]
    ExactInfeasible(String),
    #[error("budget of {budget} exhausted {context}")]
    BudgetExceeded { budget: u64, context: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// A work cap for exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    /// `default`, unless `IRELAB_BUDGET` holds a positive integer.
    pub fn from_env(default: u64) -> Budget {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&b| b > 0)
            .map_or(Budget(default), Budget)
    }
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl FiniteGraph {
    /// Normalizes edges to `u < v`, sorts them and merges duplicates.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut es = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u, v));
            }
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &es {
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(FiniteGraph { n, edges: es, adj })
    }

    /// Plain text: one `u v` pair per line, `#` starts a comment. A line
    /// holding a single index declares an (isolated) vertex.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut n = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GraphError::Parse { line: i + 1, message };
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| err(format!("not a vertex index: {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match nums[..] {
                [v] => n = n.max(v + 1),
                [u, v] => {
                    if u == v {
                        return Err(err(format!("self-loop at {u}")));
                    }
                    n = n.max(u.max(v) + 1);
                    edges.push((u, v));
                }
                _ => return Err(err(format!("expected \"u v\", got {line:?}"))),
            }
        }
        FiniteGraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut touched = vec![false; self.n];
        for &(u, v) in &self.edges {
            touched[u] = true;
            touched[v] = true;
            s.push_str(&format!("{u} {v}\n"));
        }
        for (v, t) in touched.iter().enumerate() {
            if !t {
                s.push_str(&format!("{v}\n"));
            }
        }
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `G[A]`, relabeled to `0..|A|` in the order of `vertices`.
    pub fn induced(&self, vertices: &[usize]) -> FiniteGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        FiniteGraph::new(vertices.len(), edges).expect("induced edges are valid")
    }

    /// Connected components of the graph with `removed` edges deleted.
    pub fn components_without(&self, removed: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut cut: Vec<(usize, usize)> = removed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        cut.sort_unstable();
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &u in &self.adj[v] {
                    if comp[u] == usize::MAX && cut.binary_search(&(v.min(u), v.max(u))).is_err() {
                        comp[u] = id;
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_without(&[])
    }

    /// Edges with exactly one endpoint in `set` (given as a membership mask).
    pub fn edge_boundary(&self, in_set: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| in_set[u] != in_set[v]).count()
    }
}

impl fmt::Display for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(n={}, m={})", self.n, self.edges.len())
    }
}
