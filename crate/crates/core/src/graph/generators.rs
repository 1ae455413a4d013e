//! Standard graph families, seeded random graphs and a small-graph corpus.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FiniteGraph, GraphError};
use crate::local::canon::{canonical_form, SmallGraph};

pub fn cycle(n: usize) -> FiniteGraph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    FiniteGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn path(n: usize) -> FiniteGraph {
    FiniteGraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

pub fn complete(n: usize) -> FiniteGraph {
    FiniteGraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

pub fn hypercube(dim: u32) -> FiniteGraph {
    let n = 1usize << dim;
    let edges = (0..n).flat_map(|v| (0..dim).map(move |b| (v, v ^ (1 << b))).filter(|&(u, w)| u < w));
    FiniteGraph::new(n, edges).unwrap()
}

/// Uniform simple `d`-regular graph on `n` vertices via the configuration
/// model with rejection.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<FiniteGraph, GraphError> {
    if d >= n || n * d % 2 == 1 {
        return Err(GraphError::Invalid(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    for _ in 0..100_000 {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        let simple = stubs.chunks(2).all(|p| {
            let (u, v) = (p[0].min(p[1]), p[0].max(p[1]));
            u != v && seen.insert((u, v))
        });
        if simple {
            return FiniteGraph::new(n, seen);
        }
    }
    Err(GraphError::Invalid(format!("could not draw a simple {d}-regular graph on {n} vertices")))
}

/// A connected graph with `n` vertices and `m` edges: a random spanning tree
/// plus uniformly chosen extra edges.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Result<FiniteGraph, GraphError> {
    if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
        return Err(GraphError::Invalid(format!("no connected graph with n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !edges.contains(e))
        .collect();
    rest.shuffle(&mut rng);
    edges.extend(rest.into_iter().take(m + 1 - n));
    FiniteGraph::new(n, edges)
}

/// One representative of every isomorphism class of connected graphs on
/// `n` vertices. Feasible up to `n = 7` or so.
pub fn connected_graphs(n: usize) -> Vec<FiniteGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(pairs.len() <= 24, "too many vertices to enumerate");
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        if (mask.count_ones() as usize) + 1 < n {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let g = FiniteGraph::new(n, edges.iter().copied()).unwrap();
        if g.components().len() != 1 {
            continue;
        }
        let form = canonical_form(&SmallGraph::new(n, &edges), &vec![0; n]);
        if seen.insert(form.rows.clone()) {
            out.push(FiniteGraph::new(n, form.edges()).unwrap());
        }
    }
    out
}

/// A named mixed corpus of small connected graphs: every connected graph on
/// at most 6 vertices, a few classical graphs, and seeded random connected
/// graphs with at most 16 edges.
pub fn small_corpus() -> Vec<(String, FiniteGraph)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        for (i, g) in connected_graphs(n).into_iter().enumerate() {
            out.push((format!("connected-{n}-{i}"), g));
        }
    }
    out.push(("cycle-12".into(), cycle(12)));
    out.push(("complete-5".into(), complete(5)));
    out.push(("hypercube-3".into(), hypercube(3)));
    out.push(("path-16".into(), path(16)));
    for seed in 0..24u64 {
        let n = 7 + (seed % 6) as usize;
        let m = (n - 1 + (seed as usize * 5) % 8).min(16);
        out.push((format!("random-{n}-{m}-{seed}"), random_connected(n, m, seed).unwrap()));
    }
    out
}
