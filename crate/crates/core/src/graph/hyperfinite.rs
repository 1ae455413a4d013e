//! `(epsilon, k)`-hyperfiniteness: can at most `epsilon |V|` edges be removed so
//! that every remaining component has at most `k` vertices?

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Budget, FiniteGraph, GraphError};

/// Exact search is attempted only on graphs this small.
pub const EXACT_MAX_VERTICES: usize = 40;
pub const EXACT_MAX_EDGES: usize = 64;
/// Default cap on branch-and-bound nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperfinitenessCertificate {
    pub epsilon: f64,
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    /// For the exact solver: whether the graph is `(epsilon, k)`-hyperfinite.
    /// For the greedy solver a `false` verdict is inconclusive.
    pub verdict: bool,
    /// Edges to remove; every remaining component has at most `k` vertices.
    pub witness: Vec<(usize, usize)>,
    pub cut_size: usize,
    /// Present when the witness is known to be a minimum cut.
    pub optimal_cut_size: Option<usize>,
    pub heuristic: bool,
    /// `cut_size / |V|`.
    pub edge_fraction: f64,
    /// `2|E| / |V|`.
    pub expected_degree: f64,
}

impl HyperfinitenessCertificate {
    fn build(g: &FiniteGraph, epsilon: f64, k: usize, witness: Vec<(usize, usize)>, exact: bool) -> Self {
        let n = g.vertex_count().max(1) as f64;
        let cut = witness.len();
        HyperfinitenessCertificate {
            epsilon,
            k,
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            verdict: within(cut, epsilon, g.vertex_count()),
            cut_size: cut,
            optimal_cut_size: exact.then_some(cut),
            heuristic: !exact,
            edge_fraction: cut as f64 / n,
            expected_degree: 2.0 * g.edge_count() as f64 / n,
            witness,
        }
    }
}

fn within(cut: usize, epsilon: f64, n: usize) -> bool {
    cut as f64 <= epsilon * n as f64 + 1e-9
}

fn check_args(epsilon: f64, k: usize) -> Result<(), GraphError> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(GraphError::Invalid(format!("epsilon must be non-negative, got {epsilon}")));
    }
    if k == 0 {
        return Err(GraphError::Invalid("k must be at least 1".into()));
    }
    Ok(())
}

/// Checks a certificate against the graph without trusting the solver.
pub fn verify_certificate(g: &FiniteGraph, cert: &HyperfinitenessCertificate) -> Result<(), String> {
    if cert.vertices != g.vertex_count() || cert.edges != g.edge_count() {
        return Err("certificate is for a different graph".into());
    }
    let mut seen = BTreeSet::new();
    for &(u, v) in &cert.witness {
        let e = (u.min(v), u.max(v));
        if g.edges().binary_search(&e).is_err() {
            return Err(format!("witness edge ({u},{v}) is not in the graph"));
        }
        if !seen.insert(e) {
            return Err(format!("witness edge ({u},{v}) repeated"));
        }
    }
    if cert.cut_size != cert.witness.len() {
        return Err("cut size disagrees with the witness".into());
    }
    if let Some(big) = g.components_without(&cert.witness).iter().find(|c| c.len() > cert.k) {
        return Err(format!("a component of size {} exceeds k = {}", big.len(), cert.k));
    }
    if cert.verdict != within(cert.cut_size, cert.epsilon, g.vertex_count()) {
        return Err("verdict disagrees with the witness size".into());
    }
    if cert.optimal_cut_size.is_some_and(|o| o != cert.cut_size) {
        return Err("optimal cut size disagrees with the witness".into());
    }
    Ok(())
}

/// Minimum cut by branch and bound over block assignments, component by
/// component. Fails with `ExactInfeasible` on graphs with more than 40
/// vertices and more than 64 edges.
pub fn hyperfinite_exact(
    g: &FiniteGraph,
    epsilon: f64,
    k: usize,
    budget: Budget,
) -> Result<HyperfinitenessCertificate, GraphError> {
    check_args(epsilon, k)?;
    check_feasible(g)?;
    let mut nodes = 0u64;
    let mut witness = Vec::new();
    for comp in g.components() {
        let (_, cut) = solve_component(g, &comp, k, usize::MAX, budget, &mut nodes)?
            .expect("an unbounded search always finds the singleton partition");
        witness.extend(cut);
    }
    witness.sort_unstable();
    Ok(HyperfinitenessCertificate::build(g, epsilon, k, witness, true))
}

/// A witness of at most `limit` removed edges, if one exists.
pub fn min_cut_at_most(
    g: &FiniteGraph,
    k: usize,
    limit: usize,
    budget: Budget,
) -> Result<Option<Vec<(usize, usize)>>, GraphError> {
    check_args(0.0, k)?;
    check_feasible(g)?;
    let mut nodes = 0u64;
    let mut remaining = limit;
    let mut witness = Vec::new();
    for comp in g.components() {
        match solve_component(g, &comp, k, remaining + 1, budget, &mut nodes)? {
            Some((cost, cut)) => {
                remaining -= cost;
                witness.extend(cut);
            }
            None => return Ok(None),
        }
    }
    witness.sort_unstable();
    Ok(Some(witness))
}

fn check_feasible(g: &FiniteGraph) -> Result<(), GraphError> {
    if g.vertex_count() > EXACT_MAX_VERTICES && g.edge_count() > EXACT_MAX_EDGES {
        return Err(GraphError::ExactInfeasible(format!(
            "{} vertices and {} edges (limits: {EXACT_MAX_VERTICES} vertices or {EXACT_MAX_EDGES} edges)",
            g.vertex_count(),
            g.edge_count()
        )));
    }
    Ok(())
}

struct Bnb<'a> {
    g: &'a FiniteGraph,
    k: usize,
    order: Vec<usize>,
    block: Vec<usize>,
    sizes: Vec<usize>,
    /// Only solutions strictly cheaper than this are kept.
    best: usize,
    best_block: Option<Vec<usize>>,
    nodes: &'a mut u64,
    budget: u64,
}

const FREE: usize = usize::MAX;

impl Bnb<'_> {
    fn counts(&self, v: usize) -> (usize, Vec<usize>) {
        let mut per = vec![0usize; self.sizes.len()];
        let mut assigned = 0;
        for &u in self.g.neighbors(v) {
            if self.block[u] != FREE {
                assigned += 1;
                per[self.block[u]] += 1;
            }
        }
        (assigned, per)
    }

    fn lower_bound(&self, from: usize) -> usize {
        self.order[from..]
            .iter()
            .map(|&u| {
                let (assigned, per) = self.counts(u);
                let keep = per
                    .iter()
                    .zip(&self.sizes)
                    .filter(|(_, &s)| s < self.k)
                    .map(|(&c, _)| c)
                    .max()
                    .unwrap_or(0);
                assigned - keep
            })
            .sum()
    }

    fn search(&mut self, i: usize, cost: usize) -> Result<(), GraphError> {
        *self.nodes += 1;
        if *self.nodes > self.budget {
            return Err(GraphError::BudgetExceeded {
                budget: self.budget,
                context: "in the exact hyperfiniteness search".into(),
            });
        }
        if i == self.order.len() {
            if cost < self.best {
                self.best = cost;
                self.best_block = Some(self.block.clone());
            }
            return Ok(());
        }
        if cost + self.lower_bound(i) >= self.best {
            return Ok(());
        }
        let v = self.order[i];
        let (assigned, per) = self.counts(v);
        let mut options: Vec<(usize, usize)> = (0..self.sizes.len())
            .filter(|&b| self.sizes[b] < self.k)
            .map(|b| (assigned - per[b], b))
            .collect();
        options.push((assigned, self.sizes.len()));
        options.sort_unstable();
        for (inc, b) in options {
            if cost + inc >= self.best {
                continue;
            }
            if b == self.sizes.len() {
                self.sizes.push(0);
            }
            self.sizes[b] += 1;
            self.block[v] = b;
            self.search(i + 1, cost + inc)?;
            self.block[v] = FREE;
            self.sizes[b] -= 1;
            if self.sizes[b] == 0 && b + 1 == self.sizes.len() {
                self.sizes.pop();
            }
        }
        Ok(())
    }
}

/// Cheapest cut of one connected component, if one costs less than `bound`.
fn solve_component(
    g: &FiniteGraph,
    comp: &[usize],
    k: usize,
    bound: usize,
    budget: Budget,
    nodes: &mut u64,
) -> Result<Option<(usize, Vec<(usize, usize)>)>, GraphError> {
    if comp.len() <= k {
        return Ok((bound > 0).then(|| (0, Vec::new())));
    }
    // The heuristic witness bounds the search from the start.
    let heuristic = greedy_cut(g, comp, k);
    let mut bnb = Bnb {
        g,
        k,
        order: bfs_order(g, comp[0], |_| true),
        block: vec![FREE; g.vertex_count()],
        sizes: Vec::new(),
        best: bound.min(heuristic.len()),
        best_block: None,
        nodes,
        budget: budget.0,
    };
    bnb.search(0, 0)?;
    Ok(match bnb.best_block {
        Some(block) => {
            let cut: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .filter(|&&(u, v)| block[u] != FREE && block[u] != block[v])
                .copied()
                .collect();
            Some((cut.len(), cut))
        }
        None if heuristic.len() < bound => Some((heuristic.len(), heuristic)),
        None => None,
    })
}

fn bfs_order(g: &FiniteGraph, start: usize, allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if !seen[u] && allowed(u) {
                seen[u] = true;
                order.push(u);
                queue.push_back(u);
            }
        }
    }
    order
}

/// Recursive sparsest-BFS-prefix bisection followed by a pass that puts
/// back every removed edge whose endpoints' components still fit in `k`.
/// Linear in the number of BFS starts per split; the result is a valid
/// witness but need not be minimal.
pub fn hyperfinite_greedy(g: &FiniteGraph, epsilon: f64, k: usize) -> Result<HyperfinitenessCertificate, GraphError> {
    check_args(epsilon, k)?;
    let mut witness = Vec::new();
    for comp in g.components() {
        witness.extend(greedy_cut(g, &comp, k));
    }
    witness.sort_unstable();
    Ok(HyperfinitenessCertificate::build(g, epsilon, k, witness, false))
}

fn greedy_cut(g: &FiniteGraph, comp: &[usize], k: usize) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut removed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut stack = vec![comp.to_vec()];
    while let Some(set) = stack.pop() {
        if set.len() <= k {
            continue;
        }
        let mut in_set = vec![false; n];
        for &v in &set {
            in_set[v] = true;
        }
        let live = |u: usize, v: usize, removed: &BTreeSet<(usize, usize)>| {
            in_set[u] && in_set[v] && !removed.contains(&(u.min(v), u.max(v)))
        };
        // `set` is connected in the current graph, so a prefix always splits it.
        let prefix = sparsest_prefix(g, &set, |u, v| live(u, v, &removed));
        let mut in_prefix = vec![false; n];
        for &v in &prefix {
            in_prefix[v] = true;
        }
        for &v in &prefix {
            for &u in g.neighbors(v) {
                if in_set[u] && !in_prefix[u] {
                    removed.insert((u.min(v), u.max(v)));
                }
            }
        }
        let rest: Vec<usize> = set.iter().copied().filter(|&v| !in_prefix[v]).collect();
        for part in [prefix, rest] {
            let mut left = part;
            left.sort_unstable();
            while let Some(&s) = left.first() {
                let piece = live_component(g, s, &left, &removed);
                left.retain(|u| piece.binary_search(u).is_err());
                stack.push(piece);
            }
        }
    }
    restore_edges(g, comp, k, removed)
}

fn live_component(g: &FiniteGraph, s: usize, allowed: &[usize], removed: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if allowed.binary_search(&u).is_ok()
                && !removed.contains(&(u.min(v), u.max(v)))
                && seen.insert(u)
            {
                queue.push_back(u);
            }
        }
    }
    seen.into_iter().collect()
}

/// The BFS prefix with the smallest `cut / min(|P|, |S \ P|)` over a set of
/// start vertices; ties go to the more balanced prefix, then the earlier one.
fn sparsest_prefix(g: &FiniteGraph, set: &[usize], live: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let n = g.vertex_count();
    let m = set.len();
    let starts: Vec<usize> = if m <= 256 {
        set.to_vec()
    } else {
        (0..64).map(|i| set[i * m / 64]).collect()
    };
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for &s in &starts {
        let order = bfs_order(g, s, |u| set.binary_search(&u).is_ok());
        let mut in_prefix = vec![false; n];
        let mut cut = 0usize;
        for (t, &u) in order.iter().enumerate().take(m - 1) {
            let mut deg = 0;
            let mut inside = 0;
            for &w in g.neighbors(u) {
                if live(u, w) {
                    deg += 1;
                    inside += usize::from(in_prefix[w]);
                }
            }
            cut = cut + deg - 2 * inside;
            in_prefix[u] = true;
            let size = (t + 1).min(m - t - 1);
            let better = match &best {
                None => true,
                Some((bc, bs, _)) => cut * bs < bc * size || (cut * bs == bc * size && size > *bs),
            };
            if better {
                best = Some((cut, size, order[..=t].to_vec()));
            }
        }
    }
    best.map(|b| b.2).unwrap_or_default()
}

fn restore_edges(g: &FiniteGraph, comp: &[usize], k: usize, removed: BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    fn root(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut in_comp = vec![false; n];
    for &v in comp {
        in_comp[v] = true;
    }
    for &(u, v) in g.edges() {
        if in_comp[u] && !removed.contains(&(u, v)) {
            let (a, b) = (root(&mut parent, u), root(&mut parent, v));
            if a != b {
                parent[a] = b;
                size[b] += size[a];
            }
        }
    }
    let mut kept = Vec::new();
    for (u, v) in removed {
        let (a, b) = (root(&mut parent, u), root(&mut parent, v));
        if a == b {
            continue;
        }
        if size[a] + size[b] <= k {
            parent[a] = b;
            size[b] += size[a];
        } else {
            kept.push((u, v));
        }
    }
    kept
}
