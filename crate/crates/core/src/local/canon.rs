//! Exact canonical labeling of small vertex-colored graphs by color
//! refinement plus individualization, with automorphism pruning.

use sha2::{Digest, Sha256};

pub const MAX_VERTICES: usize = 64;

/// A simple graph on at most 64 vertices as adjacency bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SmallGraph {
    /// # Panics
    /// If `n > 64`, an endpoint is out of range, or an edge is a loop.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        let mut adj = vec![0u64; n];
        for &(u, v) in edges {
            assert!(u < n && v < n && u != v, "bad edge ({u},{v})");
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        SmallGraph { n, adj }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v)))
            .collect()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.adj[v];
        std::iter::from_fn(move || {
            (bits != 0).then(|| {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                i
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `position[v]`: the canonical label of vertex `v`.
    pub position: Vec<usize>,
    /// Initial color of each canonical position.
    pub colors: Vec<u32>,
    /// Adjacency rows in canonical order.
    pub rows: Vec<u64>,
}

impl CanonicalForm {
    /// 128-bit digest of the canonical form, as lowercase hex.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.rows.len() as u32).to_le_bytes());
        for c in &self.colors {
            h.update(c.to_le_bytes());
        }
        for r in &self.rows {
            h.update(r.to_le_bytes());
        }
        hex::encode(&h.finalize()[..16])
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rows.len();
        (0..n)
            .flat_map(|u| (u + 1..n).filter(move |&v| self.rows[u] >> v & 1 == 1).map(move |v| (u, v)))
            .collect()
    }
}

/// Replaces `colors` by the coarsest equitable refinement. Colors are dense
/// ranks and the refinement respects the old color order, so the result is
/// isomorphism-invariant.
fn refine(g: &SmallGraph, colors: &mut Vec<u32>) {
    let mut count = distinct(colors);
    loop {
        let mut sigs: Vec<(u32, Vec<u32>, usize)> = (0..g.n)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb, v)
            })
            .collect();
        sigs.sort();
        let mut rank = 0u32;
        for i in 0..sigs.len() {
            if i > 0 && (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                rank += 1;
            }
            colors[sigs[i].2] = rank;
        }
        let new_count = rank as usize + usize::from(g.n > 0);
        if new_count == count {
            return;
        }
        count = new_count;
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn dense(colors: &[u32]) -> Vec<u32> {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    colors.iter().map(|x| c.binary_search(x).unwrap() as u32).collect()
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let cv = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(u, &c)| if c > cv || (c == cv && u != v) { c + 1 } else { c })
        .collect()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

struct Search<'a> {
    g: &'a SmallGraph,
    best: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn relabel(&self, position: &[usize]) -> Vec<u64> {
        let mut rows = vec![0u64; self.g.n];
        for v in 0..self.g.n {
            for u in self.g.neighbors(v) {
                rows[position[v]] |= 1 << position[u];
            }
        }
        rows
    }

    fn leaf(&mut self, colors: &[u32]) {
        let position: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let rows = self.relabel(&position);
        match &self.best {
            Some((best, _)) if rows > *best => {}
            Some((best, best_pos)) if rows == *best => {
                let mut at = vec![0; self.g.n];
                for (v, &p) in best_pos.iter().enumerate() {
                    at[p] = v;
                }
                let sigma: Vec<usize> = position.iter().map(|&p| at[p]).collect();
                if sigma.iter().enumerate().any(|(i, &s)| i != s) {
                    self.automorphisms.push(sigma);
                }
            }
            _ => self.best = Some((rows, position)),
        }
    }

    fn descend(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) {
        refine(self.g, &mut colors);
        let n = self.g.n;
        let cells = distinct(&colors);
        if cells == n {
            self.leaf(&colors);
            return;
        }
        let mut sizes = vec![0usize; cells];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() {
                // Orbits of the automorphisms found so far that fix the prefix.
                let mut parent: Vec<usize> = (0..n).collect();
                for sigma in &self.automorphisms {
                    if prefix.iter().all(|&p| sigma[p] == p) {
                        for (x, &y) in sigma.iter().enumerate() {
                            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                            parent[a] = b;
                        }
                    }
                }
                let rv = find(&mut parent, v);
                if explored.iter().any(|&u| find(&mut parent, u) == rv) {
                    continue;
                }
            }
            explored.push(v);
            prefix.push(v);
            self.descend(individualize(&colors, v), prefix);
            prefix.pop();
        }
    }
}

/// Canonical form of `g` with respect to an initial vertex coloring. Two
/// colored graphs get the same form iff they are isomorphic by a
/// color-preserving bijection.
pub fn canonical_form(g: &SmallGraph, initial_colors: &[u32]) -> CanonicalForm {
    assert_eq!(initial_colors.len(), g.n);
    let colors = dense(initial_colors);
    let mut search = Search {
        g,
        best: None,
        automorphisms: Vec::new(),
    };
    search.descend(colors.clone(), &mut Vec::new());
    let (rows, position) = search.best.unwrap_or_default();
    let mut by_position = vec![0u32; g.n];
    for (v, &p) in position.iter().enumerate() {
        by_position[p] = colors[v];
    }
    CanonicalForm {
        position,
        colors: by_position,
        rows,
    }
}

/// Canonical form of a graph rooted at `root`: the root is the only vertex
/// with color 0, so it always lands at position 0.
pub fn rooted_canonical_form(g: &SmallGraph, root: usize) -> CanonicalForm {
    let colors: Vec<u32> = (0..g.n).map(|v| u32::from(v != root)).collect();
    canonical_form(g, &colors)
}
