//! Small-set expansion: for each `n <= N`, the minimum of `|dA| / |A|` over
//! connected vertex sets `A` of size `n`.

use serde::{Deserialize, Serialize};

use super::{Budget, FiniteGraph, GraphError};

/// Default cap on the number of enumerated connected sets.
pub const DEFAULT_SET_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeMinimum {
    pub size: usize,
    /// Edge boundary of the witness.
    pub boundary: usize,
    /// `boundary / size`.
    pub ratio: f64,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionProfile {
    pub max_size: usize,
    /// One entry per size that has a connected set; ascending by size.
    pub minima: Vec<SizeMinimum>,
    /// Minimum ratio over all sizes, or `None` for an empty graph.
    pub kappa: Option<f64>,
    /// `kappa` as `(boundary, size)` of the minimizing set.
    pub kappa_fraction: Option<(usize, usize)>,
    pub sets_enumerated: u64,
}

impl ExpansionProfile {
    pub fn minimum(&self, size: usize) -> Option<&SizeMinimum> {
        self.minima.iter().find(|m| m.size == size)
    }
}

struct Esu<'a> {
    g: &'a FiniteGraph,
    max_size: usize,
    best: Vec<Option<(usize, Vec<usize>)>>,
    in_sub: Vec<bool>,
    /// Number of neighbors in the current set, per vertex.
    touch: Vec<usize>,
    sub: Vec<usize>,
    count: u64,
    budget: u64,
}

impl Esu<'_> {
    fn record(&mut self, boundary: usize) -> Result<(), GraphError> {
        self.count += 1;
        if self.count > self.budget {
            return Err(GraphError::BudgetExceeded {
                budget: self.budget,
                context: "enumerating connected sets".into(),
            });
        }
        let size = self.sub.len();
        let better = match &self.best[size] {
            None => true,
            Some((b, w)) => {
                let mut sorted = self.sub.clone();
                sorted.sort_unstable();
                boundary < *b || (boundary == *b && sorted < *w)
            }
        };
        if better {
            let mut w = self.sub.clone();
            w.sort_unstable();
            self.best[size] = Some((boundary, w));
        }
        Ok(())
    }

    fn add(&mut self, v: usize) {
        self.in_sub[v] = true;
        self.sub.push(v);
        for &u in self.g.neighbors(v) {
            self.touch[u] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.in_sub[v] = false;
        self.sub.pop();
        for &u in self.g.neighbors(v) {
            self.touch[u] -= 1;
        }
    }

    /// Standard ESU: every connected set containing `root` as its smallest
    /// vertex is visited exactly once.
    fn extend(&mut self, mut ext: Vec<usize>, root: usize, boundary: usize) -> Result<(), GraphError> {
        self.record(boundary)?;
        if self.sub.len() == self.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                // Exclusive neighbors of w: not in, nor adjacent to, the set.
                if u > root && !self.in_sub[u] && self.touch[u] == 0 && !next.contains(&u) {
                    next.push(u);
                }
            }
            let inside = self.touch[w];
            let b = boundary + self.g.degree(w) - 2 * inside;
            self.add(w);
            self.extend(next, root, b)?;
            self.remove(w);
        }
        Ok(())
    }
}

/// Exhaustively enumerates connected sets of size at most `max_size`.
pub fn expansion_profile(g: &FiniteGraph, max_size: usize, budget: Budget) -> Result<ExpansionProfile, GraphError> {
    if max_size == 0 {
        return Err(GraphError::Invalid("the maximum set size must be at least 1".into()));
    }
    let n = g.vertex_count();
    let mut esu = Esu {
        g,
        max_size,
        best: vec![None; max_size + 1],
        in_sub: vec![false; n],
        touch: vec![0; n],
        sub: Vec::new(),
        count: 0,
        budget: budget.0,
    };
    for v in 0..n {
        let ext: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        esu.add(v);
        esu.extend(ext, v, g.degree(v))?;
        esu.remove(v);
    }
    let minima: Vec<SizeMinimum> = esu
        .best
        .into_iter()
        .enumerate()
        .filter_map(|(size, b)| {
            b.map(|(boundary, witness)| SizeMinimum {
                size,
                boundary,
                ratio: boundary as f64 / size as f64,
                witness,
            })
        })
        .collect();
    // Compare ratios exactly by cross-multiplying.
    let kappa_fraction = minima
        .iter()
        .map(|m| (m.boundary, m.size))
        .reduce(|a, b| if b.0 * a.1 < a.0 * b.1 { b } else { a });
    Ok(ExpansionProfile {
        max_size,
        kappa: kappa_fraction.map(|(b, s)| b as f64 / s as f64),
        kappa_fraction,
        minima,
        sets_enumerated: esu.count,
    })
}

#[cfg(test)]
mod tests {
    use super::super::generators::{complete, cycle, hypercube, path};
    use super::*;

    fn profile(g: &FiniteGraph, n: usize) -> ExpansionProfile {
        expansion_profile(g, n, Budget(DEFAULT_SET_BUDGET)).unwrap()
    }

    #[test]
    fn complete_graph() {
        let p = profile(&complete(6), 3);
        assert_eq!(p.kappa, Some(3.0));
        assert_eq!(p.kappa_fraction, Some((9, 3)));
        // Every set is connected: 6 + 15 + 20.
        assert_eq!(p.sets_enumerated, 41);
    }

    #[test]
    fn path_profile() {
        let p = profile(&path(10), 5);
        assert_eq!(p.minimum(5).unwrap().boundary, 1);
        assert_eq!(p.minimum(5).unwrap().witness, vec![0, 1, 2, 3, 4]);
        assert_eq!(p.kappa_fraction, Some((1, 5)));
        assert!((p.kappa.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn counts_connected_sets() {
        // C_8: 8 arcs of each length 1..7, plus the whole cycle.
        assert_eq!(profile(&cycle(8), 8).sets_enumerated, 8 * 7 + 1);
        // Q_3 has 8 + 12 + 24 connected sets of size <= 3.
        assert_eq!(profile(&hypercube(3), 3).sets_enumerated, 44);
    }

    #[test]
    fn matches_brute_force() {
        let g = super::super::generators::random_connected(11, 16, 4).unwrap();
        let p = profile(&g, 5);
        for size in 1..=5 {
            let mut best = usize::MAX;
            for mask in 0u32..1 << 11 {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let members: Vec<usize> = (0..11).filter(|i| mask >> i & 1 == 1).collect();
                if g.induced(&members).components().len() != 1 {
                    continue;
                }
                let in_set: Vec<bool> = (0..11).map(|i| mask >> i & 1 == 1).collect();
                best = best.min(g.edge_boundary(&in_set));
            }
            assert_eq!(p.minimum(size).unwrap().boundary, best, "size {size}");
        }
    }

    #[test]
    fn budget_and_arguments() {
        assert!(expansion_profile(&complete(8), 4, Budget(5)).is_err());
        assert!(expansion_profile(&complete(3), 0, Budget(5)).is_err());
    }
}
