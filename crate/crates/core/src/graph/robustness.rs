//! Deleting a small fraction of the vertices of a small-set expander never
//! leaves a hyperfinite graph: if `G` is a `(kappa, N)`-expander of maximum
//! degree `d` and `epsilon < kappa / (2(1+d) + kappa)`, then `G[A]` is not
//! `(epsilon, N)`-hyperfinite for any `|A| >= (1 - epsilon)|V|`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expansion::{expansion_profile, DEFAULT_SET_BUDGET};
use super::hyperfinite::{min_cut_at_most, DEFAULT_NODE_BUDGET};
use super::{Budget, FiniteGraph, GraphError};

/// Subset families up to this size are checked exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 100_000;
/// Number of subsets drawn when the family is larger.
pub const SAMPLED_SUBSETS: u64 = 2_000;

pub fn robustness_threshold(kappa: f64, max_degree: usize) -> f64 {
    kappa / (2.0 * (1.0 + max_degree as f64) + kappa)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RobustnessMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub subset: Vec<usize>,
    /// Removed edges, in the original labels, that leave components of size <= N.
    pub witness: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub epsilon: f64,
    pub kappa: f64,
    pub observed_kappa: f64,
    pub n: usize,
    pub max_degree: usize,
    pub threshold: f64,
    pub min_subset_size: usize,
    pub mode: RobustnessMode,
    pub subsets_checked: u64,
    pub counterexamples: Vec<Counterexample>,
    pub passes: bool,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn min_subset_size(v: usize, epsilon: f64) -> usize {
    ((1.0 - epsilon) * v as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Decides `(epsilon, n)`-hyperfiniteness of `G[A]` for the large subsets `A`.
fn check_subsets(
    g: &FiniteGraph,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<(RobustnessMode, u64, Vec<Counterexample>), GraphError> {
    let v = g.vertex_count();
    let min_size = min_subset_size(v, epsilon);
    let family: u64 = (min_size..=v).map(|s| binomial(v, s)).fold(0, u64::saturating_add);
    let budget = Budget::from_env(DEFAULT_NODE_BUDGET);
    let mut counterexamples = Vec::new();
    let mut checked = 0u64;
    let mut check = |subset: &[usize]| -> Result<(), GraphError> {
        checked += 1;
        let limit = (epsilon * subset.len() as f64 + 1e-9).floor() as usize;
        if let Some(w) = min_cut_at_most(&g.induced(subset), n, limit, budget)? {
            let mut witness: Vec<(usize, usize)> = w.iter().map(|&(a, b)| (subset[a], subset[b])).collect();
            witness.sort_unstable();
            counterexamples.push(Counterexample {
                subset: subset.to_vec(),
                witness,
            });
        }
        Ok(())
    };
    let mode = if family <= EXHAUSTIVE_LIMIT {
        for size in min_size.max(1)..=v {
            let mut c: Vec<usize> = (0..size).collect();
            loop {
                check(&c)?;
                if !next_combination(&mut c, v) {
                    break;
                }
            }
        }
        RobustnessMode::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_SUBSETS {
            let size = rng.gen_range(min_size.max(1)..=v);
            let mut c = sample(&mut rng, v, size).into_vec();
            c.sort_unstable();
            check(&c)?;
        }
        RobustnessMode::Sampled {
            samples: SAMPLED_SUBSETS,
            seed,
        }
    };
    Ok((mode, checked, counterexamples))
}

/// Checks every (or, for large families, a seeded sample of) vertex set
/// `A` with `|A| >= ceil((1 - epsilon)|V|)`. Fails with a precondition
/// error if `G` is not a `(kappa, n)`-expander or `epsilon` is not below the
/// threshold.
pub fn robustness_check(
    g: &FiniteGraph,
    kappa: f64,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<RobustnessReport, GraphError> {
    if !(kappa > 0.0) {
        return Err(GraphError::Invalid(format!("kappa must be positive, got {kappa}")));
    }
    if !(epsilon > 0.0) {
        return Err(GraphError::Invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let d = g.max_degree();
    let threshold = robustness_threshold(kappa, d);
    if epsilon >= threshold {
        return Err(GraphError::Precondition(format!(
            "epsilon = {epsilon} is not below kappa/(2(1+d)+kappa) = {threshold} for kappa = {kappa}, d = {d}"
        )));
    }
    let profile = expansion_profile(g, n, Budget::from_env(DEFAULT_SET_BUDGET))?;
    let observed = profile.kappa.unwrap_or(f64::INFINITY);
    if observed < kappa - 1e-12 {
        return Err(GraphError::Precondition(format!(
            "the graph is not a (kappa = {kappa}, N = {n})-expander: observed kappa = {observed}"
        )));
    }

    let min_size = min_subset_size(g.vertex_count(), epsilon);
    let (mode, checked, counterexamples) = check_subsets(g, n, epsilon, seed)?;
    Ok(RobustnessReport {
        epsilon,
        kappa,
        observed_kappa: observed,
        n,
        max_degree: d,
        threshold,
        min_subset_size: min_size,
        mode,
        subsets_checked: checked,
        passes: counterexamples.is_empty(),
        counterexamples,
    })
}
