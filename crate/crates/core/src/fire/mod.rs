//! The tiling construction of a finite invariant random equivalence
//! relation from a finite set `A` containing the identity.
//!
//! Points of a Bernoulli subset `Pi` of intensity `delta / |A|` each claim
//! the translate `xA`. An element outside `Pi` covered by several tiles goes
//! to the covering point with the smallest mark; points of `Pi` always keep
//! themselves. The classes are the fibers of the resulting choice map.

mod exact;

pub use exact::{exact_distribution, ExactLaw, ExactOutcome};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{CellSampler, RootCell};
use crate::group::{Element, GroupError, GroupSpec};
use crate::sampling::{BernoulliField, IntensitySpec, Mark, MarkedConfiguration, SeedSpec};
use crate::stats::{mean_estimate, ratio_estimate, run_samples, Estimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FireError {
    #[error("the cell set must contain the identity")]
    MissingIdentity,
    #[error(
        "delta = {0} is outside (0, 1/2]: the bounds |A|(1 - 2 delta) and \
         4 delta^2 (1 - 2 delta)^2 are vacuous once (1 - 2 delta) < 0"
    )]
    Delta(f64),
    #[error("epsilon = {0} is outside (0,1)")]
    Epsilon(f64),
    #[error("bad cell set spec {0:?}: expected \"ball:r\" or \"explicit:<normal forms>\"")]
    BadCellSpec(String),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: u64, got: u64 },
    #[error(
        "exact enumeration infeasible: determinacy window has {window} elements (cap {window_cap}), \
         {centers} potential centers (cap {centers_cap})"
    )]
    OracleInfeasible {
        window: usize,
        window_cap: usize,
        centers: usize,
        centers_cap: usize,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finite set `A` with `e in A`, and the density parameter `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSet {
    group: GroupSpec,
    set: Vec<Element>,
    delta: f64,
}

impl CellSet {
    pub fn new(group: GroupSpec, set: Vec<Element>, delta: f64) -> Result<Self, FireError> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(FireError::Delta(delta));
        }
        let mut set = group.set_product(&set, &[group.identity()])?;
        set.dedup();
        if !set.contains(&group.identity()) {
            return Err(FireError::MissingIdentity);
        }
        Ok(CellSet { group, set, delta })
    }

    /// `A = B_r(e)`.
    pub fn ball(group: GroupSpec, radius: u32, delta: f64) -> Result<Self, FireError> {
        let w = group.ball(&group.identity(), radius)?;
        CellSet::new(group, w.elements().to_vec(), delta)
    }

    /// Comma-separated normal forms; `Z^d` vectors are written `(x,y)`.
    pub fn parse(group: GroupSpec, csv: &str, delta: f64) -> Result<Self, FireError> {
        let mut items = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for ch in csv.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if ch == ',' && depth == 0 {
                items.push(std::mem::take(&mut cur));
            } else {
                cur.push(ch);
            }
        }
        items.push(cur);
        let set = items
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| group.parse_element(s))
            .collect::<Result<Vec<_>, _>>()?;
        CellSet::new(group, set, delta)
    }

    /// `"ball:r"` or `"explicit:<csv>"`.
    pub fn from_spec(group: GroupSpec, spec: &str, delta: f64) -> Result<Self, FireError> {
        let bad = || FireError::BadCellSpec(spec.to_string());
        match spec.split_once(':') {
            Some(("ball", r)) => CellSet::ball(group, r.trim().parse().map_err(|_| bad())?, delta),
            Some(("explicit", csv)) => CellSet::parse(group, csv, delta),
            _ => Err(bad()),
        }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn elements(&self) -> &[Element] {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Intensity `delta / |A|` of the center process.
    pub fn intensity(&self) -> IntensitySpec {
        IntensitySpec::new(self.delta / self.set.len() as f64)
            .expect("delta in (0,1/2] gives an intensity in (0,1)")
    }

    pub fn inverse(&self) -> Vec<Element> {
        self.group.set_inverse(&self.set)
    }
}

/// `W = A^{-1} A A^{-1}`: the Bernoulli subset on `W` (with marks) fixes the
/// class of the identity exactly. It contains `A^{-1}` and `A A^{-1}` since
/// `e` lies in `A`.
pub fn determinacy_window(cell_set: &CellSet) -> Vec<Element> {
    let g = cell_set.group;
    let inv = cell_set.inverse();
    let aai = g.set_product(&cell_set.set, &inv).expect("members checked");
    g.set_product(&inv, &aai).expect("members checked")
}

/// Smallest mark wins; exact ties fall back to normal-form order.
fn beats(a: (Mark, &Element), b: (Mark, &Element)) -> bool {
    a < b
}

/// Precomputed index tables for sampling the class of the identity.
#[derive(Clone, Debug)]
pub struct FireSampler {
    cell_set: CellSet,
    window: Vec<Element>,
    keys: Vec<u64>,
    identity: usize,
    /// Window indices of `A^{-1}`: the points whose tile covers the identity.
    covering: Vec<usize>,
    /// For each covering point `c` (same order as `covering`): the tile `cA`
    /// as `(index of g, indices of g A^{-1})`.
    tiles: Vec<Vec<(usize, Vec<usize>)>>,
}

impl FireSampler {
    pub fn new(cell_set: &CellSet) -> Result<Self, FireError> {
        let g = cell_set.group;
        let window = determinacy_window(cell_set);
        let index: HashMap<&Element, usize> = window.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let inv = cell_set.inverse();
        let covering: Vec<usize> = inv.iter().map(|x| index[x]).collect();
        let tiles = inv
            .iter()
            .map(|c| {
                cell_set
                    .set
                    .iter()
                    .map(|a| {
                        let x = g.mul(c, a);
                        let cands = inv.iter().map(|b| index[&g.mul(&x, b)]).collect();
                        (index[&x], cands)
                    })
                    .collect()
            })
            .collect();
        Ok(FireSampler {
            cell_set: cell_set.clone(),
            keys: window.iter().map(Element::stable_key).collect(),
            identity: index[&g.identity()],
            window,
            covering,
            tiles,
        })
    }

    pub fn cell_set(&self) -> &CellSet {
        &self.cell_set
    }

    pub fn window(&self) -> &[Element] {
        &self.window
    }

    /// Shared core: `mark(i)` reveals window element `i`, `elem(i)` names it.
    fn resolve(
        &self,
        mut mark: impl FnMut(usize) -> Option<Mark>,
        elem: impl Fn(usize) -> Element,
    ) -> RootCell {
        let best = |cands: &mut dyn Iterator<Item = usize>, mark: &mut dyn FnMut(usize) -> Option<Mark>| {
            let mut best: Option<(Mark, usize)> = None;
            for i in cands {
                if let Some(m) = mark(i) {
                    best = match best {
                        Some((bm, bi)) if !beats((m, &elem(i)), (bm, &elem(bi))) => Some((bm, bi)),
                        _ => Some((m, i)),
                    };
                }
            }
            best
        };

        let center_pos = if mark(self.identity).is_some() {
            self.covering.iter().position(|&i| i == self.identity)
        } else {
            best(&mut self.covering.iter().copied(), &mut mark)
                .map(|(_, i)| self.covering.iter().position(|&j| j == i).unwrap())
        };
        let Some(pos) = center_pos else {
            return RootCell {
                members: vec![elem(self.identity)],
                center: None,
                in_pi_class: false,
                determined: true,
            };
        };
        let c = self.covering[pos];
        let mut members = vec![elem(c)];
        for (x, cands) in &self.tiles[pos] {
            if *x == c || mark(*x).is_some() {
                continue;
            }
            if let Some((_, h)) = best(&mut cands.iter().copied(), &mut mark) {
                if h == c {
                    members.push(elem(*x));
                }
            }
        }
        members.sort();
        RootCell {
            members,
            center: Some(elem(c)),
            in_pi_class: true,
            determined: true,
        }
    }

    /// The class of `root` in the relation built from `field`.
    pub fn cell_at(&self, field: &BernoulliField, root: &Element) -> RootCell {
        let g = self.cell_set.group;
        let elem = |i: usize| g.mul(root, &self.window[i]);
        self.resolve(|i| field.draw(&elem(i)), elem)
    }

    /// The class of the identity in a fully materialized configuration,
    /// which must cover the determinacy window.
    pub fn cell_in(&self, config: &MarkedConfiguration) -> RootCell {
        self.resolve(
            |i| {
                let idx = config
                    .window()
                    .index_of(&self.window[i])
                    .expect("configuration must cover the determinacy window");
                config.mark_at(idx)
            },
            |i| self.window[i].clone(),
        )
    }
}

impl CellSampler for FireSampler {
    fn group(&self) -> GroupSpec {
        self.cell_set.group
    }

    fn sample_root(&self, seed: SeedSpec) -> RootCell {
        let field = BernoulliField::new(self.cell_set.group, self.cell_set.intensity(), seed);
        let mut cache: Vec<Option<Option<Mark>>> = vec![None; self.window.len()];
        self.resolve(
            |i| *cache[i].get_or_insert_with(|| field.draw_key(self.keys[i])),
            |i| self.window[i].clone(),
        )
    }
}

pub fn sample_root_cell(cell_set: &CellSet, seed: SeedSpec) -> Result<RootCell, FireError> {
    Ok(FireSampler::new(cell_set)?.sample_root(seed))
}

/// The choice `h_g` for every element `g` of a configuration's window whose
/// candidate set `g A^{-1}` is fully inside the window; `None` elsewhere.
pub fn tile_choices(cell_set: &CellSet, config: &MarkedConfiguration) -> Vec<Option<Element>> {
    let g = cell_set.group;
    let inv = cell_set.inverse();
    let w = config.window();
    (0..w.len())
        .map(|i| {
            let x = w.element(i);
            if config.mark_at(i).is_some() {
                return Some(x.clone());
            }
            let mut best: Option<(Mark, Element)> = None;
            for b in &inv {
                let y = g.mul(x, b);
                let j = w.index_of(&y)?;
                if let Some(m) = config.mark_at(j) {
                    if best.as_ref().map_or(true, |(bm, be)| (m, &y) < (*bm, be)) {
                        best = Some((m, y));
                    }
                }
            }
            Some(best.map_or_else(|| x.clone(), |(_, y)| y))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundId {
    I,
    Ii,
    Iii,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Pass,
    Fail,
    InsufficientConditioningMass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub quantity: String,
    pub bound: f64,
    pub estimate: Option<Estimate>,
    pub lower99: Option<f64>,
    pub upper99: Option<f64>,
    /// The 99% interval is not entirely below the bound.
    pub passes: bool,
    /// The 99% lower confidence limit clears the bound.
    pub certified: bool,
    pub status: BoundStatus,
}

/// The three lower bounds `(delta - delta^2, |A|(1-2delta), 4delta^2(1-2delta)^2)`.
pub fn lemma_bounds(delta: f64, set_size: usize) -> [f64; 3] {
    let s = 1.0 - 2.0 * delta;
    [
        delta - delta * delta,
        set_size as f64 * s,
        4.0 * delta * delta * s * s,
    ]
}

pub const MIN_VERIFY_SAMPLES: u64 = 1000;

/// Monte Carlo check of the three bounds on the class of the identity:
/// the probability it is tied to a point, its expected size given that, and
/// the conditional probability its size is at least `(1-2delta)^2 |A|`.
pub fn verify_lemma_bounds(
    cell_set: &CellSet,
    n_samples: u64,
    seed: SeedSpec,
) -> Result<Vec<BoundReport>, FireError> {
    if n_samples < MIN_VERIFY_SAMPLES {
        return Err(FireError::TooFewSamples {
            min: MIN_VERIFY_SAMPLES,
            got: n_samples,
        });
    }
    let sampler = FireSampler::new(cell_set)?;
    let a = cell_set.len() as f64;
    let threshold = (1.0 - 2.0 * cell_set.delta).powi(2);
    let rows = run_samples(n_samples, |i| {
        let cell = sampler.sample_root(seed.stream(i));
        let hit = f64::from(u8::from(cell.in_pi_class));
        let size = cell.size() as f64;
        (hit, size * hit, hit * f64::from(u8::from(size / a >= threshold)))
    });
    let hits: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let large: Vec<f64> = rows.iter().map(|r| r.2).collect();

    let bounds = lemma_bounds(cell_set.delta, cell_set.len());
    let report = |bound_id, quantity: &str, bound: f64, est: Option<Estimate>| {
        let (lo, hi) = est.as_ref().map(|e| (e.lower99(), e.upper99())).unzip();
        let passes = hi.map_or(false, |hi| hi >= bound);
        BoundReport {
            bound_id,
            quantity: quantity.to_string(),
            bound,
            lower99: lo,
            upper99: hi,
            passes,
            certified: lo.map_or(false, |lo| lo >= bound),
            status: match (&est, passes) {
                (None, _) => BoundStatus::InsufficientConditioningMass,
                (Some(_), true) => BoundStatus::Pass,
                (Some(_), false) => BoundStatus::Fail,
            },
            estimate: est,
        }
    };
    Ok(vec![
        report(BoundId::I, "P[root tied to a point]", bounds[0], Some(mean_estimate(&hits, seed))),
        report(
            BoundId::Ii,
            "E[class size | root tied to a point]",
            bounds[1],
            ratio_estimate(&sizes, &hits, seed),
        ),
        report(
            BoundId::Iii,
            "P[class size >= (1-2delta)^2 |A| | root tied to a point]",
            bounds[2],
            ratio_estimate(&large, &hits, seed),
        ),
    ])
}

/// Monte Carlo estimates next to the exact law, for instances small enough
/// to enumerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub exact: ExactLaw,
    pub prob_exact: f64,
    pub prob_estimate: Estimate,
    pub prob_deviation_se: f64,
    pub size_exact: f64,
    /// `E[|class| ; root tied to a point]`.
    pub size_estimate: Estimate,
    pub size_deviation_se: f64,
}

fn deviation_in_se(est: &Estimate, target: f64) -> f64 {
    let diff = (est.value - target).abs();
    if diff == 0.0 {
        0.0
    } else if est.std_error > 0.0 {
        diff / est.std_error
    } else {
        f64::INFINITY
    }
}

/// Uses the same sample streams as `verify_lemma_bounds` for a given seed.
pub fn compare_with_oracle(cell_set: &CellSet, n_samples: u64, seed: SeedSpec) -> Result<OracleComparison, FireError> {
    let exact = exact_distribution(cell_set)?;
    if n_samples < MIN_VERIFY_SAMPLES {
        return Err(FireError::TooFewSamples {
            min: MIN_VERIFY_SAMPLES,
            got: n_samples,
        });
    }
    let sampler = FireSampler::new(cell_set)?;
    let rows = run_samples(n_samples, |i| {
        let cell = sampler.sample_root(seed.stream(i));
        let hit = f64::from(u8::from(cell.in_pi_class));
        (hit, hit * cell.size() as f64)
    });
    let hits: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let prob_estimate = mean_estimate(&hits, seed);
    let size_estimate = mean_estimate(&sizes, seed);
    let prob_exact = exact.prob_in_pi_class();
    let size_exact = exact.expected_size_in_pi_class();
    Ok(OracleComparison {
        prob_deviation_se: deviation_in_se(&prob_estimate, prob_exact),
        size_deviation_se: deviation_in_se(&size_estimate, size_exact),
        exact,
        prob_exact,
        prob_estimate,
        size_exact,
        size_estimate,
    })
}

/// The largest `delta` with `(1 - 2delta)^2 >= 1 - epsilon`.
pub fn delta_for_epsilon(epsilon: f64) -> Result<f64, FireError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FireError::Epsilon(epsilon));
    }
    Ok((1.0 - (1.0 - epsilon).sqrt()) / 2.0)
}
