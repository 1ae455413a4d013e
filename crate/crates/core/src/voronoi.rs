//! Root cell of the Bernoulli Voronoi tessellation under the word metric.
//!
//! Every element goes to its nearest point of the Bernoulli subset; among
//! equally near points it picks the one with the smallest mark. That rule is
//! an equivariant factor of the marked process, and it makes every cell
//! geodesically star-shaped around its center, so a BFS from the center over
//! the Cayley graph finds the whole cell.
//!
//! The sampler grows its window until the cell is certified: an element `y`
//! is decided once `d(e,y) + d(y,c) <= R`, because every point that could
//! compete with the center `c` for `y` then lies inside the sampled ball.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cell::{CellSampler, RootCell};
use crate::group::{Element, GroupSpec};
use crate::sampling::{extend_in_field, BernoulliField, IntensitySpec, Mark, MarkedConfiguration, SeedSpec};
use crate::stats::{mean_estimate, run_samples, Estimate};

pub const MIN_IDENTITY_SAMPLES: u64 = 1000;
/// Above this undetermined fraction the intensity check raises a warning.
pub const UNDETERMINED_WARNING: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvtParams {
    pub group: GroupSpec,
    pub p: IntensitySpec,
    pub r_max: u32,
}

impl BvtParams {
    pub fn new(group: GroupSpec, p: f64, r_max: u32) -> Result<Self, crate::Error> {
        if r_max == 0 {
            return Err(crate::Error::Invalid("r_max must be at least 1".into()));
        }
        Ok(BvtParams {
            group,
            p: IntensitySpec::new(p)?,
            r_max,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiRootCell {
    pub cell: RootCell,
    pub center: Option<Element>,
    pub nearest_distance: Option<u64>,
    pub determined: bool,
    pub sampled_radius: u32,
}

/// Outcome of one attempt at the current radius.
enum Attempt {
    Done { center: Element, distance: u64, members: Vec<Element> },
    /// Needs at least this radius; carries what was certified so far.
    Grow { need: u32, center: Option<(Element, u64)>, members: Vec<Element> },
}

fn attempt(config: &MarkedConfiguration, root: &Element) -> Attempt {
    let w = config.window();
    let g = w.group();
    let r = w.radius() as u64;
    let points: Vec<(&Element, Mark)> = config.points().collect();
    let Some(&(c, cm)) = points
        .iter()
        .min_by_key(|(x, m)| (g.distance(root, x), *m, *x))
    else {
        return Attempt::Grow { need: w.radius() + 1, center: None, members: Vec::new() };
    };
    let d0 = g.distance(root, c);

    // Is c the assigned center of z? Requires every competitor in the window.
    let owned_by_c = |z: &Element, dzc: u64| {
        points.iter().all(|&(h, hm)| {
            let dh = g.distance(z, h);
            dh > dzc || (dh == dzc && (hm, h) >= (cm, c))
        })
    };

    let gens = g.generators();
    let mut members = vec![c.clone()];
    let mut seen: HashSet<Element> = HashSet::from([c.clone()]);
    let mut queue = VecDeque::from([c.clone()]);
    let mut need = 0u64;
    while let Some(y) = queue.pop_front() {
        for s in &gens {
            let z = g.mul(&y, s);
            if !seen.insert(z.clone()) {
                continue;
            }
            let dzc = g.distance(&z, c);
            let reach = g.distance(root, &z) + dzc;
            if reach > r {
                need = need.max(reach);
                continue;
            }
            if owned_by_c(&z, dzc) {
                members.push(z.clone());
                queue.push_back(z);
            }
        }
    }
    members.sort();
    if need > 0 {
        Attempt::Grow {
            need: need as u32,
            center: Some((c.clone(), d0)),
            members,
        }
    } else {
        debug_assert!(members.binary_search(root).is_ok());
        Attempt::Done { center: c.clone(), distance: d0, members }
    }
}

/// The cell containing `root` in the tessellation of `field`.
pub fn cell_at(params: &BvtParams, field: &BernoulliField, root: &Element) -> VoronoiRootCell {
    let g = params.group;
    let mut config = field.materialize(g.ball(root, 1).expect("radius-1 ball fits the cap"));
    loop {
        let radius = config.window().radius();
        match attempt(&config, root) {
            Attempt::Done { center, distance, members } => {
                return VoronoiRootCell {
                    cell: RootCell {
                        in_pi_class: true,
                        center: Some(center.clone()),
                        members,
                        determined: true,
                    },
                    center: Some(center),
                    nearest_distance: Some(distance),
                    determined: true,
                    sampled_radius: radius,
                };
            }
            Attempt::Grow { need, center, members } => {
                let next = need.max(radius + 1).min(params.r_max);
                let grown = if next > radius {
                    extend_in_field(&config, field, next).ok()
                } else {
                    None
                };
                match grown {
                    Some(c) => config = c,
                    None => {
                        let (center, distance) = center.unzip();
                        let members = if members.is_empty() {
                            vec![root.clone()]
                        } else {
                            members
                        };
                        return VoronoiRootCell {
                            cell: RootCell {
                                in_pi_class: center.is_some(),
                                center: center.clone(),
                                members,
                                determined: false,
                            },
                            center,
                            nearest_distance: distance,
                            determined: false,
                            sampled_radius: radius,
                        };
                    }
                }
            }
        }
    }
}

pub fn sample_bvt_root_cell(params: &BvtParams, seed: SeedSpec) -> VoronoiRootCell {
    let field = BernoulliField::new(params.group, params.p, seed);
    cell_at(params, &field, &params.group.identity())
}

#[derive(Clone, Copy, Debug)]
pub struct BvtSampler(pub BvtParams);

impl CellSampler for BvtSampler {
    fn group(&self) -> GroupSpec {
        self.0.group
    }

    fn sample_root(&self, seed: SeedSpec) -> RootCell {
        sample_bvt_root_cell(&self.0, seed).cell
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityReport {
    pub p: f64,
    /// `E[1/|cell(o)|]` over determined samples.
    pub estimate: Estimate,
    pub deviation_in_se: f64,
    pub within_4se: bool,
    pub undetermined: u64,
    pub undetermined_fraction: f64,
    /// `1/|cell| <= 1`, so excluded samples move the mean by at most this.
    pub bias_bound: f64,
    pub warning: bool,
}

/// Mass-transport check: sending mass `1/|V(y)|` from each element of a
/// cell to its center gives `E[1/|cell(o)|] = p`.
pub fn bvt_intensity_identity(
    params: &BvtParams,
    n_samples: u64,
    seed: SeedSpec,
) -> Result<IntensityReport, crate::Error> {
    if n_samples < MIN_IDENTITY_SAMPLES {
        return Err(crate::Error::Invalid(format!(
            "need at least {MIN_IDENTITY_SAMPLES} samples, got {n_samples}"
        )));
    }
    let rows = run_samples(n_samples, |i| {
        let c = sample_bvt_root_cell(params, seed.stream(i));
        c.determined.then(|| 1.0 / c.cell.size() as f64)
    });
    let values: Vec<f64> = rows.iter().flatten().copied().collect();
    let undetermined = n_samples - values.len() as u64;
    let estimate = mean_estimate(&values, seed);
    let p = params.p.p();
    let frac = undetermined as f64 / n_samples as f64;
    let dev = if estimate.std_error > 0.0 {
        (estimate.value - p).abs() / estimate.std_error
    } else if estimate.value == p {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(IntensityReport {
        p,
        within_4se: dev <= 4.0,
        deviation_in_se: dev,
        estimate,
        undetermined,
        undetermined_fraction: frac,
        bias_bound: frac,
        warning: frac > UNDETERMINED_WARNING,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSizeHistogram {
    pub samples: u64,
    /// Cell size -> fraction of all samples.
    pub masses: BTreeMap<usize, f64>,
    pub undetermined_fraction: f64,
}

pub fn bvt_cell_size_histogram(params: &BvtParams, n_samples: u64, seed: SeedSpec) -> CellSizeHistogram {
    let sizes = run_samples(n_samples, |i| {
        let c = sample_bvt_root_cell(params, seed.stream(i));
        c.determined.then(|| c.cell.size())
    });
    let mut counts = BTreeMap::<usize, u64>::new();
    let mut undetermined = 0u64;
    for s in sizes {
        match s {
            Some(s) => *counts.entry(s).or_default() += 1,
            None => undetermined += 1,
        }
    }
    let n = n_samples.max(1) as f64;
    CellSizeHistogram {
        samples: n_samples,
        masses: counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
        undetermined_fraction: undetermined as f64 / n,
    }
}

/// One sampled tessellation, with cells computed on demand and cached.
pub struct BvtView {
    params: BvtParams,
    field: BernoulliField,
    cells: RefCell<HashMap<Element, std::rc::Rc<VoronoiRootCell>>>,
}

impl BvtView {
    pub fn new(params: BvtParams, seed: SeedSpec) -> Self {
        BvtView {
            field: BernoulliField::new(params.group, params.p, seed),
            params,
            cells: RefCell::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &BernoulliField {
        &self.field
    }

    /// The cell containing `g`.
    pub fn cell_of(&self, g: &Element) -> std::rc::Rc<VoronoiRootCell> {
        if let Some(c) = self.cells.borrow().get(g) {
            return c.clone();
        }
        let c = std::rc::Rc::new(cell_at(&self.params, &self.field, g));
        self.cells.borrow_mut().insert(g.clone(), c.clone());
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::CayleyWindow;

    fn z1() -> GroupSpec {
        GroupSpec::free_abelian(1).unwrap()
    }

    fn z2() -> GroupSpec {
        GroupSpec::free_abelian(2).unwrap()
    }

    /// A configuration on `B_r` of `Z` with the given points and marks.
    fn forced(r: u32, pts: &[(i64, f64)]) -> MarkedConfiguration {
        let w = CayleyWindow::build(z1(), z1().identity(), r, 1000).unwrap();
        let marks = w
            .elements()
            .iter()
            .map(|g| {
                pts.iter()
                    .find(|(x, _)| Element::Vector(vec![*x]) == *g)
                    .map(|&(_, m)| Mark((m * u64::MAX as f64) as u64))
            })
            .collect();
        MarkedConfiguration::from_parts(w, marks)
    }

    fn done(a: Attempt) -> (Element, u64, Vec<Element>) {
        match a {
            Attempt::Done { center, distance, members } => (center, distance, members),
            Attempt::Grow { need, .. } => panic!("undetermined, needs radius {need}"),
        }
    }

    fn center_of(a: Attempt) -> (Element, u64) {
        match a {
            Attempt::Done { center, distance, .. } => (center, distance),
            Attempt::Grow { center, .. } => center.expect("center certified"),
        }
    }

    #[test]
    fn forced_configurations() {
        let e = z1().identity();
        let two = Element::Vector(vec![2]);
        assert_eq!(center_of(attempt(&forced(8, &[(-3, 0.5), (2, 0.5)]), &e)), (two.clone(), 2));
        assert_eq!(center_of(attempt(&forced(8, &[(-2, 0.7), (2, 0.3)]), &e)).0, two);
        assert_eq!(
            center_of(attempt(&forced(8, &[(-2, 0.3), (2, 0.7)]), &e)).0,
            Element::Vector(vec![-2])
        );
        // With a third point the cell of 2 is bounded and fully certified.
        let (c, d, members) = done(attempt(&forced(8, &[(-3, 0.5), (2, 0.5), (5, 0.5)]), &e));
        assert_eq!((c, d), (two, 2));
        let xs: Vec<Element> = (0..=3).map(|x| Element::Vector(vec![x])).collect();
        assert_eq!(members, xs);
    }

    #[test]
    fn empty_window_needs_growth() {
        let e = z1().identity();
        assert!(matches!(attempt(&forced(3, &[]), &e), Attempt::Grow { need: 4, center: None, .. }));
    }

    #[test]
    fn cell_on_z_between_far_points() {
        let e = z1().identity();
        let (c, _, members) = done(attempt(&forced(12, &[(-4, 0.9), (0, 0.5), (3, 0.1)]), &e));
        assert_eq!(c, e);
        // -2 ties between -4 and 0: mark 0.5 < 0.9 so it stays with 0.
        // 2 is nearer 3.
        let xs: Vec<Element> = [-2, -1, 0, 1].iter().map(|&x| Element::Vector(vec![x])).collect();
        assert_eq!(members, xs);
    }

    #[test]
    fn root_point_is_its_own_center() {
        let params = BvtParams::new(z2(), 0.3, 50).unwrap();
        let mut seen = 0;
        for i in 0..2000 {
            let c = sample_bvt_root_cell(&params, SeedSpec::new(4, i));
            let field = BernoulliField::new(z2(), params.p, SeedSpec::new(4, i));
            if field.draw(&z2().identity()).is_some() {
                seen += 1;
                assert_eq!(c.center, Some(z2().identity()));
                assert_eq!(c.nearest_distance, Some(0));
            }
            assert!(c.cell.contains(&z2().identity()));
            assert!(c.cell.size() >= 1);
        }
        assert!(seen > 400);
    }

    #[test]
    fn doubling_r_max_reproduces_determined_cells() {
        for group in [z2(), GroupSpec::free(2).unwrap()] {
            let params = BvtParams::new(group, 0.35, 6).unwrap();
            let wide = BvtParams { r_max: 12, ..params };
            for i in 0..1000 {
                let a = sample_bvt_root_cell(&params, SeedSpec::new(1, i));
                if a.determined {
                    let b = sample_bvt_root_cell(&wide, SeedSpec::new(1, i));
                    assert_eq!(a.cell, b.cell);
                    assert_eq!(a.nearest_distance, b.nearest_distance);
                }
            }
        }
    }

    #[test]
    fn undetermined_fraction_shrinks_with_r_max() {
        let count = |r_max| {
            let params = BvtParams::new(z2(), 0.05, r_max).unwrap();
            (0..600)
                .filter(|&i| !sample_bvt_root_cell(&params, SeedSpec::new(6, i)).determined)
                .count()
        };
        let fracs: Vec<usize> = [2, 4, 8, 16].into_iter().map(count).collect();
        assert!(fracs.windows(2).all(|w| w[0] >= w[1]), "{fracs:?}");
        assert!(fracs[0] > fracs[3]);
    }

    #[test]
    fn translation_moves_cells() {
        let f2 = GroupSpec::free(2).unwrap();
        let t = f2.parse_element("aab").unwrap();
        for group_t in [(z2(), Element::Vector(vec![3, -2])), (f2, t)] {
            let (g, t) = group_t;
            let params = BvtParams::new(g, 0.3, 30).unwrap();
            for i in 0..300 {
                let seed = SeedSpec::new(2, i);
                let base = sample_bvt_root_cell(&params, seed);
                let field = BernoulliField::new(g, params.p, seed).in_frame(&t);
                let moved = cell_at(&params, &field, &t);
                assert_eq!(moved.cell, base.cell.clone().map_members(|x| g.mul(&t, x)));
            }
        }
    }

    #[test]
    fn cells_partition_a_window() {
        // Cells of neighbors either coincide or are disjoint.
        let params = BvtParams::new(z2(), 0.2, 40).unwrap();
        let view = BvtView::new(params, SeedSpec::new(3, 3));
        let ball = z2().ball(&z2().identity(), 5).unwrap();
        for x in ball.elements() {
            let cx = view.cell_of(x);
            assert!(cx.cell.contains(x));
            for y in &cx.cell.members {
                assert_eq!(view.cell_of(y).cell.members, cx.cell.members);
            }
        }
    }

    #[test]
    fn high_intensity_gives_singletons() {
        let params = BvtParams::new(z2(), 0.999, 10).unwrap();
        let r = bvt_intensity_identity(&params, 2000, SeedSpec::new(0, 0)).unwrap();
        assert!(r.estimate.value > 0.99);
    }

    #[test]
    fn histogram_partitions_mass() {
        let params = BvtParams::new(z2(), 0.1, 3).unwrap();
        let h = bvt_cell_size_histogram(&params, 2000, SeedSpec::new(0, 0));
        let total: f64 = h.masses.values().sum::<f64>() + h.undetermined_fraction;
        assert!((total - 1.0).abs() < 1e-12);
        assert!(h.undetermined_fraction > 0.0);
        assert!(h.masses.keys().all(|&k| k >= 1));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(BvtParams::new(z2(), 1.0, 5).is_err());
        assert!(BvtParams::new(z2(), 0.5, 0).is_err());
    }
}
