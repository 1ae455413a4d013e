//! Mass-transport checks: for a diagonally invariant `f`, the expected mass
//! the root sends out equals the expected mass it receives.

use serde::{Deserialize, Serialize};

use super::LocalError;
use crate::group::{Element, GroupSpec};
use crate::sampling::{BernoulliField, IntensitySpec, Mark, MarkedConfiguration, SeedSpec};
use crate::stats::{mean_estimate, run_samples, Estimate};
use crate::voronoi::{BvtParams, BvtView};

/// Read access to the marks of a sampled configuration.
pub trait PointView {
    fn group(&self) -> GroupSpec;
    fn mark(&self, g: &Element) -> Option<Mark>;
}

impl PointView for MarkedConfiguration {
    fn group(&self) -> GroupSpec {
        self.window().group()
    }

    fn mark(&self, g: &Element) -> Option<Mark> {
        self.mark_of(g)
    }
}

impl PointView for BvtView {
    fn group(&self) -> GroupSpec {
        self.field().group()
    }

    fn mark(&self, g: &Element) -> Option<Mark> {
        self.field().draw(g)
    }
}

/// An invariant marked process that can be sampled around the identity.
pub trait MarkedProcess: Sync {
    type View;

    fn group(&self) -> GroupSpec;
    /// Largest distance from the identity at which the view is faithful.
    fn window_radius(&self) -> u32;
    fn sample_view(&self, seed: SeedSpec) -> Self::View;
}

/// Bernoulli subset of intensity `p` with uniform marks, materialized on a ball.
#[derive(Clone, Copy, Debug)]
pub struct BernoulliProcess {
    pub group: GroupSpec,
    pub intensity: IntensitySpec,
    pub window_radius: u32,
}

impl MarkedProcess for BernoulliProcess {
    type View = MarkedConfiguration;

    fn group(&self) -> GroupSpec {
        self.group
    }

    fn window_radius(&self) -> u32 {
        self.window_radius
    }

    fn sample_view(&self, seed: SeedSpec) -> MarkedConfiguration {
        let w = self
            .group
            .ball(&self.group.identity(), self.window_radius)
            .expect("process window within the ball cap");
        BernoulliField::new(self.group, self.intensity, seed).materialize(w)
    }
}

/// The Voronoi tessellation of a Bernoulli subset, cells computed lazily.
#[derive(Clone, Copy, Debug)]
pub struct BvtProcess(pub BvtParams);

impl MarkedProcess for BvtProcess {
    type View = BvtView;

    fn group(&self) -> GroupSpec {
        self.0.group
    }

    fn window_radius(&self) -> u32 {
        self.0.r_max
    }

    fn sample_view(&self, seed: SeedSpec) -> BvtView {
        BvtView::new(self.0, seed)
    }
}

/// A bounded local mass transport `f(x, y; configuration)`.
pub trait TransportFn<V>: Sync {
    /// How far beyond its arguments `f` inspects the configuration.
    fn reach(&self) -> u32 {
        0
    }

    fn eval(&self, x: &Element, y: &Element, view: &V) -> f64;
}

/// `f(x, y) = 1{x = y}`.
#[derive(Clone, Copy, Debug)]
pub struct Diagonal;

impl<V> TransportFn<V> for Diagonal {
    fn eval(&self, x: &Element, y: &Element, _: &V) -> f64 {
        f64::from(u8::from(x == y))
    }
}

/// `f(x, y) = 1{y a point, d(x,y) <= radius}`.
#[derive(Clone, Copy, Debug)]
pub struct NearPoint {
    pub radius: u64,
}

impl<V: PointView> TransportFn<V> for NearPoint {
    fn eval(&self, x: &Element, y: &Element, view: &V) -> f64 {
        let near = view.group().distance(x, y) <= self.radius;
        f64::from(u8::from(near && view.mark(y).is_some()))
    }
}

/// `f(x, y) = mark(y) * 1{y a point, d(x,y) <= radius}`.
#[derive(Clone, Copy, Debug)]
pub struct MarkedNearPoint {
    pub radius: u64,
}

impl<V: PointView> TransportFn<V> for MarkedNearPoint {
    fn eval(&self, x: &Element, y: &Element, view: &V) -> f64 {
        if view.group().distance(x, y) > self.radius {
            return 0.0;
        }
        view.mark(y).map_or(0.0, Mark::value)
    }
}

/// `f(x, y) = 1{y a point, x in V(y)} / |V(y)|`: each cell spreads one unit
/// of mass from its center evenly over its members.
#[derive(Clone, Copy, Debug)]
pub struct VoronoiShare;

impl TransportFn<BvtView> for VoronoiShare {
    fn eval(&self, x: &Element, y: &Element, view: &BvtView) -> f64 {
        if view.mark(y).is_none() {
            return 0.0;
        }
        let cell = view.cell_of(y);
        if cell.cell.contains(x) {
            1.0 / cell.cell.size() as f64
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtpReport {
    pub margin: u32,
    /// `E[sum_v f(v, o)]`.
    pub incoming: Estimate,
    /// `E[sum_v f(o, v)]`.
    pub outgoing: Estimate,
    /// Per-sample `incoming - outgoing`.
    pub difference: Estimate,
    pub agree_within_4se: bool,
}

/// Estimates both sides of the transport identity with `v` ranging over
/// the ball of radius `margin` around the identity.
pub fn mtp_check<P, F>(
    process: &P,
    f: &F,
    margin: u32,
    n_samples: u64,
    seed: SeedSpec,
) -> Result<MtpReport, LocalError>
where
    P: MarkedProcess,
    F: TransportFn<P::View>,
{
    let need = margin + f.reach();
    if need > process.window_radius() {
        return Err(LocalError::MarginExceedsWindow {
            need,
            window: process.window_radius(),
        });
    }
    let group = process.group();
    let o = group.identity();
    let ball = group.ball(&o, margin)?;
    let rows = run_samples(n_samples, |i| {
        let view = process.sample_view(seed.stream(i));
        let mut incoming = 0.0;
        let mut outgoing = 0.0;
        for v in ball.elements() {
            incoming += f.eval(v, &o, &view);
            outgoing += f.eval(&o, v, &view);
        }
        (incoming, outgoing)
    });
    let incoming: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let outgoing: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.0 - r.1).collect();
    let difference = mean_estimate(&diff, seed);
    Ok(MtpReport {
        margin,
        incoming: mean_estimate(&incoming, seed),
        outgoing: mean_estimate(&outgoing, seed),
        agree_within_4se: difference.within_se(0.0, 4.0),
        difference,
    })
}
