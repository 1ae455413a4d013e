//! Seedable, element-keyed sampling of marked Bernoulli subsets.
//!
//! Every random bit attached to a group element is a pure function of the
//! seed and the element's normal form. Sampling a big window and restricting
//! it is therefore identical to sampling the small window directly, and no
//! result depends on enumeration order or thread count.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{CellSampler, RootCell};
use crate::group::{CayleyWindow, Element, GroupError, GroupSpec, DEFAULT_BALL_CAP};

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("intensity must lie in the open interval (0,1), got {0}")]
    Intensity(f64),
    #[error("new radius {new} must exceed the current radius {current}")]
    NotLarger { current: u32, new: u32 },
    #[error("coinduction needs Z^d with 1 <= k <= d, got ambient {ambient} and subgroup rank {sub}")]
    Axis { ambient: String, sub: usize },
    #[error("cell set element {0} is not in the coordinate subgroup")]
    OutsideSubgroup(String),
    #[error("base sampler lives on {found}, expected {expected}")]
    BaseGroup { expected: String, found: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    /// The `i`-th independent sample stream under this master seed.
    pub fn stream(&self, i: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, i)
    }

    /// A seed for a named sub-experiment; distinct tags give unrelated streams.
    pub fn derive(&self, tag: u64) -> SeedSpec {
        SeedSpec::new(
            splitmix64(self.master_seed ^ splitmix64(tag ^ 0x6a09_e667_f3bc_c908)),
            self.stream_index,
        )
    }

    fn stream_key(&self) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ splitmix64(self.stream_index ^ 0x3c6e_f372_fe94_f82b))
    }
}

/// A uniform `[0,1]` mark stored as raw 64 bits so comparisons are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mark(pub u64);

impl Mark {
    pub fn value(self) -> f64 {
        self.0 as f64 / u64::MAX as f64
    }
}

/// Probability `p` that an element lies in the Bernoulli subset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensitySpec(f64);

impl IntensitySpec {
    pub fn new(p: f64) -> Result<Self, SamplingError> {
        if p > 0.0 && p < 1.0 {
            Ok(IntensitySpec(p))
        } else {
            Err(SamplingError::Intensity(p))
        }
    }

    pub fn p(self) -> f64 {
        self.0
    }
}

/// The marked Bernoulli subset of the whole group, evaluated lazily.
///
/// `frame` re-keys the streams: element `g` draws the randomness of
/// `frame^{-1} g`, so the field in frame `t` is the translate by `t` of the
/// field in the identity frame.
#[derive(Clone, Debug)]
pub struct BernoulliField {
    group: GroupSpec,
    intensity: IntensitySpec,
    stream_key: u64,
    frame_inverse: Option<Element>,
}

impl BernoulliField {
    pub fn new(group: GroupSpec, intensity: IntensitySpec, seed: SeedSpec) -> Self {
        BernoulliField {
            group,
            intensity,
            stream_key: seed.stream_key(),
            frame_inverse: None,
        }
    }

    pub fn in_frame(mut self, frame: &Element) -> Self {
        self.frame_inverse = if frame.is_identity() {
            None
        } else {
            Some(self.group.inverse(frame))
        };
        self
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn intensity(&self) -> IntensitySpec {
        self.intensity
    }

    /// The random key of `g`, after undoing the frame.
    pub fn key_of(&self, g: &Element) -> u64 {
        match &self.frame_inverse {
            None => g.stable_key(),
            Some(t) => self.group.mul(t, g).stable_key(),
        }
    }

    /// The mark of a keyed element if it is a point of the subset.
    #[inline]
    pub fn draw_key(&self, key: u64) -> Option<Mark> {
        let u = splitmix64(self.stream_key ^ key);
        (unit_f64(u) < self.intensity.0).then(|| Mark(splitmix64(u ^ 0xd1b5_4a32_d192_ed03)))
    }

    pub fn draw(&self, g: &Element) -> Option<Mark> {
        self.draw_key(self.key_of(g))
    }

    pub fn materialize(&self, window: CayleyWindow) -> MarkedConfiguration {
        let marks = window.elements().iter().map(|g| self.draw(g)).collect();
        MarkedConfiguration { window, marks }
    }
}

/// A sampled window: which elements are points of the subset, and their marks.
#[derive(Clone, Debug)]
pub struct MarkedConfiguration {
    window: CayleyWindow,
    marks: Vec<Option<Mark>>,
}

impl MarkedConfiguration {
    /// Builds a configuration from explicit marks, one slot per window element.
    pub fn from_parts(window: CayleyWindow, marks: Vec<Option<Mark>>) -> Self {
        assert_eq!(window.len(), marks.len(), "one mark slot per window element");
        MarkedConfiguration { window, marks }
    }

    pub fn window(&self) -> &CayleyWindow {
        &self.window
    }

    /// Mark of window element `i`, if it is a point.
    pub fn mark_at(&self, i: usize) -> Option<Mark> {
        self.marks[i]
    }

    pub fn mark_of(&self, g: &Element) -> Option<Mark> {
        self.window.index_of(g).and_then(|i| self.marks[i])
    }

    pub fn is_point(&self, g: &Element) -> bool {
        self.mark_of(g).is_some()
    }

    /// Window indices of the points, in window order.
    pub fn point_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.marks.iter().enumerate().filter_map(|(i, m)| m.map(|_| i))
    }

    pub fn points(&self) -> impl Iterator<Item = (&Element, Mark)> + '_ {
        self.point_indices().map(|i| (self.window.element(i), self.marks[i].unwrap()))
    }

    pub fn point_count(&self) -> usize {
        self.marks.iter().filter(|m| m.is_some()).count()
    }

    /// The configuration seen through the first `radius` layers only.
    pub fn restrict(&self, radius: u32) -> Vec<Option<Mark>> {
        self.marks[..self.window.count_within(radius)].to_vec()
    }
}

pub fn sample_marked(
    window: CayleyWindow,
    intensity: IntensitySpec,
    seed: SeedSpec,
) -> MarkedConfiguration {
    BernoulliField::new(window.group(), intensity, seed).materialize(window)
}

/// Grows a configuration to `new_radius`, drawing only the newly revealed
/// elements; the old window is untouched.
pub fn extend(
    config: &MarkedConfiguration,
    intensity: IntensitySpec,
    new_radius: u32,
    seed: SeedSpec,
) -> Result<MarkedConfiguration, SamplingError> {
    extend_in_field(
        config,
        &BernoulliField::new(config.window.group(), intensity, seed),
        new_radius,
    )
}

pub(crate) fn extend_in_field(
    config: &MarkedConfiguration,
    field: &BernoulliField,
    new_radius: u32,
) -> Result<MarkedConfiguration, SamplingError> {
    let current = config.window.radius();
    if new_radius <= current {
        return Err(SamplingError::NotLarger {
            current,
            new: new_radius,
        });
    }
    let window = config.window.grown(new_radius, DEFAULT_BALL_CAP)?;
    let mut marks = config.marks.clone();
    marks.extend(window.elements()[config.marks.len()..].iter().map(|g| field.draw(g)));
    Ok(MarkedConfiguration { window, marks })
}

/// The coordinate subgroup `Z^k x {0}` of `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateSubgroup {
    pub ambient_rank: usize,
    pub sub_rank: usize,
}

impl CoordinateSubgroup {
    pub fn new(ambient_rank: usize, sub_rank: usize) -> Result<Self, SamplingError> {
        if sub_rank == 0 || sub_rank > ambient_rank {
            return Err(SamplingError::Axis {
                ambient: format!("z:{ambient_rank}"),
                sub: sub_rank,
            });
        }
        Ok(CoordinateSubgroup {
            ambient_rank,
            sub_rank,
        })
    }

    pub fn ambient(&self) -> GroupSpec {
        GroupSpec::FreeAbelian {
            rank: self.ambient_rank,
        }
    }

    pub fn subgroup(&self) -> GroupSpec {
        GroupSpec::FreeAbelian {
            rank: self.sub_rank,
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        matches!(g, Element::Vector(v) if v.len() == self.ambient_rank
            && v[self.sub_rank..].iter().all(|&x| x == 0))
    }

    /// Splits `g` into its subgroup coordinates and its coset label.
    pub fn split(&self, g: &Element) -> (Element, Vec<i64>) {
        match g {
            Element::Vector(v) => (
                Element::Vector(v[..self.sub_rank].to_vec()),
                v[self.sub_rank..].to_vec(),
            ),
            Element::Word(_) => panic!("coordinate subgroups live in Z^d"),
        }
    }

    pub fn embed(&self, h: &Element, coset: &[i64]) -> Element {
        match h {
            Element::Vector(v) => Element::Vector(v.iter().chain(coset).copied().collect()),
            Element::Word(_) => panic!("coordinate subgroups live in Z^d"),
        }
    }

    /// Projects a set lying in the subgroup to `Z^k` coordinates.
    pub fn project_set(&self, set: &[Element]) -> Result<Vec<Element>, SamplingError> {
        set.iter()
            .map(|g| {
                if self.contains(g) {
                    Ok(self.split(g).0)
                } else {
                    Err(SamplingError::OutsideSubgroup(g.to_string()))
                }
            })
            .collect()
    }

    /// Seed for the copy of the base relation living on coset `label`.
    pub fn coset_seed(&self, seed: SeedSpec, label: &[i64]) -> SeedSpec {
        seed.derive(Element::Vector(label.to_vec()).stable_key())
    }
}

/// Root cell of the relation coinduced from `base` (an IRE on the
/// coordinate subgroup) to `Z^d`: one independent copy of `base` per coset,
/// each on its own coset-keyed substream.
///
/// The window must be a window of `Z^d`. Only the identity coset influences
/// the class of the identity; the returned cell lies inside it.
pub fn coinduce<S: CellSampler + ?Sized>(
    axis: &CoordinateSubgroup,
    base: &S,
    window: &CayleyWindow,
    seed: SeedSpec,
) -> Result<RootCell, SamplingError> {
    if base.group() != axis.subgroup() {
        return Err(SamplingError::BaseGroup {
            expected: axis.subgroup().to_string(),
            found: base.group().to_string(),
        });
    }
    if window.group() != axis.ambient() {
        return Err(SamplingError::BaseGroup {
            expected: axis.ambient().to_string(),
            found: window.group().to_string(),
        });
    }
    let label = axis.split(&axis.ambient().identity()).1;
    let cell = base.sample_root(axis.coset_seed(seed, &label));
    Ok(cell.map_members(|h| axis.embed(h, &label)))
}

/// Every window element's coset label, grouped: the window partitioned by
/// cosets of the coordinate subgroup.
pub fn coset_partition(
    axis: &CoordinateSubgroup,
    window: &CayleyWindow,
) -> std::collections::BTreeMap<Vec<i64>, Vec<usize>> {
    let mut parts = std::collections::BTreeMap::<Vec<i64>, Vec<usize>>::new();
    for (i, g) in window.elements().iter().enumerate() {
        parts.entry(axis.split(g).1).or_default().push(i);
    }
    parts
}
