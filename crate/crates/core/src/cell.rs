//! The class of the identity under a sampled random equivalence relation.

use serde::{Deserialize, Serialize};

use crate::group::{Element, GroupSpec};
use crate::sampling::SeedSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCell {
    /// The class of the identity, sorted by normal form.
    pub members: Vec<Element>,
    /// The point of the subset the identity is related to, if any.
    pub center: Option<Element>,
    /// Whether the identity is related to a point of the subset.
    pub in_pi_class: bool,
    /// False when the sampler gave up before the class was certified.
    pub determined: bool,
}

impl RootCell {
    pub fn singleton(group: GroupSpec) -> Self {
        RootCell {
            members: vec![group.identity()],
            center: None,
            in_pi_class: false,
            determined: true,
        }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.members.binary_search(g).is_ok()
    }

    pub fn map_members(self, f: impl Fn(&Element) -> Element) -> RootCell {
        let mut members: Vec<Element> = self.members.iter().map(&f).collect();
        members.sort();
        RootCell {
            members,
            center: self.center.as_ref().map(&f),
            in_pi_class: self.in_pi_class,
            determined: self.determined,
        }
    }
}

/// Anything that draws independent root cells of an invariant random
/// equivalence relation, one per seed stream.
pub trait CellSampler: Sync {
    fn group(&self) -> GroupSpec;

    fn sample_root(&self, seed: SeedSpec) -> RootCell;
}

impl<S: CellSampler + ?Sized> CellSampler for &S {
    fn group(&self) -> GroupSpec {
        (**self).group()
    }

    fn sample_root(&self, seed: SeedSpec) -> RootCell {
        (**self).sample_root(seed)
    }
}

/// The trivial relation: every class is a singleton.
#[derive(Clone, Copy, Debug)]
pub struct SingletonSampler(pub GroupSpec);

impl CellSampler for SingletonSampler {
    fn group(&self) -> GroupSpec {
        self.0
    }

    fn sample_root(&self, _seed: SeedSpec) -> RootCell {
        RootCell::singleton(self.0)
    }
}
