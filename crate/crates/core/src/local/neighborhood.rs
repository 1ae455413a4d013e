use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::canon::{rooted_canonical_form, SmallGraph, MAX_VERTICES};
use super::LocalError;
use crate::cell::{CellSampler, RootCell};
use crate::group::GroupSpec;
use crate::sampling::SeedSpec;
use crate::stats::run_samples;

/// A finite rooted graph up to rooted isomorphism. Vertices are stored in
/// canonical order, so the root is vertex 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedNeighborhood {
    pub radius: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub canonical_hash: String,
}

impl RootedNeighborhood {
    /// Canonicalizes an arbitrary labeled rooted graph.
    pub fn from_graph(
        vertices: usize,
        edges: &[(usize, usize)],
        root: usize,
        radius: u32,
    ) -> Result<Self, LocalError> {
        if vertices > MAX_VERTICES {
            return Err(LocalError::TooLarge(vertices));
        }
        let form = rooted_canonical_form(&SmallGraph::new(vertices, edges), root);
        Ok(RootedNeighborhood {
            radius,
            vertices,
            edges: form.edges(),
            root: 0,
            canonical_hash: form.hash_hex(),
        })
    }
}

/// The radius-`r` ball around the identity in the Cayley subgraph induced
/// on the cell (the connected component of the root, truncated at `r`).
pub fn root_component_neighborhood(
    cell: &RootCell,
    group: GroupSpec,
    radius: u32,
) -> Result<RootedNeighborhood, LocalError> {
    if !cell.determined {
        return Err(LocalError::Undetermined);
    }
    let gens = group.generators();
    let e = group.identity();
    let mut index = HashMap::from([(e.clone(), 0usize)]);
    let mut order = vec![e.clone()];
    let mut queue = VecDeque::from([(e, 0u32)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for s in &gens {
            let y = group.mul(&x, s);
            if cell.contains(&y) && !index.contains_key(&y) {
                index.insert(y.clone(), order.len());
                order.push(y.clone());
                queue.push_back((y, d + 1));
            }
        }
    }
    if order.len() > MAX_VERTICES {
        return Err(LocalError::TooLarge(order.len()));
    }
    let mut edges = Vec::new();
    for (i, x) in order.iter().enumerate() {
        for s in &gens {
            if let Some(&j) = index.get(&group.mul(x, s)) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    RootedNeighborhood::from_graph(order.len(), &edges, 0, radius)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub count: u64,
    pub vertices: usize,
    pub example_graph: Vec<(usize, usize)>,
}

/// Empirical law of the root's radius-`r` neighborhood, keyed by canonical
/// hash. Undetermined samples are a symbol of their own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "DistributionWire", try_from = "DistributionWire")]
pub struct NeighborhoodDistribution {
    pub radius: u32,
    pub total: u64,
    pub undetermined: u64,
    pub counts: BTreeMap<String, DistributionEntry>,
    pub provenance: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct WireEntry {
    hash: String,
    count: u64,
    #[serde(default)]
    vertices: Option<usize>,
    example_graph: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct DistributionWire {
    radius: u32,
    total: u64,
    undetermined: u64,
    entries: Vec<WireEntry>,
    #[serde(default)]
    provenance: BTreeMap<String, serde_json::Value>,
}

impl From<NeighborhoodDistribution> for DistributionWire {
    fn from(d: NeighborhoodDistribution) -> Self {
        DistributionWire {
            radius: d.radius,
            total: d.total,
            undetermined: d.undetermined,
            entries: d
                .counts
                .into_iter()
                .map(|(hash, e)| WireEntry {
                    hash,
                    count: e.count,
                    vertices: Some(e.vertices),
                    example_graph: e.example_graph,
                })
                .collect(),
            provenance: d.provenance,
        }
    }
}

impl TryFrom<DistributionWire> for NeighborhoodDistribution {
    type Error = String;

    fn try_from(w: DistributionWire) -> Result<Self, String> {
        let mut counts = BTreeMap::new();
        for e in w.entries {
            let vertices = e.vertices.unwrap_or_else(|| {
                e.example_graph.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1)
            });
            let entry = DistributionEntry {
                count: e.count,
                vertices,
                example_graph: e.example_graph,
            };
            if counts.insert(e.hash.clone(), entry).is_some() {
                return Err(format!("duplicate hash {}", e.hash));
            }
        }
        let d = NeighborhoodDistribution {
            radius: w.radius,
            total: w.total,
            undetermined: w.undetermined,
            counts,
            provenance: w.provenance,
        };
        if d.counted() != d.total {
            return Err(format!(
                "counts plus undetermined sum to {}, total says {}",
                d.counted(),
                d.total
            ));
        }
        Ok(d)
    }
}

impl NeighborhoodDistribution {
    pub fn empty(radius: u32) -> Self {
        NeighborhoodDistribution {
            radius,
            total: 0,
            undetermined: 0,
            counts: BTreeMap::new(),
            provenance: BTreeMap::new(),
        }
    }

    fn counted(&self) -> u64 {
        self.counts.values().map(|e| e.count).sum::<u64>() + self.undetermined
    }

    pub fn record(&mut self, sample: Option<&RootedNeighborhood>) {
        self.total += 1;
        match sample {
            None => self.undetermined += 1,
            Some(n) => {
                self.counts
                    .entry(n.canonical_hash.clone())
                    .or_insert_with(|| DistributionEntry {
                        count: 0,
                        vertices: n.vertices,
                        example_graph: n.edges.clone(),
                    })
                    .count += 1
            }
        }
    }

    /// Pointwise sum of counts. Order-independent.
    pub fn merge(&mut self, other: &NeighborhoodDistribution) -> Result<(), LocalError> {
        if self.radius != other.radius {
            return Err(LocalError::RadiusMismatch(self.radius, other.radius));
        }
        self.total += other.total;
        self.undetermined += other.undetermined;
        for (h, e) in &other.counts {
            self.counts
                .entry(h.clone())
                .and_modify(|x| x.count += e.count)
                .or_insert_with(|| e.clone());
        }
        Ok(())
    }

    pub fn probability(&self, hash: &str) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(hash).map_or(0, |e| e.count) as f64 / self.total as f64
    }

    pub fn support_size(&self) -> usize {
        self.counts.len() + usize::from(self.undetermined > 0)
    }
}

/// Collects the neighborhood law of `sampler`'s root cells over
/// `n_samples` independent streams.
pub fn collect_distribution<S: CellSampler + ?Sized>(
    sampler: &S,
    radius: u32,
    n_samples: u64,
    seed: SeedSpec,
) -> Result<NeighborhoodDistribution, LocalError> {
    let group = sampler.group();
    let samples = run_samples(n_samples, |i| {
        let cell = sampler.sample_root(seed.stream(i));
        if cell.determined {
            root_component_neighborhood(&cell, group, radius).map(Some)
        } else {
            Ok(None)
        }
    });
    let mut dist = NeighborhoodDistribution::empty(radius);
    for s in samples {
        dist.record(s?.as_ref());
    }
    dist.provenance.insert("group".into(), group.to_string().into());
    dist.provenance.insert("master_seed".into(), seed.master_seed.into());
    Ok(dist)
}

/// Total variation distance between two empirical laws of equal radius,
/// with the undetermined bucket as its own symbol.
pub fn tv_distance(a: &NeighborhoodDistribution, b: &NeighborhoodDistribution) -> Result<f64, LocalError> {
    if a.radius != b.radius {
        return Err(LocalError::RadiusMismatch(a.radius, b.radius));
    }
    if a.total == 0 || b.total == 0 {
        return Err(LocalError::Empty);
    }
    let frac = |d: &NeighborhoodDistribution, c: u64| c as f64 / d.total as f64;
    let mut sum = (frac(a, a.undetermined) - frac(b, b.undetermined)).abs();
    for (h, e) in &a.counts {
        sum += (frac(a, e.count) - b.probability(h)).abs();
    }
    for (h, e) in &b.counts {
        if !a.counts.contains_key(h) {
            sum += frac(b, e.count);
        }
    }
    Ok((sum / 2.0).min(1.0))
}
