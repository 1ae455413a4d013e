//! Exact law of the identity's class for tiny cell sets, by enumerating
//! every subset of the determinacy window and every relevant mark order.
//!
//! Deliberately shares no code with the sampler: tiles and covering sets are
//! recomputed here from group products on plain element sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{determinacy_window, CellSet, FireError};
use crate::group::Element;

pub const WINDOW_CAP: usize = 22;
pub const CENTERS_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExactOutcome {
    pub in_pi_class: bool,
    pub cell_size: usize,
}

/// Joint law of (tied to a point, class size) for the identity's class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactLaw {
    pub window_size: usize,
    pub potential_centers: usize,
    #[serde(with = "law_entries")]
    pub law: BTreeMap<ExactOutcome, f64>,
}

mod law_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        in_pi_class: bool,
        cell_size: usize,
        probability: f64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<ExactOutcome, f64>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(k, &p)| Entry {
                in_pi_class: k.in_pi_class,
                cell_size: k.cell_size,
                probability: p,
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<ExactOutcome, f64>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter()
            .map(|e| {
                (
                    ExactOutcome {
                        in_pi_class: e.in_pi_class,
                        cell_size: e.cell_size,
                    },
                    e.probability,
                )
            })
            .collect())
    }
}

impl ExactLaw {
    pub fn total_mass(&self) -> f64 {
        self.law.values().sum()
    }

    /// `P[root tied to a point]`.
    pub fn prob_in_pi_class(&self) -> f64 {
        self.law.iter().filter(|(k, _)| k.in_pi_class).map(|(_, p)| p).sum()
    }

    /// `E[|class| ; root tied to a point]`.
    pub fn expected_size_in_pi_class(&self) -> f64 {
        self.law
            .iter()
            .filter(|(k, _)| k.in_pi_class)
            .map(|(k, p)| k.cell_size as f64 * p)
            .sum()
    }
}

fn permutations(items: &[usize], f: &mut impl FnMut(&[usize])) {
    fn rec(buf: &mut Vec<usize>, rest: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if rest.is_empty() {
            f(buf);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            buf.push(x);
            rec(buf, rest, f);
            buf.pop();
            rest.insert(i, x);
        }
    }
    rec(&mut Vec::new(), &mut items.to_vec(), f);
}

pub fn exact_distribution(cell_set: &CellSet) -> Result<ExactLaw, FireError> {
    let g = cell_set.group();
    let a: Vec<Element> = cell_set.elements().to_vec();
    let window = determinacy_window(cell_set);
    let pos = |x: &Element| window.iter().position(|w| w == x).expect("inside window");

    // Points whose tile covers y: all x with y in xA.
    let covers = |y: &Element| -> BTreeSet<usize> {
        a.iter()
            .map(|s| g.mul(y, &g.inverse(s)))
            .map(|x| pos(&x))
            .collect()
    };
    let identity = g.identity();
    let root_cover = covers(&identity);
    // For a center c: the tile cA and the points whose marks can matter.
    let tiles: BTreeMap<usize, (Vec<usize>, BTreeSet<usize>)> = root_cover
        .iter()
        .map(|&c| {
            let tile: Vec<usize> = a.iter().map(|s| pos(&g.mul(&window[c], s))).collect();
            let mut relevant = root_cover.clone();
            for &y in &tile {
                relevant.extend(covers(&window[y]));
            }
            (c, (tile, relevant))
        })
        .collect();
    let potential_centers = tiles.values().map(|(_, r)| r.len()).max().unwrap_or(0);
    if window.len() > WINDOW_CAP || potential_centers > CENTERS_CAP {
        return Err(FireError::OracleInfeasible {
            window: window.len(),
            window_cap: WINDOW_CAP,
            centers: potential_centers,
            centers_cap: CENTERS_CAP,
        });
    }

    let q = cell_set.intensity().p();
    let e = pos(&identity);
    let n = window.len();
    let mut law = BTreeMap::<ExactOutcome, f64>::new();
    for mask in 0u32..(1u32 << n) {
        let in_s = |i: usize| mask >> i & 1 == 1;
        let k = mask.count_ones() as i32;
        let weight = q.powi(k) * (1.0 - q).powi(n as i32 - k);

        let centers: Vec<usize> = if in_s(e) {
            vec![e]
        } else {
            root_cover.iter().copied().filter(|&i| in_s(i)).collect()
        };
        if centers.is_empty() {
            *law.entry(ExactOutcome { in_pi_class: false, cell_size: 1 }).or_default() += weight;
            continue;
        }
        for &c in &centers {
            let (tile, relevant) = &tiles[&c];
            let pts: Vec<usize> = relevant.iter().copied().filter(|&i| in_s(i)).collect();
            let mut sizes = BTreeMap::<usize, u64>::new();
            let mut admissible = 0u64;
            // `order` lists points from smallest mark to largest.
            permutations(&pts, &mut |order| {
                let rank = |i: usize| order.iter().position(|&j| j == i).unwrap();
                if centers.iter().any(|&o| rank(o) < rank(c)) {
                    return;
                }
                admissible += 1;
                let mut size = 1;
                for &y in tile {
                    if y == c || in_s(y) {
                        continue;
                    }
                    let winner = covers(&window[y])
                        .into_iter()
                        .filter(|&x| in_s(x))
                        .min_by_key(|&x| rank(x));
                    if winner == Some(c) {
                        size += 1;
                    }
                }
                *sizes.entry(size).or_default() += 1;
            });
            let share = weight / centers.len() as f64;
            for (size, count) in sizes {
                *law.entry(ExactOutcome { in_pi_class: true, cell_size: size }).or_default() +=
                    share * count as f64 / admissible as f64;
            }
        }
    }
    Ok(ExactLaw {
        window_size: n,
        potential_centers,
        law,
    })
}
