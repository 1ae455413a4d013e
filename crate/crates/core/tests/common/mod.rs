//! Brute-force reference implementations used by the integration and
//! acceptance tests. They share no code with the library's solvers.

#![allow(dead_code)]

use irelab::graph::FiniteGraph;
use irelab::{BernoulliField, Element, GroupSpec};

fn root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    r
}

/// Minimum number of edges whose removal leaves components of at most `k`
/// vertices, by trying every subset of kept edges.
pub fn min_cut_by_edge_subsets(g: &FiniteGraph, k: usize) -> usize {
    let n = g.vertex_count();
    let edges = g.edges();
    let m = edges.len();
    assert!(m <= 24, "edge-subset oracle limited to 24 edges");
    let mut best_kept = 0usize;
    let mut parent = vec![0usize; n];
    let mut size = vec![0usize; n];
    for keep in 0u32..(1u32 << m) {
        let kept = keep.count_ones() as usize;
        if kept <= best_kept && keep != 0 {
            continue;
        }
        for v in 0..n {
            parent[v] = v;
            size[v] = 1;
        }
        let mut ok = true;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if keep >> i & 1 == 0 {
                continue;
            }
            let (a, b) = (root(&mut parent, u), root(&mut parent, v));
            if a != b {
                parent[a] = b;
                size[b] += size[a];
                if size[b] > k {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            best_kept = best_kept.max(kept);
        }
    }
    m - best_kept
}

/// `min |dS| / |S|` over all nonempty vertex sets with `|S| <= max_size`,
/// connected or not, as a reduced fraction `(boundary, size)`.
pub fn unrestricted_expansion(g: &FiniteGraph, max_size: usize) -> (usize, usize) {
    let n = g.vertex_count();
    assert!(n <= 20);
    let mut best = (usize::MAX, 1usize);
    for mask in 1u32..(1u32 << n) {
        let s = mask.count_ones() as usize;
        if s > max_size {
            continue;
        }
        let b = g
            .edges()
            .iter()
            .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
            .count();
        if b * best.1 < best.0.saturating_mul(s) {
            best = (b, s);
        }
    }
    best
}

/// Voronoi cell of `root` computed the slow way: every element of the box
/// `[-l, l]^d` is assigned to its nearest point (ties to the smaller mark)
/// by a scan over all points, and the cell is read off directly.
///
/// Returns `None` when the box is too small to be sure: when some member's
/// distance to its center reaches the distance to the box boundary.
pub fn brute_force_cell(field: &BernoulliField, l: i64, root: &Element) -> Option<(Element, Vec<Element>)> {
    let group = field.group();
    let d = group.rank();
    let mut all = vec![Vec::<i64>::new()];
    for _ in 0..d {
        all = all
            .into_iter()
            .flat_map(|v| {
                (-l..=l).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    let elems: Vec<Element> = all.into_iter().map(Element::Vector).collect();
    let points: Vec<(Element, u64)> = elems
        .iter()
        .filter_map(|e| field.draw(e).map(|m| (e.clone(), m.0)))
        .collect();
    let slack = |e: &Element| match e {
        Element::Vector(v) => v.iter().map(|x| l - x.abs()).min().unwrap_or(l),
        Element::Word(_) => unreachable!(),
    };
    let dist = |a: &Element, b: &Element| group.word_distance(a, b).expect("same group");
    let center_of = |x: &Element| -> Option<Element> {
        let (c, _, dc) = points
            .iter()
            .map(|(p, m)| (p, m, dist(x, p)))
            .min_by(|a, b| (a.2, a.1, a.0).cmp(&(b.2, b.1, b.0)))?;
        // A point outside the box could be as close only if the box edge is.
        (dc < slack(x) as u64 + 1).then(|| c.clone())
    };
    let c = center_of(root)?;
    let mut members = Vec::new();
    let mut undecided = Vec::new();
    for e in &elems {
        match center_of(e) {
            Some(ce) if ce == c => members.push(e.clone()),
            Some(_) => {}
            None => undecided.push(e.clone()),
        }
    }
    members.sort();
    // Cells are connected along geodesics to their center, so a member
    // hidden outside the box or among undecided elements would have to be
    // adjacent to a known member.
    if members.iter().any(|m| slack(m) == 0) {
        return None;
    }
    if undecided
        .iter()
        .any(|u| members.iter().any(|m| dist(u, m) == 1))
    {
        return None;
    }
    Some((c, members))
}

pub fn z(d: usize) -> GroupSpec {
    GroupSpec::free_abelian(d).unwrap()
}
