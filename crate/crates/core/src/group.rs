//! Finitely generated groups with exact normal forms: free abelian groups
//! `Z^d` and free groups `F_k`, each with its standard symmetric generating
//! set. Elements are stored in normal form so equality and hashing are
//! structural.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::splitmix64;

/// Default cap on the number of elements a [`CayleyWindow`] may hold.
pub const DEFAULT_BALL_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to group {group}")]
    Mismatch { group: String, element: String },
    #[error("ball of radius {radius} holds at least {count} elements, over the cap of {cap}")]
    SizeLimit { radius: u32, count: usize, cap: usize },
    #[error("invalid group spec {0:?}: expected \"z:d\" or \"f:k\" with a positive integer")]
    BadSpec(String),
    #[error("cannot parse {text:?} as an element of {group}")]
    BadElement { group: String, text: String },
}

/// A generator letter of a free group: `+i` stands for `a_i`, `-i` for its
/// inverse (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub i8);

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    fn to_char(self) -> char {
        let base = (self.0.unsigned_abs() - 1) as u8;
        if self.0 > 0 {
            (b'a' + base) as char
        } else {
            (b'A' + base) as char
        }
    }
}

/// A group element in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    /// Integer vector in `Z^d`.
    Vector(Vec<i64>),
    /// Freely reduced word in `F_k`.
    Word(Vec<Letter>),
}

impl Element {
    pub fn is_identity(&self) -> bool {
        match self {
            Element::Vector(v) => v.iter().all(|&x| x == 0),
            Element::Word(w) => w.is_empty(),
        }
    }

    /// Length of the normal form in the standard generators (word length).
    pub fn word_length(&self) -> u64 {
        match self {
            Element::Vector(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
            Element::Word(w) => w.len() as u64,
        }
    }

    /// Stable 64-bit digest of the normal form. Used to key random streams,
    /// so it must never depend on process state or library versions.
    pub fn stable_key(&self) -> u64 {
        match self {
            Element::Vector(v) => v.iter().fold(0x5a17_u64, |h, &x| {
                splitmix64(h ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
            }),
            Element::Word(w) => w.iter().fold(0xf4ee_u64, |h, l| {
                splitmix64(h.rotate_left(7) ^ (l.0 as i64 as u64))
            }) ^ (w.len() as u64),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => w.iter().try_for_each(|l| write!(f, "{}", l.to_char())),
        }
    }
}

/// A finitely generated group together with its standard generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupSpec {
    /// `Z^d` generated by `±e_i`.
    FreeAbelian { rank: usize },
    /// `F_k` generated by `a_i^{±1}`.
    Free { rank: usize },
}

impl GroupSpec {
    pub fn free_abelian(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::BadSpec("z:0".into()));
        }
        Ok(GroupSpec::FreeAbelian { rank })
    }

    pub fn free(rank: usize) -> Result<Self, GroupError> {
        if rank == 0 || rank > 26 {
            return Err(GroupError::BadSpec(format!("f:{rank}")));
        }
        Ok(GroupSpec::Free { rank })
    }

    pub fn rank(&self) -> usize {
        match *self {
            GroupSpec::FreeAbelian { rank } | GroupSpec::Free { rank } => rank,
        }
    }

    /// Degree of the Cayley graph, `|S|`.
    pub fn degree(&self) -> usize {
        2 * self.rank()
    }

    pub fn identity(&self) -> Element {
        match *self {
            GroupSpec::FreeAbelian { rank } => Element::Vector(vec![0; rank]),
            GroupSpec::Free { .. } => Element::Word(Vec::new()),
        }
    }

    /// The standard symmetric generating set, in a fixed order.
    pub fn generators(&self) -> Vec<Element> {
        match *self {
            GroupSpec::FreeAbelian { rank } => (0..rank)
                .flat_map(|i| {
                    [1i64, -1].into_iter().map(move |s| {
                        let mut v = vec![0; rank];
                        v[i] = s;
                        Element::Vector(v)
                    })
                })
                .collect(),
            GroupSpec::Free { rank } => (1..=rank as i8)
                .flat_map(|i| [Letter(i), Letter(-i)])
                .map(|l| Element::Word(vec![l]))
                .collect(),
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (self, g) {
            (GroupSpec::FreeAbelian { rank }, Element::Vector(v)) => v.len() == *rank,
            (GroupSpec::Free { rank }, Element::Word(w)) => {
                let k = *rank as i8;
                w.iter().all(|l| l.0 != 0 && l.0.abs() <= k)
                    && w.windows(2).all(|p| p[0] != p[1].inverse())
            }
            _ => false,
        }
    }

    fn check(&self, g: &Element) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::Mismatch {
                group: self.to_string(),
                element: g.to_string(),
            })
        }
    }

    /// Normal form of `gh`.
    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Unchecked product for elements already known to lie in this group.
    pub(crate) fn mul(&self, g: &Element, h: &Element) -> Element {
        match (g, h) {
            (Element::Vector(a), Element::Vector(b)) => {
                debug_assert_eq!(a.len(), b.len());
                Element::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Element::Word(a), Element::Word(b)) => {
                let mut out = a.clone();
                for &l in b {
                    if out.last() == Some(&l.inverse()) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Word(out)
            }
            _ => panic!("mixed element kinds in {self}"),
        }
    }

    pub fn inverse(&self, g: &Element) -> Element {
        match g {
            Element::Vector(v) => Element::Vector(v.iter().map(|x| -x).collect()),
            Element::Word(w) => Element::Word(w.iter().rev().map(|l| l.inverse()).collect()),
        }
    }

    /// Left-invariant word metric `d(g, h) = |g^{-1} h|`.
    pub fn word_distance(&self, g: &Element, h: &Element) -> Result<u64, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.distance(g, h))
    }

    pub(crate) fn distance(&self, g: &Element, h: &Element) -> u64 {
        match (g, h) {
            (Element::Vector(a), Element::Vector(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs()).sum()
            }
            (Element::Word(a), Element::Word(b)) => {
                let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                (a.len() - common + b.len() - common) as u64
            }
            _ => panic!("mixed element kinds in {self}"),
        }
    }

    /// `{ab : a in A, b in B}` in normal form, deduplicated and sorted.
    pub fn set_product(&self, a: &[Element], b: &[Element]) -> Result<Vec<Element>, GroupError> {
        for g in a.iter().chain(b) {
            self.check(g)?;
        }
        let out: BTreeSet<Element> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| self.mul(x, y)))
            .collect();
        Ok(out.into_iter().collect())
    }

    pub fn set_inverse(&self, a: &[Element]) -> Vec<Element> {
        let out: BTreeSet<Element> = a.iter().map(|g| self.inverse(g)).collect();
        out.into_iter().collect()
    }

    pub fn ball(&self, center: &Element, radius: u32) -> Result<CayleyWindow, GroupError> {
        CayleyWindow::build(*self, center.clone(), radius, DEFAULT_BALL_CAP)
    }

    /// Parses a normal form: integers or `(x,y,..)` for `Z^d`; letters
    /// `a..z` (uppercase for inverses) or `e` for `F_k`.
    pub fn parse_element(&self, text: &str) -> Result<Element, GroupError> {
        let bad = || GroupError::BadElement {
            group: self.to_string(),
            text: text.to_string(),
        };
        let t = text.trim();
        let g = match *self {
            GroupSpec::FreeAbelian { .. } => {
                let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
                let coords = inner
                    .split([',', ';'])
                    .map(|s| s.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                Element::Vector(coords)
            }
            GroupSpec::Free { .. } => {
                if t == "e" {
                    return Ok(self.identity());
                }
                let mut word = Vec::new();
                for c in t.chars() {
                    let l = match c {
                        'a'..='z' => Letter((c as u8 - b'a' + 1) as i8),
                        'A'..='Z' => Letter(-((c as u8 - b'A' + 1) as i8)),
                        _ => return Err(bad()),
                    };
                    if word.last() == Some(&l.inverse()) {
                        word.pop();
                    } else {
                        word.push(l);
                    }
                }
                Element::Word(word)
            }
        };
        if self.contains(&g) {
            Ok(g)
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian { rank } => write!(f, "z:{rank}"),
            GroupSpec::Free { rank } => write!(f, "f:{rank}"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadSpec(s.to_string());
        let (family, rank) = s.trim().split_once(':').ok_or_else(bad)?;
        let rank: usize = rank.parse().map_err(|_| bad())?;
        match family {
            "z" | "Z" => GroupSpec::free_abelian(rank),
            "f" | "F" => GroupSpec::free(rank),
            _ => Err(bad()),
        }
        .map_err(|_| bad())
    }
}

/// The ball `B_r(center)` in the Cayley graph with its induced adjacency.
///
/// Elements are listed in BFS order, so `layer_start[i]..layer_start[i+1]`
/// are the elements at distance exactly `i` from the center.
#[derive(Clone, Debug)]
pub struct CayleyWindow {
    group: GroupSpec,
    center: Element,
    radius: u32,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    layer_start: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl CayleyWindow {
    pub fn build(
        group: GroupSpec,
        center: Element,
        radius: u32,
        cap: usize,
    ) -> Result<Self, GroupError> {
        group.check(&center)?;
        let mut w = CayleyWindow {
            group,
            index: HashMap::from([(center.clone(), 0)]),
            elements: vec![center.clone()],
            center,
            radius: 0,
            layer_start: vec![0, 1],
            adjacency: Vec::new(),
        };
        w.grow_layers(radius, cap)?;
        w.rebuild_adjacency();
        Ok(w)
    }

    /// The same window at a larger radius; the old elements keep their indices.
    pub fn grown(&self, new_radius: u32, cap: usize) -> Result<Self, GroupError> {
        let mut w = self.clone();
        w.grow_layers(new_radius, cap)?;
        w.rebuild_adjacency();
        Ok(w)
    }

    fn grow_layers(&mut self, radius: u32, cap: usize) -> Result<(), GroupError> {
        let gens = self.group.generators();
        while self.radius < radius {
            let lo = self.layer_start[self.radius as usize];
            let hi = self.layer_start[self.radius as usize + 1];
            for i in lo..hi {
                for s in &gens {
                    let g = self.group.mul(&self.elements[i], s);
                    if !self.index.contains_key(&g) {
                        if self.elements.len() >= cap {
                            return Err(GroupError::SizeLimit {
                                radius,
                                count: self.elements.len() + 1,
                                cap,
                            });
                        }
                        self.index.insert(g.clone(), self.elements.len());
                        self.elements.push(g);
                    }
                }
            }
            self.radius += 1;
            self.layer_start.push(self.elements.len());
        }
        Ok(())
    }

    fn rebuild_adjacency(&mut self) {
        let gens = self.group.generators();
        self.adjacency = self
            .elements
            .iter()
            .map(|g| {
                gens.iter()
                    .filter_map(|s| self.index.get(&self.group.mul(g, s)).copied())
                    .collect()
            })
            .collect();
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn center(&self) -> &Element {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Distance of element `i` from the window center.
    pub fn depth(&self, i: usize) -> u32 {
        self.layer_start.partition_point(|&s| s <= i) as u32 - 1
    }

    /// Number of elements within distance `r` of the center (`r <= radius`).
    pub fn count_within(&self, r: u32) -> usize {
        self.layer_start[r.min(self.radius) as usize + 1]
    }
}
