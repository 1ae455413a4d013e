//! Sampling and verification tools for invariant random equivalence
//! relations on finitely generated groups.
//!
//! The library covers ball enumeration in `Z^d` and free groups, Bernoulli
//! point processes with element-keyed randomness, the tiling factor-of-IID
//! relation with its exact small-window law, Bernoulli Voronoi
//! tessellations, rooted-neighborhood statistics with mass-transport checks,
//! and hyperfiniteness and expansion certificates for finite graphs.

pub mod cell;
pub mod cli;
pub mod fire;
pub mod graph;
pub mod group;
pub mod local;
pub mod sampling;
pub mod stats;
pub mod voronoi;

pub use cell::{CellSampler, RootCell, SingletonSampler};
pub use group::{CayleyWindow, Element, GroupError, GroupSpec, Letter};
pub use sampling::{BernoulliField, IntensitySpec, Mark, MarkedConfiguration, SamplingError, SeedSpec};
pub use stats::Estimate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Fire(#[from] fire::FireError),
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Local(#[from] local::LocalError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
