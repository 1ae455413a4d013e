//! Rooted-neighborhood statistics for comparing random rooted graphs,
//! exact canonical hashing of small rooted graphs, and a generic
//! mass-transport checker.

pub mod canon;
mod mtp;
mod neighborhood;

pub use mtp::{
    mtp_check, BernoulliProcess, BvtProcess, Diagonal, MarkedNearPoint, MarkedProcess, MtpReport,
    NearPoint, PointView, TransportFn, VoronoiShare,
};
pub use neighborhood::{
    collect_distribution, root_component_neighborhood, tv_distance, DistributionEntry,
    NeighborhoodDistribution, RootedNeighborhood,
};

use thiserror::Error;

use crate::group::GroupError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error("cell is undetermined; filter undetermined samples before building neighborhoods")]
    Undetermined,
    #[error("neighborhood has {0} vertices, over the canonical-form limit of 64")]
    TooLarge(usize),
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(u32, u32),
    #[error("distribution has no samples")]
    Empty,
    #[error("margin plus reach {need} exceeds the process window radius {window}")]
    MarginExceedsWindow { need: u32, window: u32 },
    #[error(transparent)]
    Group(#[from] GroupError),
}
