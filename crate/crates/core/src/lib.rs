//! Robust persistent homology via average-pairwise-distance trimming.
//!
//! The pipeline: rank points of a cloud by average pairwise distance, trim
//! the extremes, build a Vietoris-Rips filtration on the kept support,
//! compute persistence diagrams over Z2, and compare diagrams with the
//! bottleneck distance. Adaptive selection of trimming proportions, seeded
//! generators for the simulation designs, and the quantitative experiments
//! sit on top.
//!
//! Two interchangeable persistence engines are provided:
//! [`persistence::persistent_homology`] reduces the boundary matrix of an
//! explicit [`rips::Filtration`], and [`flagph::flag_rips_persistence`]
//! computes identical diagrams from the distance matrix alone, which is the
//! only viable route when a threshold near the enclosing radius generates
//! hundreds of millions of simplices.

pub mod bottleneck;
pub mod error;
pub mod experiments;
pub mod flagph;
pub mod io;
pub mod metric;
pub mod persistence;
pub mod rips;
pub mod select;
pub mod synth;
pub mod trim;

pub use error::{Error, Result};
pub use flagph::flag_rips_persistence;
pub use metric::{hausdorff, DistanceMatrix, PointCloud};
pub use persistence::{brute_force_betti, persistent_homology, Bar, PersistenceDiagram};
pub use rips::{rips_filtration, Filtration, RipsThreshold};
pub use trim::{trim_asymmetric, trim_one_sided, TrimResult, TrimSpec};
