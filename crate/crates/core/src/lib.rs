//! Leader-follower inference over weekly preference charts.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and the parallel dyad scan live in the `geoflow` crate.
//!
//! Pipeline, bottom-up:
//!
//! - [`charts`]: weekly charts, 4-week listen matrices, genre filters, row
//!   normalization.
//! - [`lagcorr`]: per-city velocities and lagged dot-product correlations.
//! - [`stats`]: Student-t distribution, t-tests, Spearman correlation.
//! - [`leadnet`]: edge acceptance, feedback arc set, PageRank, size analysis.
//! - [`cluster`]: summed distance matrices and average-linkage clustering.
//! - [`synth`]: planted-hierarchy generator and shuffle null.
#![no_std]

extern crate alloc;

mod error;
mod sparse;

pub mod charts;
pub mod cluster;
pub mod lagcorr;
pub mod leadnet;
pub mod pipeline;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use sparse::SparseVec;

/// Width of a listen-matrix window in weeks.
pub const WINDOW_WEEKS: u32 = 4;

/// Offset between the two windows that define one velocity, in weeks.
pub const VELOCITY_STEP_WEEKS: u32 = WINDOW_WEEKS;

/// Per-(week, city) cap on chart entries.
pub const MAX_CHART_ENTRIES: usize = 500;

/// Per-genre cap on catalog entries.
pub const MAX_GENRE_ARTISTS: usize = 1000;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
