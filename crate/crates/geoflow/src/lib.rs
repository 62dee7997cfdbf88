//! File formats, parallel dyad scan, run orchestration and reports on top
//! of [`geoflow_core`].

pub mod error;
pub mod formats;
pub mod manifest;
pub mod report;
pub mod run;
pub mod scan;

pub use error::{GeoflowError, Result};
pub use run::{run_pipeline, RunConfig};
