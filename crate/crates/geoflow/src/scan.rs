//! Parallel dyad scan.

use geoflow_core::lagcorr::{best_dyad, ordered_pairs, DyadTable, LagScan, VelocitySeries};
use geoflow_core::Error;
use rayon::prelude::*;

use crate::error::{GeoflowError, Result};

/// Same result as [`DyadTable::scan`], computed on `workers` threads
/// (rayon's default when `None`).
pub fn parallel_scan(series: &[VelocitySeries], scan: LagScan, workers: Option<usize>) -> Result<DyadTable> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(GeoflowError::Validation("worker count must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| GeoflowError::Validation(format!("cannot start worker pool: {e}")))?;
    let pairs: Vec<(usize, usize)> = ordered_pairs(series.len()).collect();
    let results: Vec<_> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(l, f)| best_dyad(&series[f], &series[l], &scan))
            .collect()
    });
    let mut dyads = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(d) => dyads.push(d),
            Err(Error::DyadUnavailable { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    log::debug!("scanned {} ordered pairs, {} usable", pairs.len(), dyads.len());
    Ok(DyadTable::new(
        series.iter().map(|s| s.city.clone()).collect(),
        scan,
        dyads,
    ))
}
