//! Sequential end-to-end detection: charts to leadership graph.

use alloc::string::String;
use alloc::vec::Vec;

use crate::charts::{ChartSet, ColumnMask, WindowSeries};
use crate::lagcorr::{compute_velocities, DyadTable, LagScan, VelocitySeries};
use crate::leadnet::{build_graph, Acceptance, LeadershipGraph};
use crate::Result;

/// Velocity series for `cities` (or every city when `None`), sorted by name.
pub fn velocity_series(windows: &WindowSeries, cities: Option<&[String]>) -> Result<Vec<VelocitySeries>> {
    let mut names: Vec<String> = match cities {
        Some(list) => list.to_vec(),
        None => windows.cities().into_iter().map(String::from).collect(),
    };
    names.sort();
    names.dedup();
    names.iter().map(|c| compute_velocities(windows, c)).collect()
}

pub struct Detection {
    pub windows: WindowSeries,
    pub dyads: DyadTable,
    pub graph: LeadershipGraph,
}

pub fn detect(
    charts: &ChartSet,
    genre: Option<&ColumnMask>,
    cities: Option<&[String]>,
    scan: LagScan,
    acceptance: Acceptance,
) -> Result<Detection> {
    let windows = charts.windows(genre);
    let series = velocity_series(&windows, cities)?;
    let dyads = DyadTable::scan(&series, scan);
    let graph = build_graph(&dyads, acceptance)?;
    Ok(Detection { windows, dyads, graph })
}
