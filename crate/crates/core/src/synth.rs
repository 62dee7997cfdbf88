//! Synthetic charts with a planted leadership hierarchy, and the shuffle
//! null.
//!
//! Every city carries a preference vector on the positive orthant of the unit
//! sphere and moves once per week. Root cities take a Gaussian step projected
//! onto the tangent space. A follower's step is the coupling-weighted mean of
//! its leaders' realized steps `lag` weeks earlier plus independent noise.
//! Weekly counts are the preference vector scaled by the city's activity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::charts::{MissingWeekSet, WeeklyChart};
use crate::{Error, Result, MAX_CHART_ENTRIES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCity {
    pub name: String,
    pub population: u64,
    /// Expected listener total per artist-unit of preference.
    pub activity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedEdge {
    pub leader: String,
    pub follower: String,
    pub lag: u32,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedHierarchy {
    pub cities: Vec<SynthCity>,
    pub edges: Vec<PlantedEdge>,
}

impl PlantedHierarchy {
    /// `city_00` leads `city_01` leads ... `city_{n-1}`. Populations shrink
    /// down the chain.
    pub fn chain(n: usize, lag: u32, coupling: f64) -> Self {
        let name = |i: usize| format!("city_{i:02}");
        let cities = (0..n)
            .map(|i| SynthCity {
                name: name(i),
                population: 100_000 * (n - i) as u64,
                activity: 20_000.0,
            })
            .collect();
        let edges = (1..n)
            .map(|i| PlantedEdge {
                leader: name(i - 1),
                follower: name(i),
                lag,
                coupling,
            })
            .collect();
        Self { cities, edges }
    }

    fn index(&self) -> BTreeMap<&str, usize> {
        self.cities.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect()
    }

    /// City indices so that every leader precedes its followers.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let idx = self.index();
        let n = self.cities.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            let (l, f) = (idx[e.leader.as_str()], idx[e.follower.as_str()]);
            out[l].push(f);
            indeg[f] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &f in &out[v] {
                indeg[f] -= 1;
                if indeg[f] == 0 {
                    ready.insert(f);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::CyclicHierarchy)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let idx = self.index();
        if idx.len() != self.cities.len() {
            return Err(Error::Validation("duplicate city name in hierarchy".into()));
        }
        for c in &self.cities {
            if c.population == 0 || !(c.activity > 0.0) || !c.activity.is_finite() {
                return Err(Error::Validation(format!(
                    "city {} needs positive population and activity",
                    c.name
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            for end in [&e.leader, &e.follower] {
                if !idx.contains_key(end.as_str()) {
                    return Err(Error::UnknownCity(end.clone()));
                }
            }
            if e.leader == e.follower {
                return Err(Error::CyclicHierarchy);
            }
            if !(1..=5).contains(&e.lag) {
                return Err(Error::Validation(format!("planted lag {} outside 1..=5", e.lag)));
            }
            if !(0.0..=1.0).contains(&e.coupling) {
                return Err(Error::Validation(format!(
                    "coupling {} outside [0, 1]",
                    e.coupling
                )));
            }
            if !seen.insert((e.leader.as_str(), e.follower.as_str())) {
                return Err(Error::Validation(format!(
                    "duplicate planted edge {} -> {}",
                    e.leader, e.follower
                )));
            }
        }
        self.topological_order().map(|_| ())
    }

    /// True if `descendant` is reachable from `ancestor` along planted edges.
    pub fn influences(&self, ancestor: &str, descendant: &str) -> bool {
        let mut stack = vec![ancestor];
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.leader == c) {
                if e.follower == descendant {
                    return true;
                }
                if seen.insert(e.follower.as_str()) {
                    stack.push(&e.follower);
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_artists: usize,
    pub n_weeks: u32,
    /// Norm of a root city's weekly step before projection.
    pub walk_step: f64,
    /// Norm of a follower's independent weekly noise.
    pub noise_sigma: f64,
    /// Activity multiplier during missing weeks.
    pub missing_activity: f64,
    pub seed: u64,
    pub missing_weeks: MissingWeekSet,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_artists: 300,
            n_weeks: 153,
            walk_step: 0.05,
            noise_sigma: 0.05,
            missing_activity: 0.02,
            seed: 0,
            missing_weeks: MissingWeekSet::new(),
        }
    }
}

/// Burn-in weeks simulated before week 0 so lagged copies have a history.
const BURN_IN: usize = 8;
/// Floor applied to coordinates before renormalizing, relative to
/// `1 / sqrt(n_artists)`.
const COORD_FLOOR: f64 = 1e-3;

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> Vec<f64> {
    let scale = norm / libm::sqrt(n as f64);
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn normalize(v: &mut [f64]) {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Removes the component of `step` along the unit vector `at`.
fn project_tangent(step: &mut [f64], at: &[f64]) {
    let along: f64 = step.iter().zip(at).map(|(s, p)| s * p).sum();
    step.iter_mut().zip(at).for_each(|(s, p)| *s -= along * p);
}

pub fn artist_name(i: usize) -> String {
    format!("artist_{i:04}")
}

/// Simulates the hierarchy and emits weekly charts sorted by `(week, city)`.
pub fn generate(hierarchy: &PlantedHierarchy, config: &SynthConfig) -> Result<Vec<WeeklyChart>> {
    hierarchy.validate()?;
    if config.n_artists == 0 {
        return Err(Error::Validation("n_artists must be positive".into()));
    }
    let order = hierarchy.topological_order()?;
    let idx = hierarchy.index();
    let n_cities = hierarchy.cities.len();
    let dim = config.n_artists;
    let total_weeks = BURN_IN + config.n_weeks as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let leaders: Vec<Vec<(usize, usize, f64)>> = (0..n_cities)
        .map(|f| {
            hierarchy
                .edges
                .iter()
                .filter(|e| idx[e.follower.as_str()] == f)
                .map(|e| (idx[e.leader.as_str()], e.lag as usize, e.coupling))
                .collect()
        })
        .collect();

    let global: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..1.5)).collect();
    let mut pref: Vec<Vec<f64>> = (0..n_cities)
        .map(|_| {
            let mut p: Vec<f64> = global.iter().map(|g| g * rng.random_range(0.7..1.3)).collect();
            normalize(&mut p);
            p
        })
        .collect();

    // positions[city][week] for the emitted weeks.
    let mut positions: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(config.n_weeks as usize); n_cities];
    // Realized displacement of each city at each simulated week.
    let mut steps: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(total_weeks); n_cities];
    let floor = COORD_FLOOR / libm::sqrt(dim as f64);

    for week in 0..total_weeks {
        if week >= BURN_IN {
            for c in 0..n_cities {
                positions[c].push(pref[c].clone());
            }
        }
        for &c in &order {
            let mut step = if leaders[c].is_empty() {
                gaussian_vec(&mut rng, dim, config.walk_step)
            } else {
                let mut s = vec![0.0; dim];
                let k = leaders[c].len() as f64;
                for &(l, lag, coupling) in &leaders[c] {
                    if let Some(src) = week.checked_sub(lag).map(|w| &steps[l][w]) {
                        s.iter_mut().zip(src).for_each(|(a, b)| *a += coupling * b / k);
                    }
                }
                if config.noise_sigma > 0.0 {
                    let noise = gaussian_vec(&mut rng, dim, config.noise_sigma);
                    s.iter_mut().zip(&noise).for_each(|(a, b)| *a += b);
                }
                s
            };
            project_tangent(&mut step, &pref[c]);
            let mut next: Vec<f64> = pref[c].iter().zip(&step).map(|(p, s)| (p + s).max(floor)).collect();
            normalize(&mut next);
            let realized = next.iter().zip(&pref[c]).map(|(a, b)| a - b).collect();
            steps[c].push(realized);
            pref[c] = next;
        }
    }

    let mut charts = Vec::with_capacity(n_cities * config.n_weeks as usize);
    for week in 0..config.n_weeks {
        let mut day: Vec<WeeklyChart> = Vec::with_capacity(n_cities);
        for (c, city) in hierarchy.cities.iter().enumerate() {
            let mut activity = city.activity;
            if config.missing_weeks.contains(week) {
                activity *= config.missing_activity;
            }
            let mut entries: Vec<(usize, u32)> = positions[c][week as usize]
                .iter()
                .enumerate()
                .map(|(a, p)| (a, libm::round(activity * p).max(1.0) as u32))
                .collect();
            if entries.len() > MAX_CHART_ENTRIES {
                entries.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
                entries.truncate(MAX_CHART_ENTRIES);
                entries.sort_by_key(|e| e.0);
            }
            day.push(WeeklyChart {
                week,
                city: city.name.clone(),
                entries: entries.into_iter().map(|(a, n)| (artist_name(a), n)).collect(),
            });
        }
        day.sort_by(|a, b| a.city.cmp(&b.city));
        charts.extend(day);
    }
    Ok(charts)
}

/// Permutes each city's week labels among its non-missing weeks. Charts in
/// missing weeks keep their labels. Output is sorted by `(week, city)`.
pub fn shuffle_null(charts: &[WeeklyChart], missing: &MissingWeekSet, seed: u64) -> Vec<WeeklyChart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_city: BTreeMap<&str, Vec<&WeeklyChart>> = BTreeMap::new();
    for c in charts {
        by_city.entry(c.city.as_str()).or_default().push(c);
    }
    let mut out = Vec::with_capacity(charts.len());
    for (_, mut list) in by_city {
        list.sort_by_key(|c| c.week);
        let (fixed, movable): (Vec<&WeeklyChart>, Vec<&WeeklyChart>) =
            list.into_iter().partition(|c| missing.contains(c.week));
        let weeks: Vec<u32> = movable.iter().map(|c| c.week).collect();
        let mut shuffled = weeks.clone();
        shuffled.shuffle(&mut rng);
        out.extend(fixed.into_iter().cloned());
        out.extend(movable.into_iter().zip(shuffled).map(|(c, week)| WeeklyChart {
            week,
            ..c.clone()
        }));
    }
    out.sort_by(|a, b| (a.week, &a.city).cmp(&(b.week, &b.city)));
    out
}
