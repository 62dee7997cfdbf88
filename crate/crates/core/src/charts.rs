//! Weekly charts, 4-week listen matrices, genre filters and row normalization.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SparseVec, MAX_CHART_ENTRIES, MAX_GENRE_ARTISTS, WINDOW_WEEKS};

/// One city's chart for one week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyChart {
    pub week: u32,
    pub city: String,
    /// `(artist_id, unique listeners)`.
    pub entries: Vec<(String, u32)>,
}

/// Weeks excluded from every window, velocity and sample.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingWeekSet(BTreeSet<u32>);

impl MissingWeekSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, week: u32) -> bool {
        self.0.contains(&week)
    }

    pub fn insert(&mut self, week: u32) -> bool {
        self.0.insert(week)
    }

    /// True if any week in `start..start + len` is missing.
    pub fn intersects(&self, start: u32, len: u32) -> bool {
        self.0.range(start..start.saturating_add(len)).next().is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<u32> for MissingWeekSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Lexicographically ordered artist columns shared by every matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtistUniverse {
    artists: Vec<String>,
}

impl ArtistUniverse {
    pub fn from_artists<I, S>(artists: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = artists.into_iter().map(Into::into).collect();
        Self {
            artists: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.artists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.artists.is_empty()
    }

    pub fn index_of(&self, artist: &str) -> Option<u32> {
        self.artists
            .binary_search_by(|a| a.as_str().cmp(artist))
            .ok()
            .map(|i| i as u32)
    }

    pub fn artist(&self, column: u32) -> Option<&str> {
        self.artists.get(column as usize).map(String::as_str)
    }

    pub fn artists(&self) -> &[String] {
        &self.artists
    }
}

/// Validated chart collection over a contiguous study period.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSet {
    universe: ArtistUniverse,
    missing: MissingWeekSet,
    cities: Vec<String>,
    /// `(first, last)` week, inclusive.
    period: Option<(u32, u32)>,
    /// week → per-city raw counts, indexed like `cities`.
    counts: BTreeMap<u32, Vec<SparseVec>>,
    charts: Vec<WeeklyChart>,
}

impl ChartSet {
    /// Validates charts and builds the artist universe.
    ///
    /// Weeks that carry no chart at all must be listed in `missing`, so the
    /// study period stays contiguous.
    pub fn new(mut charts: Vec<WeeklyChart>, missing: MissingWeekSet) -> Result<Self> {
        charts.sort_by(|a, b| (a.week, &a.city).cmp(&(b.week, &b.city)));
        // Split charts for the same (week, city) are merged; duplicate artists
        // are caught below.
        let mut merged: Vec<WeeklyChart> = Vec::with_capacity(charts.len());
        for chart in charts {
            match merged.last_mut() {
                Some(last) if last.week == chart.week && last.city == chart.city => {
                    last.entries.extend(chart.entries)
                }
                _ => merged.push(chart),
            }
        }

        let mut artists = BTreeSet::new();
        let mut cities = BTreeSet::new();
        for chart in &merged {
            if chart.entries.len() > MAX_CHART_ENTRIES {
                return Err(Error::Validation(format!(
                    "week {} city {} has {} entries (max {MAX_CHART_ENTRIES})",
                    chart.week,
                    chart.city,
                    chart.entries.len()
                )));
            }
            let mut seen = BTreeSet::new();
            for (artist, listeners) in &chart.entries {
                if *listeners == 0 {
                    return Err(Error::Validation(format!(
                        "week {} city {} artist {artist}: listeners must be positive",
                        chart.week, chart.city
                    )));
                }
                if !seen.insert(artist.as_str()) {
                    return Err(Error::Validation(format!(
                        "duplicate entry for week {} city {} artist {artist}",
                        chart.week, chart.city
                    )));
                }
                artists.insert(artist.clone());
            }
            cities.insert(chart.city.clone());
        }

        let universe = ArtistUniverse::from_artists(artists);
        let cities: Vec<String> = cities.into_iter().collect();
        let period = match (merged.first(), merged.last()) {
            (Some(a), Some(b)) => Some((a.week, b.week)),
            _ => None,
        };

        let mut counts: BTreeMap<u32, Vec<SparseVec>> = BTreeMap::new();
        for chart in &merged {
            let city_idx = cities.binary_search(&chart.city).expect("city collected");
            let row = counts
                .entry(chart.week)
                .or_insert_with(|| alloc::vec![SparseVec::new(); cities.len()]);
            let pairs = chart
                .entries
                .iter()
                .map(|(a, n)| (universe.index_of(a).expect("artist collected"), *n as f64))
                .collect();
            row[city_idx] = SparseVec::from_pairs(pairs);
        }

        if let Some((first, last)) = period {
            if let Some(gap) = (first..=last).find(|w| !counts.contains_key(w) && !missing.contains(*w)) {
                return Err(Error::Validation(format!(
                    "week {gap} has no charts and is not listed as missing; weeks must be contiguous"
                )));
            }
        }

        Ok(Self {
            universe,
            missing,
            cities,
            period,
            counts,
            charts: merged,
        })
    }

    pub fn universe(&self) -> &ArtistUniverse {
        &self.universe
    }

    pub fn missing(&self) -> &MissingWeekSet {
        &self.missing
    }

    pub fn cities(&self) -> &[String] {
        &self.cities
    }

    pub fn charts(&self) -> &[WeeklyChart] {
        &self.charts
    }

    /// Charts from missing weeks are kept but flagged.
    pub fn is_flagged(&self, week: u32) -> bool {
        self.missing.contains(week)
    }

    pub fn period(&self) -> Option<(u32, u32)> {
        self.period
    }

    /// Number of weeks in the study period.
    pub fn study_weeks(&self) -> u32 {
        self.period.map_or(0, |(a, b)| b - a + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    /// Every start week whose 4-week window lies inside the study period,
    /// whether or not it touches a missing week.
    pub fn candidate_starts(&self) -> impl Iterator<Item = u32> {
        match self.period {
            Some((first, last)) if last - first + 1 >= WINDOW_WEEKS => first..last + 2 - WINDOW_WEEKS,
            _ => 0..0,
        }
    }

    /// Raw summed counts for the window starting at `start`.
    pub fn build_window(&self, start: u32) -> Result<ListenMatrix> {
        let Some((first, last)) = self.period else {
            return Err(Error::WindowUnavailable { start });
        };
        let end = start.checked_add(WINDOW_WEEKS - 1);
        if start < first || end.is_none_or(|e| e > last) || self.missing.intersects(start, WINDOW_WEEKS) {
            return Err(Error::WindowUnavailable { start });
        }
        let mut rows = BTreeMap::new();
        for (ci, city) in self.cities.iter().enumerate() {
            let mut pairs = Vec::new();
            for week in start..start + WINDOW_WEEKS {
                if let Some(row) = self.counts.get(&week) {
                    pairs.extend_from_slice(row[ci].entries());
                }
            }
            rows.insert(city.clone(), SparseVec::from_pairs(pairs));
        }
        Ok(ListenMatrix {
            window_start: start,
            width_weeks: WINDOW_WEEKS,
            genre: None,
            normalized: false,
            rows,
        })
    }

    /// All available windows, optionally genre-filtered, row-normalized.
    pub fn windows(&self, genre: Option<&ColumnMask>) -> WindowSeries {
        let mut windows = BTreeMap::new();
        for start in self.candidate_starts() {
            let Ok(mut matrix) = self.build_window(start) else {
                continue;
            };
            if let Some(mask) = genre {
                matrix = matrix.filter_columns(mask).expect("fresh matrix is raw");
            }
            windows.insert(start, matrix.normalize_rows());
        }
        WindowSeries { windows }
    }
}

/// City × artist matrix for one 4-week window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListenMatrix {
    pub window_start: u32,
    pub width_weeks: u32,
    pub genre: Option<String>,
    pub normalized: bool,
    /// One row per city in the chart set; an empty row means the city is
    /// inactive in this window.
    pub rows: BTreeMap<String, SparseVec>,
}

impl ListenMatrix {
    pub fn row(&self, city: &str) -> Option<&SparseVec> {
        self.rows.get(city)
    }

    pub fn is_active(&self, city: &str) -> bool {
        self.rows.get(city).is_some_and(|r| !r.is_empty())
    }

    /// Active row for `city`, if any.
    pub fn active_row(&self, city: &str) -> Option<&SparseVec> {
        self.rows.get(city).filter(|r| !r.is_empty())
    }

    /// Divides every non-empty row by its Euclidean norm. Empty rows stay
    /// empty.
    pub fn normalize_rows(mut self) -> ListenMatrix {
        if self.normalized {
            return self;
        }
        for row in self.rows.values_mut() {
            let norm = row.norm();
            if norm > 0.0 {
                *row = row.divided(norm);
            }
        }
        self.normalized = true;
        self
    }

    /// Drops every column outside `mask`. Must run before normalization.
    pub fn filter_columns(mut self, mask: &ColumnMask) -> Result<ListenMatrix> {
        if self.normalized {
            return Err(Error::AlreadyNormalized);
        }
        for row in self.rows.values_mut() {
            *row = row.retain_columns(|c| mask.contains(c));
        }
        self.genre = Some(mask.genre.clone());
        Ok(self)
    }
}

/// Restricts `matrix` to the artists of `genre`.
pub fn filter_genre(
    matrix: ListenMatrix,
    catalog: &GenreCatalog,
    genre: &str,
    universe: &ArtistUniverse,
) -> Result<ListenMatrix> {
    let mask = catalog.column_mask(genre, universe)?;
    matrix.filter_columns(&mask)
}

/// Ranked artist lists per genre.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenreCatalog {
    genres: BTreeMap<String, Vec<String>>,
}

impl GenreCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a genre list, rejecting duplicates and lists over the cap.
    pub fn insert(&mut self, genre: impl Into<String>, artists: Vec<String>) -> Result<()> {
        let genre = genre.into();
        if artists.len() > MAX_GENRE_ARTISTS {
            return Err(Error::Validation(format!(
                "genre {genre} lists {} artists (max {MAX_GENRE_ARTISTS})",
                artists.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for a in &artists {
            if !seen.insert(a.as_str()) {
                return Err(Error::Validation(format!("genre {genre} lists {a} twice")));
            }
        }
        self.genres.insert(genre, artists);
        Ok(())
    }

    pub fn get(&self, genre: &str) -> Option<&[String]> {
        self.genres.get(genre).map(Vec::as_slice)
    }

    pub fn genres(&self) -> impl Iterator<Item = &str> {
        self.genres.keys().map(String::as_str)
    }

    pub fn column_mask(&self, genre: &str, universe: &ArtistUniverse) -> Result<ColumnMask> {
        let artists = self
            .genres
            .get(genre)
            .ok_or_else(|| Error::UnknownGenre(genre.into()))?;
        let columns = artists.iter().filter_map(|a| universe.index_of(a)).collect();
        Ok(ColumnMask {
            genre: genre.into(),
            columns,
        })
    }
}

/// Universe columns belonging to one genre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMask {
    pub genre: String,
    pub columns: BTreeSet<u32>,
}

impl ColumnMask {
    pub fn contains(&self, column: u32) -> bool {
        self.columns.contains(&column)
    }
}

/// Normalized windows keyed by start week.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WindowSeries {
    windows: BTreeMap<u32, ListenMatrix>,
}

impl WindowSeries {
    pub fn from_matrices(matrices: impl IntoIterator<Item = ListenMatrix>) -> Self {
        Self {
            windows: matrices.into_iter().map(|m| (m.window_start, m)).collect(),
        }
    }

    pub fn get(&self, start: u32) -> Option<&ListenMatrix> {
        self.windows.get(&start)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ListenMatrix> {
        self.windows.values()
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn starts(&self) -> impl Iterator<Item = u32> + '_ {
        self.windows.keys().copied()
    }

    /// Every city that has a row in at least one window.
    pub fn cities(&self) -> BTreeSet<&str> {
        self.windows
            .values()
            .flat_map(|m| m.rows.keys().map(String::as_str))
            .collect()
    }
}
