//! Input files.
//!
//! - charts: CSV `week,city,artist,listeners`, one row per (week, city, artist)
//! - genres: CSV `genre,rank,artist`, rank in `1..=1000`
//! - missing weeks: one integer per line
//! - populations: CSV `city,population`

use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::path::Path;

use geoflow_core::charts::{ChartSet, GenreCatalog, MissingWeekSet, WeeklyChart};
use geoflow_core::MAX_GENRE_ARTISTS;

use super::read_to_string;
use crate::error::{GeoflowError, Result};

pub const CHART_HEADER: [&str; 4] = ["week", "city", "artist", "listeners"];
pub const GENRE_HEADER: [&str; 3] = ["genre", "rank", "artist"];
pub const POPULATION_HEADER: [&str; 2] = ["city", "population"];

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], path: &Path) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| GeoflowError::parse(path, 1, e.to_string()))?;
    if header.is_empty() {
        return Ok(());
    }
    if header.iter().ne(expected.iter().copied()) {
        return Err(GeoflowError::parse(
            path,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str, path: &Path, line: u64) -> Result<T> {
    let raw = record
        .get(idx)
        .ok_or_else(|| GeoflowError::parse(path, line, format!("missing `{name}` column")))?;
    raw.parse()
        .map_err(|_| GeoflowError::parse(path, line, format!("cannot parse `{name}` from `{raw}`")))
}

/// Parses chart rows. `path` only labels errors.
pub fn parse_charts<R: Read>(input: R, path: &Path) -> Result<Vec<WeeklyChart>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &CHART_HEADER, path)?;
    let mut seen: HashSet<(u32, String, String)> = HashSet::new();
    let mut grouped: BTreeMap<(u32, String), Vec<(String, u32)>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            GeoflowError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CHART_HEADER.len() {
            return Err(GeoflowError::parse(path, line, "expected 4 fields"));
        }
        let week: u32 = field(&record, 0, "week", path, line)?;
        let city = record[1].to_string();
        let artist = record[2].to_string();
        if city.is_empty() || artist.is_empty() {
            return Err(GeoflowError::parse(path, line, "empty city or artist"));
        }
        let listeners: i64 = field(&record, 3, "listeners", path, line)?;
        if listeners <= 0 {
            return Err(GeoflowError::Validation(format!(
                "{}:{line}: listeners must be positive, got {listeners}",
                path.display()
            )));
        }
        let listeners = u32::try_from(listeners).map_err(|_| {
            GeoflowError::Validation(format!("{}:{line}: listener count too large", path.display()))
        })?;
        if !seen.insert((week, city.clone(), artist.clone())) {
            return Err(GeoflowError::Validation(format!(
                "{}:{line}: duplicate entry for week {week}, city {city}, artist {artist}",
                path.display()
            )));
        }
        grouped.entry((week, city)).or_default().push((artist, listeners));
    }
    Ok(grouped
        .into_iter()
        .map(|((week, city), entries)| WeeklyChart { week, city, entries })
        .collect())
}

pub fn read_charts(path: &Path, missing: MissingWeekSet) -> Result<ChartSet> {
    let file = std::fs::File::open(path).map_err(|e| GeoflowError::io(path, e))?;
    let charts = parse_charts(std::io::BufReader::new(file), path)?;
    Ok(ChartSet::new(charts, missing)?)
}

/// Chart CSV sorted by week, city, artist.
pub fn charts_to_csv(charts: &[WeeklyChart]) -> String {
    let mut rows: Vec<(u32, &str, &str, u32)> = charts
        .iter()
        .flat_map(|c| c.entries.iter().map(move |(a, n)| (c.week, c.city.as_str(), a.as_str(), *n)))
        .collect();
    rows.sort_unstable();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CHART_HEADER).expect("in-memory write");
    for (week, city, artist, n) in rows {
        w.write_record([&week.to_string(), city, artist, &n.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn parse_missing(text: &str, path: &Path) -> Result<MissingWeekSet> {
    let mut set = MissingWeekSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let week = line
            .parse()
            .map_err(|_| GeoflowError::parse(path, i as u64 + 1, format!("not a week index: `{line}`")))?;
        set.insert(week);
    }
    Ok(set)
}

pub fn read_missing(path: &Path) -> Result<MissingWeekSet> {
    parse_missing(&read_to_string(path)?, path)
}

pub fn missing_to_text(missing: &MissingWeekSet) -> String {
    missing.iter().map(|w| format!("{w}\n")).collect()
}

pub fn parse_genres<R: Read>(input: R, path: &Path) -> Result<GenreCatalog> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &GENRE_HEADER, path)?;
    let mut ranked: BTreeMap<String, BTreeMap<u32, String>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            GeoflowError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let genre = record.get(0).unwrap_or_default().to_string();
        let rank: u32 = field(&record, 1, "rank", path, line)?;
        let artist = record
            .get(2)
            .ok_or_else(|| GeoflowError::parse(path, line, "missing `artist` column"))?
            .to_string();
        if !(1..=MAX_GENRE_ARTISTS as u32).contains(&rank) {
            return Err(GeoflowError::parse(path, line, format!("rank {rank} outside 1..={MAX_GENRE_ARTISTS}")));
        }
        if ranked.entry(genre.clone()).or_default().insert(rank, artist).is_some() {
            return Err(GeoflowError::parse(path, line, format!("duplicate rank {rank} in genre {genre}")));
        }
    }
    let mut catalog = GenreCatalog::new();
    for (genre, by_rank) in ranked {
        catalog.insert(genre, by_rank.into_values().collect())?;
    }
    Ok(catalog)
}

pub fn read_genres(path: &Path) -> Result<GenreCatalog> {
    let file = std::fs::File::open(path).map_err(|e| GeoflowError::io(path, e))?;
    parse_genres(std::io::BufReader::new(file), path)
}

pub fn parse_populations<R: Read>(input: R, path: &Path) -> Result<BTreeMap<String, u64>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &POPULATION_HEADER, path)?;
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            GeoflowError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let city = record.get(0).unwrap_or_default().to_string();
        let population: u64 = field(&record, 1, "population", path, line)?;
        if population == 0 {
            return Err(GeoflowError::parse(path, line, "population must be positive"));
        }
        if out.insert(city.clone(), population).is_some() {
            return Err(GeoflowError::parse(path, line, format!("duplicate city {city}")));
        }
    }
    Ok(out)
}

pub fn read_populations(path: &Path) -> Result<BTreeMap<String, u64>> {
    let file = std::fs::File::open(path).map_err(|e| GeoflowError::io(path, e))?;
    parse_populations(std::io::BufReader::new(file), path)
}

pub fn populations_to_csv(populations: &BTreeMap<String, u64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(POPULATION_HEADER).expect("in-memory write");
    for (c, p) in populations {
        w.write_record([c, &p.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
