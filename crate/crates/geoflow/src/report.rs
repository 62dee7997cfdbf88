//! Plain-text summary tables.

use std::fmt::Write;

use geoflow_core::leadnet::{AcyclicityReport, SizeLeadershipReport};

pub const ACYCLICITY_HEADERS: [&str; 3] = ["Region", "Genre", "% Edge weight removed to make acyclic"];
pub const SIZE_HEADERS: [&str; 4] = ["Genre", "PageRank", "In-degree", "% Edge weight where leader larger"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub region: String,
    pub genre: String,
    pub acyclicity: AcyclicityReport,
    pub size: Option<SizeLeadershipReport>,
}

/// Percent with one decimal, as in `0.0%`.
pub fn percent(value: f64) -> String {
    format!("{value:.1}%")
}

fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

pub fn acyclicity_table(rows: &[ReportRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.region.clone(), r.genre.clone(), percent(r.acyclicity.percent_removed)])
        .collect();
    render(&ACYCLICITY_HEADERS, &cells)
}

/// Rows without a size report are skipped.
pub fn size_table(rows: &[ReportRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .filter_map(|r| {
            let s = r.size.as_ref()?;
            Some(vec![
                r.genre.clone(),
                format!("{:.2}", s.spearman_pagerank),
                format!("{:.2}", s.spearman_indegree),
                s.percent_weight_larger_leads.map_or_else(|| "n/a".to_string(), |p| format!("{p:.0}%")),
            ])
        })
        .collect();
    render(&SIZE_HEADERS, &cells)
}

pub fn full_report(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    writeln!(out, "Leadership graph acyclicity").unwrap();
    out.push_str(&acyclicity_table(rows));
    if rows.iter().any(|r| r.size.is_some()) {
        writeln!(out, "\nCity size vs. leadership (Spearman rank correlation)").unwrap();
        out.push_str(&size_table(rows));
    } else {
        writeln!(out, "\nNo populations given; size analysis skipped.").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        let row = ReportRow {
            region: "All".into(),
            genre: "Rock".into(),
            acyclicity: AcyclicityReport {
                total_weight: 1.0,
                fas_weight: 0.022,
                percent_removed: 2.2,
                removed_edges: vec![],
                exact: true,
            },
            size: Some(SizeLeadershipReport {
                spearman_pagerank: 0.31,
                spearman_indegree: 0.276,
                percent_weight_larger_leads: Some(64.4),
                cities_used: 20,
                excluded: vec![],
            }),
        };
        let text = full_report(&[row]);
        assert!(text.contains("| Region | Genre | % Edge weight removed to make acyclic |"));
        assert!(text.contains("| All    | Rock  | 2.2%"));
        assert!(text.contains("| Genre | PageRank | In-degree | % Edge weight where leader larger |"));
        assert!(text.contains("| Rock  | 0.31     | 0.28      | 64%"));
    }
}
