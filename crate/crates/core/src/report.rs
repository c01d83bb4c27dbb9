//! Deterministic CSV/JSON emitters for the analysis pipeline.
//!
//! Every writer fixes row order and float formatting so identical inputs
//! produce byte-identical files. Full-precision values use shortest
//! round-trip formatting; table values are rounded half-even to three
//! decimals.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::construct::NetworkKind;
use crate::graph::{StationId, TransitGraph};
use crate::metrics::{CentralityTable, ClosenessConvention, DegreeDistribution, PowerLawFit};
use crate::socio::{BoroughSummary, CorrelationReport};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_full(x: f64) -> String {
    format!("{x}")
}

/// Half-even rounding to three decimals, as in the printed tables.
pub fn fmt_table(x: f64) -> String {
    format!("{x:.3}")
}

fn write_text(path: &Path, contents: &str) -> Result<(), ReportError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| ReportError::Json {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkStats {
    pub nodes: usize,
    pub edges: usize,
    pub diameter: u32,
    pub connected: bool,
    pub component_sizes: Vec<usize>,
}

pub fn network_stats(g: &TransitGraph) -> Result<NetworkStats, crate::graph::GraphError> {
    let d = g.diameter()?;
    Ok(NetworkStats {
        nodes: g.node_count(),
        edges: g.edge_count(),
        diameter: d.diameter,
        connected: d.connected,
        component_sizes: d.component_sizes,
    })
}

pub fn write_stats(path: &Path, stats: &NetworkStats) -> Result<(), ReportError> {
    write_json(path, stats)
}

/// Edge list `u,v,lines` with u < v, rows sorted, lines pipe-joined.
pub fn write_edge_list(path: &Path, g: &TransitGraph) -> Result<(), ReportError> {
    let mut out = String::from("u,v,lines\n");
    for (u, v, lines) in g.edges() {
        let joined: Vec<&str> = lines.iter().map(String::as_str).collect();
        out.push_str(&format!("{},{},{}\n", g.id(*u), g.id(*v), joined.join("|")));
    }
    write_text(path, &out)
}

/// Full-precision per-node scores, sorted by station id.
pub fn write_node_scores(
    path: &Path,
    g: &TransitGraph,
    table: &CentralityTable,
) -> Result<(), ReportError> {
    let mut out = String::from("station_id,name,score\n");
    for (id, score) in &table.scores {
        let name = g.station(id).map(|s| s.name.as_str()).unwrap_or(id.as_str());
        out.push_str(&format!("{},{},{}\n", id, csv_quote(name), fmt_full(*score)));
    }
    write_text(path, &out)
}

/// Top-10 table with 3-decimal scores; full-network tables carry an
/// `accessible` Y/N column.
pub fn write_top10(
    path: &Path,
    g: &TransitGraph,
    table: &CentralityTable,
    accessible_stations: Option<&BTreeSet<StationId>>,
    k: usize,
) -> Result<(), ReportError> {
    let mut out = String::new();
    match accessible_stations {
        Some(_) => out.push_str("rank,station_id,name,accessible,score\n"),
        None => out.push_str("rank,station_id,name,score\n"),
    }
    for (rank, (id, score)) in table.top_k(k).into_iter().enumerate() {
        let name = g
            .station(&id)
            .map(|s| s.name.as_str())
            .unwrap_or(id.as_str());
        match accessible_stations {
            Some(set) => {
                let flag = if set.contains(&id) { "Y" } else { "N" };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    rank + 1,
                    id,
                    csv_quote(name),
                    flag,
                    fmt_table(score)
                ));
            }
            None => out.push_str(&format!(
                "{},{},{},{}\n",
                rank + 1,
                id,
                csv_quote(name),
                fmt_table(score)
            )),
        }
    }
    write_text(path, &out)
}

/// Sorted centrality curve: rank (1 = highest) vs value.
pub fn write_sorted_curve(path: &Path, table: &CentralityTable) -> Result<(), ReportError> {
    let mut out = String::from("rank,station_id,value\n");
    for (rank, (id, score)) in table.top_k(table.scores.len()).into_iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", rank + 1, id, fmt_full(score)));
    }
    write_text(path, &out)
}

/// Degree vs centrality scatter rows.
pub fn write_degree_scatter(
    path: &Path,
    g: &TransitGraph,
    table: &CentralityTable,
) -> Result<(), ReportError> {
    let mut out = String::from("station_id,degree,value\n");
    for (id, score) in &table.scores {
        let degree = g.index_of(id).map(|i| g.degree(i)).unwrap_or(0);
        out.push_str(&format!("{},{},{}\n", id, degree, fmt_full(*score)));
    }
    write_text(path, &out)
}

/// Log-log degree distribution points.
pub fn write_degree_distribution(
    path: &Path,
    dist: &DegreeDistribution,
) -> Result<(), ReportError> {
    let mut out = String::from("k,count,p,log10_k,log10_p\n");
    for (&k, &count) in &dist.counts {
        let p = count as f64 / dist.total as f64;
        if k >= 1 && count > 0 {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                k,
                count,
                fmt_full(p),
                fmt_full((k as f64).log10()),
                fmt_full(p.log10())
            ));
        } else {
            out.push_str(&format!("{},{},{},,\n", k, count, fmt_full(p)));
        }
    }
    write_text(path, &out)
}

pub fn write_power_law_fit(path: &Path, fit: &PowerLawFit) -> Result<(), ReportError> {
    write_json(path, fit)
}

/// Induced subgraph over the top-k stations of one table: node rows with
/// degree in the source network and serving-line list, plus edge rows.
pub fn write_subgraph(
    nodes_path: &Path,
    edges_path: &Path,
    g: &TransitGraph,
    table: &CentralityTable,
    k: usize,
) -> Result<(), ReportError> {
    let top: Vec<(StationId, f64)> = table.top_k(k);
    let members: BTreeSet<&StationId> = top.iter().map(|(id, _)| id).collect();
    let mut nodes_out = String::from("station_id,name,score,degree_in_network,lines\n");
    let mut sorted: Vec<&(StationId, f64)> = top.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (id, score) in sorted {
        let (name, lines) = match g.station(id) {
            Some(s) => {
                let ls: Vec<&str> = s.lines.iter().map(String::as_str).collect();
                (s.name.clone(), ls.join("|"))
            }
            None => (id.as_str().to_owned(), String::new()),
        };
        let degree = g.index_of(id).map(|i| g.degree(i)).unwrap_or(0);
        nodes_out.push_str(&format!(
            "{},{},{},{},{}\n",
            id,
            csv_quote(&name),
            fmt_full(*score),
            degree,
            lines
        ));
    }
    let mut edges_out = String::from("u,v,lines\n");
    for (u, v, lines) in g.edges() {
        let (iu, iv) = (g.id(*u), g.id(*v));
        if members.contains(iu) && members.contains(iv) {
            let joined: Vec<&str> = lines.iter().map(String::as_str).collect();
            edges_out.push_str(&format!("{},{},{}\n", iu, iv, joined.join("|")));
        }
    }
    write_text(nodes_path, &nodes_out)?;
    write_text(edges_path, &edges_out)
}

/// Borough bar-chart data (Figs. 5/10 style).
pub fn write_borough_summaries(
    path: &Path,
    summaries: &[BoroughSummary],
) -> Result<(), ReportError> {
    let mut out = String::from(
        "borough,accessible_count,total_count,median_income_k,daytime_total,daytime_workers,weekday_ridership,weekend_ridership,top10_betweenness_stations,top10_closeness_stations\n",
    );
    for s in summaries {
        let pick = |m: crate::metrics::Measure| -> String {
            let ids: Vec<&str> = s
                .top10_flags
                .iter()
                .filter(|(measure, _)| *measure == m)
                .map(|(_, id)| id.as_str())
                .collect();
            ids.join("|")
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_quote(&s.borough),
            s.accessible_count,
            s.total_count,
            fmt_full(s.median_income_k),
            s.daytime_total,
            s.daytime_workers,
            s.weekday_ridership.map(|v| v.to_string()).unwrap_or_default(),
            s.weekend_ridership.map(|v| v.to_string()).unwrap_or_default(),
            pick(crate::metrics::Measure::Betweenness),
            pick(crate::metrics::Measure::Closeness),
        ));
    }
    write_text(path, &out)
}

#[derive(Debug, Serialize)]
pub struct CorrelationOutput {
    pub reports: Vec<CorrelationReport>,
    /// Pairs skipped with the reason (missing data, zero variance).
    pub skipped: Vec<(String, String, String)>,
}

pub fn write_correlations(path: &Path, output: &CorrelationOutput) -> Result<(), ReportError> {
    write_json(path, output)
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written into every output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub networks: Vec<NetworkKind>,
    pub closeness_convention: String,
    pub notes: Vec<String>,
}

pub fn input_digest(path: &Path) -> Result<InputDigest, ReportError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex,
    })
}

pub fn manifest(
    command: &str,
    inputs: &[&Path],
    networks: &[NetworkKind],
    convention: ClosenessConvention,
    notes: Vec<String>,
) -> Result<RunManifest, ReportError> {
    let mut digests = Vec::with_capacity(inputs.len());
    for p in inputs {
        digests.push(input_digest(p)?);
    }
    let mut notes = notes;
    notes.insert(
        0,
        "inputs are point-in-time dataset snapshots identified by checksum; station-level \
         tabulations may differ across snapshot vintages"
            .to_owned(),
    );
    Ok(RunManifest {
        tool: "transit-access".to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        command: command.to_owned(),
        inputs: digests,
        networks: networks.to_vec(),
        closeness_convention: convention.as_str().to_owned(),
        notes,
    })
}

pub fn write_manifest(path: &Path, m: &RunManifest) -> Result<(), ReportError> {
    write_json(path, m)
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rounding_is_half_even_3dp() {
        // 0.4885 and 0.2465 both sit just below the decimal tie in binary
        assert_eq!(fmt_table(0.4885), "0.488");
        assert_eq!(fmt_table(0.2465), "0.246");
        assert_eq!(fmt_table(0.1), "0.100");
        assert_eq!(fmt_table(0.0625), "0.062"); // exact tie rounds to even
    }

    #[test]
    fn full_precision_round_trips() {
        let x = 0.123456789012345678;
        let s = fmt_full(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn quoting_only_when_needed() {
        assert_eq!(csv_quote("Stratford"), "Stratford");
        assert_eq!(csv_quote("Times Sq - 42nd St"), "Times Sq - 42nd St");
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
    }
}
