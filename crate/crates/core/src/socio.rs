//! Borough-level joins and correlation statistics.
//!
//! Summaries join the station table (counts of stations and accessible
//! stations per borough) with the socioeconomic table and flag stations
//! appearing in any top-10 centrality list. Correlations report Pearson on
//! raw values and Spearman on average ranks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::StationId;
use crate::ingest::{AccessMode, AccessibilityRecord, BoroughRecord, Station};
use crate::metrics::{CentralityTable, Measure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SocioError {
    #[error("need at least 3 data points with both fields present, got {0}")]
    InsufficientData(usize),
    #[error("variable `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("unknown summary field `{0}`")]
    UnknownField(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct BoroughSummary {
    pub borough: String,
    pub accessible_count: usize,
    pub total_count: usize,
    pub median_income_k: f64,
    pub daytime_total: u64,
    pub daytime_workers: u64,
    pub weekday_ridership: Option<u64>,
    pub weekend_ridership: Option<u64>,
    /// (measure, station) pairs for top-10 central stations in this borough.
    pub top10_flags: BTreeSet<(Measure, StationId)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub variable_pair: (String, String),
    pub pearson_r: f64,
    pub spearman_rho: f64,
    pub n: usize,
}

/// Join station counts, accessibility, socioeconomic rows, and top-10
/// flags per borough. Boroughs named in the station table but absent from
/// the borough table are returned as warnings, not errors.
pub fn borough_summaries(
    stations: &[Station],
    access_records: &[AccessibilityRecord],
    borough_table: &[BoroughRecord],
    tables: &[CentralityTable],
) -> (Vec<BoroughSummary>, Vec<String>) {
    let full_access: BTreeSet<&StationId> = access_records
        .iter()
        .filter(|r| r.mode == AccessMode::Full)
        .map(|r| &r.station)
        .collect();
    let by_borough: BTreeMap<&str, &BoroughRecord> = borough_table
        .iter()
        .map(|b| (b.borough.as_str(), b))
        .collect();

    let mut station_borough: BTreeMap<&StationId, &str> = BTreeMap::new();
    let mut totals: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut unmatched: BTreeSet<String> = BTreeSet::new();
    for s in stations {
        let borough = s.borough.trim();
        station_borough.insert(&s.id, borough);
        let entry = totals.entry(borough).or_insert((0, 0));
        entry.0 += 1;
        if full_access.contains(&s.id) {
            entry.1 += 1;
        }
        if !by_borough.contains_key(borough) {
            unmatched.insert(borough.to_owned());
        }
    }

    let mut flags: BTreeMap<&str, BTreeSet<(Measure, StationId)>> = BTreeMap::new();
    for table in tables {
        for (id, _) in table.top_k(10) {
            if let Some(borough) = station_borough.get(&id) {
                flags
                    .entry(borough)
                    .or_default()
                    .insert((table.measure, id.clone()));
            }
        }
    }

    let mut summaries = Vec::new();
    for record in borough_table {
        let (total_count, accessible_count) = totals
            .get(record.borough.as_str())
            .copied()
            .unwrap_or((0, 0));
        summaries.push(BoroughSummary {
            borough: record.borough.clone(),
            accessible_count,
            total_count,
            median_income_k: record.median_income_k,
            daytime_total: record.daytime_total,
            daytime_workers: record.daytime_workers,
            weekday_ridership: record.weekday_ridership,
            weekend_ridership: record.weekend_ridership,
            top10_flags: flags
                .get(record.borough.as_str())
                .cloned()
                .unwrap_or_default(),
        });
    }
    (summaries, unmatched.into_iter().collect())
}

/// Numeric accessor for a named summary field; `None` when absent.
pub fn summary_field(summary: &BoroughSummary, field: &str) -> Result<Option<f64>, SocioError> {
    Ok(match field {
        "accessible_count" => Some(summary.accessible_count as f64),
        "total_count" => Some(summary.total_count as f64),
        "median_income_k" => Some(summary.median_income_k),
        "daytime_total" => Some(summary.daytime_total as f64),
        "daytime_workers" => Some(summary.daytime_workers as f64),
        "weekday_ridership" => summary.weekday_ridership.map(|v| v as f64),
        "weekend_ridership" => summary.weekend_ridership.map(|v| v as f64),
        other => return Err(SocioError::UnknownField(other.to_owned())),
    })
}

pub fn correlate(
    summaries: &[BoroughSummary],
    x: &str,
    y: &str,
) -> Result<CorrelationReport, SocioError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in summaries {
        if let (Some(a), Some(b)) = (summary_field(s, x)?, summary_field(s, y)?) {
            xs.push(a);
            ys.push(b);
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(SocioError::InsufficientData(n));
    }
    let pearson_r = pearson(&xs, &ys).map_err(|axis| {
        SocioError::ZeroVariance(if axis == 0 { x.to_owned() } else { y.to_owned() })
    })?;
    let spearman_rho = pearson(&average_ranks(&xs), &average_ranks(&ys)).map_err(|axis| {
        SocioError::ZeroVariance(if axis == 0 { x.to_owned() } else { y.to_owned() })
    })?;
    Ok(CorrelationReport {
        variable_pair: (x.to_owned(), y.to_owned()),
        pearson_r,
        spearman_rho,
        n,
    })
}

/// Pearson r; Err(axis) when one variable is constant (0 = x, 1 = y).
fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, u8> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(0);
    }
    if syy == 0.0 {
        return Err(1);
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing the average rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
