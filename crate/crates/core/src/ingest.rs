//! Parsers for the four canonical CSV inputs.
//!
//! Schemas (UTF-8, comma separated, first row header, LF or CRLF):
//!
//! - `stations.csv`: `id,name,borough,region,lines` with `lines` pipe-separated
//! - `branches.csv`: `line_id,branch_id,seq,station_id`, `seq` 1-based ascending per branch
//! - `accessibility.csv`: `station_id,line_id,mode` with mode in {full, one_way, none}
//! - `boroughs.csv`: `borough,median_income_k,daytime_total,daytime_workers,weekday_ridership,weekend_ridership`
//!
//! Every failure carries the offending row number (1-based, header = row 1).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::StationId;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed CSV at row {row}: {message}")]
    Malformed {
        path: String,
        row: u64,
        message: String,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: String, column: String },
    #[error("{path}: row {row}: duplicate station id `{id}`")]
    DuplicateId { path: String, row: u64, id: String },
    #[error("{path}: row {row}: station `{id}` has an empty line set")]
    EmptyLineSet { path: String, row: u64, id: String },
    #[error("{path}: row {row}: {field} `{value}` is invalid: {message}")]
    BadField {
        path: String,
        row: u64,
        field: String,
        value: String,
        message: String,
    },
    #[error("{path}: row {row}: unknown station reference `{id}`")]
    UnknownStationRef { path: String, row: u64, id: String },
    #[error("{path}: row {row}: branch {line_id}/{branch_id} has non-monotone seq {seq}")]
    NonMonotoneSequence {
        path: String,
        row: u64,
        line_id: String,
        branch_id: String,
        seq: u32,
    },
    #[error("branch {line_id}/{branch_id} has fewer than 2 stations")]
    BranchTooShort { line_id: String, branch_id: String },
    #[error("{path}: row {row}: branch {line_id}/{branch_id} repeats station `{id}`")]
    RepeatedStation {
        path: String,
        row: u64,
        line_id: String,
        branch_id: String,
        id: String,
    },
    #[error("{path}: row {row}: duplicate accessibility record for ({station}, {line})")]
    DuplicateRecord {
        path: String,
        row: u64,
        station: String,
        line: String,
    },
    #[error("{path}: row {row}: bad accessibility mode `{mode}` (expected full, one_way or none)")]
    BadMode { path: String, row: u64, mode: String },
    #[error("{path}: row {row}: borough `{borough}`: {message}")]
    NegativeCount {
        path: String,
        row: u64,
        borough: String,
        message: String,
    },
}

/// A transit stop with identity, location, and serving lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Station {
    pub id: StationId,
    pub name: String,
    pub borough: String,
    /// London fare region 1..=9; absent for systems without regions.
    pub region: Option<u8>,
    pub lines: BTreeSet<String>,
}

impl Station {
    /// Minimal record for synthetic graphs in tests and tools.
    pub fn bare(id: impl Into<String>) -> Self {
        let id = id.into();
        Station {
            name: id.clone(),
            id: StationId::new(id),
            borough: String::new(),
            region: None,
            lines: BTreeSet::from(["_".to_owned()]),
        }
    }
}

/// Ordered station sequence along one branch of one service line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBranch {
    pub line_id: String,
    pub branch_id: String,
    pub stations: Vec<StationId>,
}

/// Per-line accessibility status of a station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessMode {
    Full,
    OneWay,
    None,
}

impl AccessMode {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(AccessMode::Full),
            "one_way" => Some(AccessMode::OneWay),
            "none" => Some(AccessMode::None),
            _ => Option::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessibilityRecord {
    pub station: StationId,
    pub line_id: String,
    pub mode: AccessMode,
}

/// Borough-level socioeconomic row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoroughRecord {
    pub borough: String,
    /// Median income in thousands of local currency.
    pub median_income_k: f64,
    pub daytime_total: u64,
    pub daytime_workers: u64,
    pub weekday_ridership: Option<u64>,
    pub weekend_ridership: Option<u64>,
}

struct Table {
    path: String,
    headers: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    fn load(path: &Path, required: &[&str]) -> Result<Self, IngestError> {
        let pstr = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => IngestError::Io {
                    path: pstr.clone(),
                    source: std::io::Error::other(e.to_string()),
                },
                _ => IngestError::Malformed {
                    path: pstr.clone(),
                    row: 1,
                    message: e.to_string(),
                },
            })?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| IngestError::Malformed {
                path: pstr.clone(),
                row: 1,
                message: e.to_string(),
            })?
            .iter()
            .map(|h| h.trim().to_owned())
            .collect();
        for col in required {
            if !headers.iter().any(|h| h == col) {
                return Err(IngestError::MissingColumn {
                    path: pstr,
                    column: (*col).to_owned(),
                });
            }
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i as u64 + 2; // 1-based, after the header
            let record = record.map_err(|e| IngestError::Malformed {
                path: pstr.clone(),
                row,
                message: e.to_string(),
            })?;
            rows.push((row, record.iter().map(|f| f.trim().to_owned()).collect()));
        }
        Ok(Table {
            path: pstr,
            headers,
            rows,
        })
    }

    fn col(&self, name: &str) -> usize {
        self.headers.iter().position(|h| h == name).unwrap()
    }

    fn field<'a>(&self, row: &'a [String], idx: usize) -> &'a str {
        row.get(idx).map(|s| s.as_str()).unwrap_or("")
    }
}

pub fn parse_stations(path: &Path) -> Result<Vec<Station>, IngestError> {
    let table = Table::load(path, &["id", "name", "borough", "region", "lines"])?;
    let (ci, cn, cb, cr, cl) = (
        table.col("id"),
        table.col("name"),
        table.col("borough"),
        table.col("region"),
        table.col("lines"),
    );
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut stations = Vec::with_capacity(table.rows.len());
    for (row, fields) in &table.rows {
        let id = table.field(fields, ci);
        if id.is_empty() {
            return Err(IngestError::BadField {
                path: table.path.clone(),
                row: *row,
                field: "id".into(),
                value: String::new(),
                message: "station id must be non-empty".into(),
            });
        }
        if !seen.insert(id.to_owned()) {
            return Err(IngestError::DuplicateId {
                path: table.path.clone(),
                row: *row,
                id: id.to_owned(),
            });
        }
        let region_raw = table.field(fields, cr);
        let region = if region_raw.is_empty() {
            None
        } else {
            let r: u8 = region_raw.parse().map_err(|_| IngestError::BadField {
                path: table.path.clone(),
                row: *row,
                field: "region".into(),
                value: region_raw.to_owned(),
                message: "expected an integer in 1..=9".into(),
            })?;
            if !(1..=9).contains(&r) {
                return Err(IngestError::BadField {
                    path: table.path.clone(),
                    row: *row,
                    field: "region".into(),
                    value: region_raw.to_owned(),
                    message: "expected an integer in 1..=9".into(),
                });
            }
            Some(r)
        };
        let lines: BTreeSet<String> = table
            .field(fields, cl)
            .split('|')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if lines.is_empty() {
            return Err(IngestError::EmptyLineSet {
                path: table.path.clone(),
                row: *row,
                id: id.to_owned(),
            });
        }
        stations.push(Station {
            id: StationId::new(id),
            name: table.field(fields, cn).to_owned(),
            borough: table.field(fields, cb).to_owned(),
            region,
            lines,
        });
    }
    Ok(stations)
}

pub fn parse_line_branches(
    path: &Path,
    stations: &[Station],
) -> Result<Vec<LineBranch>, IngestError> {
    let table = Table::load(path, &["line_id", "branch_id", "seq", "station_id"])?;
    let (cl, cb, cs, cst) = (
        table.col("line_id"),
        table.col("branch_id"),
        table.col("seq"),
        table.col("station_id"),
    );
    let known: BTreeSet<&str> = stations.iter().map(|s| s.id.as_str()).collect();
    // Preserve file order of branches and of stations within each branch.
    let mut order: Vec<(String, String)> = Vec::new();
    let mut branches: BTreeMap<(String, String), (u32, BTreeSet<String>, Vec<StationId>, u64)> =
        BTreeMap::new();
    for (row, fields) in &table.rows {
        let line_id = table.field(fields, cl).to_owned();
        let branch_id = table.field(fields, cb).to_owned();
        let seq_raw = table.field(fields, cs);
        let seq: u32 = seq_raw.parse().map_err(|_| IngestError::BadField {
            path: table.path.clone(),
            row: *row,
            field: "seq".into(),
            value: seq_raw.to_owned(),
            message: "expected a positive integer".into(),
        })?;
        let sid = table.field(fields, cst);
        if !known.contains(sid) {
            return Err(IngestError::UnknownStationRef {
                path: table.path.clone(),
                row: *row,
                id: sid.to_owned(),
            });
        }
        let key = (line_id.clone(), branch_id.clone());
        if !branches.contains_key(&key) {
            order.push(key.clone());
        }
        let entry = branches
            .entry(key)
            .or_insert_with(|| (0, BTreeSet::new(), Vec::new(), *row));
        if seq <= entry.0 {
            return Err(IngestError::NonMonotoneSequence {
                path: table.path.clone(),
                row: *row,
                line_id,
                branch_id,
                seq,
            });
        }
        if !entry.1.insert(sid.to_owned()) {
            return Err(IngestError::RepeatedStation {
                path: table.path.clone(),
                row: *row,
                line_id,
                branch_id,
                id: sid.to_owned(),
            });
        }
        entry.0 = seq;
        entry.2.push(StationId::new(sid));
    }
    let mut out = Vec::with_capacity(order.len());
    for key in order {
        let (_, _, stations, _) = branches.remove(&key).unwrap();
        if stations.len() < 2 {
            return Err(IngestError::BranchTooShort {
                line_id: key.0,
                branch_id: key.1,
            });
        }
        out.push(LineBranch {
            line_id: key.0,
            branch_id: key.1,
            stations,
        });
    }
    Ok(out)
}

pub fn parse_accessibility(
    path: &Path,
    stations: &[Station],
) -> Result<Vec<AccessibilityRecord>, IngestError> {
    let table = Table::load(path, &["station_id", "line_id", "mode"])?;
    let (cs, cl, cm) = (
        table.col("station_id"),
        table.col("line_id"),
        table.col("mode"),
    );
    let known: BTreeSet<&str> = stations.iter().map(|s| s.id.as_str()).collect();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut records = Vec::with_capacity(table.rows.len());
    for (row, fields) in &table.rows {
        let sid = table.field(fields, cs);
        let line = table.field(fields, cl);
        let mode_raw = table.field(fields, cm);
        if !known.contains(sid) {
            return Err(IngestError::UnknownStationRef {
                path: table.path.clone(),
                row: *row,
                id: sid.to_owned(),
            });
        }
        let mode = AccessMode::parse(mode_raw).ok_or_else(|| IngestError::BadMode {
            path: table.path.clone(),
            row: *row,
            mode: mode_raw.to_owned(),
        })?;
        if !seen.insert((sid.to_owned(), line.to_owned())) {
            return Err(IngestError::DuplicateRecord {
                path: table.path.clone(),
                row: *row,
                station: sid.to_owned(),
                line: line.to_owned(),
            });
        }
        records.push(AccessibilityRecord {
            station: StationId::new(sid),
            line_id: line.to_owned(),
            mode,
        });
    }
    Ok(records)
}

pub fn parse_borough_table(path: &Path) -> Result<Vec<BoroughRecord>, IngestError> {
    let table = Table::load(
        path,
        &[
            "borough",
            "median_income_k",
            "daytime_total",
            "daytime_workers",
        ],
    )?;
    let (cb, ci, ct, cw) = (
        table.col("borough"),
        table.col("median_income_k"),
        table.col("daytime_total"),
        table.col("daytime_workers"),
    );
    let c_wd = table.headers.iter().position(|h| h == "weekday_ridership");
    let c_we = table.headers.iter().position(|h| h == "weekend_ridership");
    let parse_count = |table: &Table, row: u64, borough: &str, field: &str, raw: &str| {
        raw.parse::<u64>().map_err(|_| IngestError::NegativeCount {
            path: table.path.clone(),
            row,
            borough: borough.to_owned(),
            message: format!("{field} `{raw}` is not a non-negative integer"),
        })
    };
    let mut records = Vec::with_capacity(table.rows.len());
    for (row, fields) in &table.rows {
        let borough = table.field(fields, cb).to_owned();
        let income_raw = table.field(fields, ci);
        let median_income_k: f64 = income_raw.parse().map_err(|_| IngestError::BadField {
            path: table.path.clone(),
            row: *row,
            field: "median_income_k".into(),
            value: income_raw.to_owned(),
            message: "expected a number".into(),
        })?;
        let daytime_total = parse_count(
            &table,
            *row,
            &borough,
            "daytime_total",
            table.field(fields, ct),
        )?;
        let daytime_workers = parse_count(
            &table,
            *row,
            &borough,
            "daytime_workers",
            table.field(fields, cw),
        )?;
        if daytime_workers > daytime_total {
            return Err(IngestError::NegativeCount {
                path: table.path.clone(),
                row: *row,
                borough,
                message: format!(
                    "daytime_workers {daytime_workers} exceeds daytime_total {daytime_total}"
                ),
            });
        }
        let opt_count = |idx: Option<usize>| -> Result<Option<u64>, IngestError> {
            match idx {
                Some(i) => {
                    let raw = table.field(fields, i);
                    if raw.is_empty() {
                        Ok(None)
                    } else {
                        parse_count(&table, *row, &borough, "ridership", raw).map(Some)
                    }
                }
                None => Ok(None),
            }
        };
        let weekday_ridership = opt_count(c_wd)?;
        let weekend_ridership = opt_count(c_we)?;
        records.push(BoroughRecord {
            borough,
            median_income_k,
            daytime_total,
            daytime_workers,
            weekday_ridership,
            weekend_ridership,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn csv_file(contents: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_station_row() {
        let f = csv_file("id,name,borough,region,lines\npelham_bay,Pelham Bay Park,Bronx,,6\n");
        let stations = parse_stations(f.path()).unwrap();
        assert_eq!(stations.len(), 1);
        let s = &stations[0];
        assert_eq!(s.name, "Pelham Bay Park");
        assert_eq!(s.borough, "Bronx");
        assert_eq!(s.region, None);
        assert!(s.lines.contains("6"));
    }

    #[test]
    fn duplicate_station_id_reports_row() {
        let f = csv_file(
            "id,name,borough,region,lines\na,A,X,,1\nb,B,X,,1\na,A again,X,,1\n",
        );
        match parse_stations(f.path()) {
            Err(IngestError::DuplicateId { row, id, .. }) => {
                assert_eq!(row, 4);
                assert_eq!(id, "a");
            }
            other => panic!("expected DuplicateId, got {other:?}"),
        }
    }

    #[test]
    fn empty_line_set_rejected() {
        let f = csv_file("id,name,borough,region,lines\na,A,X,,\n");
        assert!(matches!(
            parse_stations(f.path()),
            Err(IngestError::EmptyLineSet { row: 2, .. })
        ));
    }

    #[test]
    fn missing_column_rejected() {
        let f = csv_file("id,name,borough,lines\na,A,X,1\n");
        assert!(matches!(
            parse_stations(f.path()),
            Err(IngestError::MissingColumn { column, .. }) if column == "region"
        ));
    }

    #[test]
    fn region_out_of_range_rejected() {
        let f = csv_file("id,name,borough,region,lines\na,A,X,10,1\n");
        assert!(matches!(
            parse_stations(f.path()),
            Err(IngestError::BadField { field, .. }) if field == "region"
        ));
    }

    fn three_stations() -> Vec<Station> {
        ["pelham_bay", "buhre_ave", "westchester_sq"]
            .iter()
            .map(|id| Station::bare(*id))
            .collect()
    }

    #[test]
    fn branch_of_three() {
        let f = csv_file(
            "line_id,branch_id,seq,station_id\n6,main,1,pelham_bay\n6,main,2,buhre_ave\n6,main,3,westchester_sq\n",
        );
        let branches = parse_line_branches(f.path(), &three_stations()).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].line_id, "6");
        assert_eq!(
            branches[0].stations,
            vec![
                StationId::from("pelham_bay"),
                StationId::from("buhre_ave"),
                StationId::from("westchester_sq")
            ]
        );
    }

    #[test]
    fn branch_too_short() {
        let f = csv_file("line_id,branch_id,seq,station_id\n6,main,1,pelham_bay\n");
        assert!(matches!(
            parse_line_branches(f.path(), &three_stations()),
            Err(IngestError::BranchTooShort { .. })
        ));
    }

    #[test]
    fn non_monotone_seq() {
        let f = csv_file(
            "line_id,branch_id,seq,station_id\n6,main,1,pelham_bay\n6,main,3,buhre_ave\n6,main,2,westchester_sq\n",
        );
        assert!(matches!(
            parse_line_branches(f.path(), &three_stations()),
            Err(IngestError::NonMonotoneSequence { row: 4, .. })
        ));
    }

    #[test]
    fn unknown_station_in_branch() {
        let f = csv_file("line_id,branch_id,seq,station_id\n6,main,1,nowhere\n");
        assert!(matches!(
            parse_line_branches(f.path(), &three_stations()),
            Err(IngestError::UnknownStationRef { .. })
        ));
    }

    #[test]
    fn accessibility_full_record() {
        let f = csv_file("station_id,line_id,mode\npelham_bay,6,full\n");
        let recs = parse_accessibility(f.path(), &three_stations()).unwrap();
        assert_eq!(recs[0].mode, AccessMode::Full);
    }

    #[test]
    fn bad_mode_rejected() {
        let f = csv_file("station_id,line_id,mode\npelham_bay,6,northbound\n");
        assert!(matches!(
            parse_accessibility(f.path(), &three_stations()),
            Err(IngestError::BadMode { mode, .. }) if mode == "northbound"
        ));
    }

    #[test]
    fn duplicate_access_record_rejected() {
        let f = csv_file("station_id,line_id,mode\npelham_bay,6,full\npelham_bay,6,none\n");
        assert!(matches!(
            parse_accessibility(f.path(), &three_stations()),
            Err(IngestError::DuplicateRecord { row: 3, .. })
        ));
    }

    #[test]
    fn borough_rows_parse() {
        let f = csv_file(
            "borough,median_income_k,daytime_total,daytime_workers,weekday_ridership,weekend_ridership\nNewham,28.9,306102,274935,,\nManhattan,101.078,3100000,2500000,1000,900\n",
        );
        let recs = parse_borough_table(f.path()).unwrap();
        assert_eq!(recs[0].borough, "Newham");
        assert_eq!(recs[0].median_income_k, 28.9);
        assert_eq!(recs[0].daytime_total, 306102);
        assert_eq!(recs[0].daytime_workers, 274935);
        assert_eq!(recs[0].weekday_ridership, None);
        assert_eq!(recs[1].median_income_k, 101.078);
        assert_eq!(recs[1].weekend_ridership, Some(900));
    }

    #[test]
    fn workers_exceeding_total_rejected() {
        let f = csv_file(
            "borough,median_income_k,daytime_total,daytime_workers\nNowhere,10.0,5,9\n",
        );
        assert!(matches!(
            parse_borough_table(f.path()),
            Err(IngestError::NegativeCount { row: 2, .. })
        ));
    }

    #[test]
    fn crlf_accepted() {
        let f = csv_file("id,name,borough,region,lines\r\na,A,X,1,central|circle\r\n");
        let stations = parse_stations(f.path()).unwrap();
        assert_eq!(stations[0].region, Some(1));
        assert_eq!(stations[0].lines.len(), 2);
    }
}
