//! L-space network construction.
//!
//! The full network links consecutive stations of every branch. The
//! accessible network keeps only stations with full step-free access on at
//! least one serving line, and per branch links each surviving station to
//! the next surviving one along the sequence, skipping stations that are
//! not fully accessible on that branch's line. One-way boarding access is
//! excluded from the collapse just like no access.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphBuilder, StationId, TransitGraph};
use crate::ingest::{AccessMode, AccessibilityRecord, LineBranch, Station};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Full,
    Accessible,
}

impl NetworkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Full => "full",
            NetworkKind::Accessible => "accessible",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("no station qualifies for the accessible network")]
    EmptyAccessibleSet,
}

fn station_map(stations: &[Station]) -> BTreeMap<&StationId, &Station> {
    stations.iter().map(|s| (&s.id, s)).collect()
}

/// Full L-space network: one node per station appearing in any branch, one
/// edge per consecutive branch pair, multi-edges collapsed.
pub fn build_full_network(stations: &[Station], branches: &[LineBranch]) -> TransitGraph {
    let by_id = station_map(stations);
    let mut builder = GraphBuilder::new();
    for branch in branches {
        for sid in &branch.stations {
            if !builder.contains(sid) {
                match by_id.get(sid) {
                    Some(s) => builder.add_station((*s).clone()),
                    None => builder.add_node(sid.clone()),
                }
            }
        }
        for pair in branch.stations.windows(2) {
            // endpoints were just registered; branch validation rules out self-loops
            builder
                .add_edge(&pair[0], &pair[1], &branch.line_id)
                .expect("validated branch yields well-formed edges");
        }
    }
    builder.build()
}

/// Per-(station, line) full-access lookup.
fn full_access_set(records: &[AccessibilityRecord]) -> BTreeSet<(&StationId, &str)> {
    records
        .iter()
        .filter(|r| r.mode == AccessMode::Full)
        .map(|r| (&r.station, r.line_id.as_str()))
        .collect()
}

/// Accessible network: nodes are stations fully accessible on at least one
/// serving line; per branch, consecutive fully-accessible survivors are
/// linked, however many inaccessible stations lie between them.
pub fn build_accessible_network(
    stations: &[Station],
    branches: &[LineBranch],
    records: &[AccessibilityRecord],
) -> Result<TransitGraph, ConstructError> {
    let by_id = station_map(stations);
    let full = full_access_set(records);
    let accessible_station = |sid: &StationId| -> bool {
        by_id
            .get(sid)
            .map(|s| s.lines.iter().any(|l| full.contains(&(sid, l.as_str()))))
            .unwrap_or(false)
    };

    let mut builder = GraphBuilder::new();
    for branch in branches {
        for sid in &branch.stations {
            if accessible_station(sid) && !builder.contains(sid) {
                builder.add_station((*by_id.get(sid).unwrap()).clone());
            }
        }
        let survivors: Vec<&StationId> = branch
            .stations
            .iter()
            .filter(|sid| full.contains(&(sid, branch.line_id.as_str())))
            .collect();
        for pair in survivors.windows(2) {
            builder
                .add_edge(pair[0], pair[1], &branch.line_id)
                .expect("survivors are distinct registered nodes");
        }
    }
    let g = builder.build();
    if g.is_empty() {
        return Err(ConstructError::EmptyAccessibleSet);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn station(id: &str, lines: &[&str]) -> Station {
        Station {
            id: StationId::from(id),
            name: id.to_owned(),
            borough: String::new(),
            region: None,
            lines: lines.iter().map(|l| (*l).to_owned()).collect(),
        }
    }

    fn branch(line: &str, branch_id: &str, ids: &[&str]) -> LineBranch {
        LineBranch {
            line_id: line.to_owned(),
            branch_id: branch_id.to_owned(),
            stations: ids.iter().map(|s| StationId::from(*s)).collect(),
        }
    }

    fn access(id: &str, line: &str, mode: AccessMode) -> AccessibilityRecord {
        AccessibilityRecord {
            station: StationId::from(id),
            line_id: line.to_owned(),
            mode,
        }
    }

    #[test]
    fn shared_segment_dedupes() {
        let stations = vec![
            station("a", &["l"]),
            station("b", &["l"]),
            station("c", &["l"]),
            station("d", &["l"]),
        ];
        let branches = vec![branch("l", "1", &["a", "b", "c"]), branch("l", "2", &["a", "b", "d"])];
        let g = build_full_network(&stations, &branches);
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(g.edge_lines(&"a".into(), &"b".into()).is_some());
    }

    #[test]
    fn collapse_skips_inaccessible_run() {
        let stations = vec![
            station("a", &["l"]),
            station("b", &["l"]),
            station("c", &["l"]),
            station("d", &["l"]),
        ];
        let branches = vec![branch("l", "1", &["a", "b", "c", "d"])];
        let records = vec![
            access("a", "l", AccessMode::Full),
            access("d", "l", AccessMode::Full),
        ];
        let g = build_accessible_network(&stations, &branches, &records).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.edge_lines(&"a".into(), &"d".into()).is_some());
    }

    #[test]
    fn next_accessible_stop_on_line_six() {
        // Pelham Bay Park and Westchester Sq are the adjacent accessible
        // stops on the 6 even with inaccessible stations between them.
        let stations = vec![
            station("pelham_bay", &["6"]),
            station("buhre_ave", &["6"]),
            station("middletown_rd", &["6"]),
            station("westchester_sq", &["6"]),
        ];
        let branches = vec![branch(
            "6",
            "main",
            &["pelham_bay", "buhre_ave", "middletown_rd", "westchester_sq"],
        )];
        let records = vec![
            access("pelham_bay", "6", AccessMode::Full),
            access("westchester_sq", "6", AccessMode::Full),
        ];
        let g = build_accessible_network(&stations, &branches, &records).unwrap();
        assert!(g
            .edge_lines(&"pelham_bay".into(), &"westchester_sq".into())
            .is_some());
    }

    #[test]
    fn one_way_access_excluded_from_collapse() {
        let stations = vec![
            station("a", &["l"]),
            station("b", &["l"]),
            station("c", &["l"]),
        ];
        let branches = vec![branch("l", "1", &["a", "b", "c"])];
        let records = vec![
            access("a", "l", AccessMode::Full),
            access("b", "l", AccessMode::OneWay),
            access("c", "l", AccessMode::Full),
        ];
        let g = build_accessible_network(&stations, &branches, &records).unwrap();
        // b is skipped on this line and, with no other fully accessible
        // line, drops out of the node set entirely
        assert_eq!(g.node_count(), 2);
        assert!(g.edge_lines(&"a".into(), &"c".into()).is_some());
    }

    #[test]
    fn one_way_station_kept_as_node_via_other_line() {
        let stations = vec![
            station("a", &["l"]),
            station("b", &["l", "m"]),
            station("c", &["l"]),
            station("d", &["m"]),
        ];
        let branches = vec![branch("l", "1", &["a", "b", "c"]), branch("m", "1", &["b", "d"])];
        let records = vec![
            access("a", "l", AccessMode::Full),
            access("b", "l", AccessMode::OneWay),
            access("b", "m", AccessMode::Full),
            access("c", "l", AccessMode::Full),
            access("d", "m", AccessMode::Full),
        ];
        let g = build_accessible_network(&stations, &branches, &records).unwrap();
        // b stays (full on m) but the l-line collapse still bridges a-c
        assert_eq!(g.node_count(), 4);
        assert!(g.edge_lines(&"a".into(), &"c".into()).is_some());
        assert!(g.edge_lines(&"b".into(), &"d".into()).is_some());
        assert!(g.edge_lines(&"a".into(), &"b".into()).is_none());
    }

    #[test]
    fn fully_accessible_branch_is_identity() {
        let stations = vec![
            station("a", &["dlr"]),
            station("b", &["dlr"]),
            station("c", &["dlr"]),
        ];
        let branches = vec![branch("dlr", "1", &["a", "b", "c"])];
        let records = vec![
            access("a", "dlr", AccessMode::Full),
            access("b", "dlr", AccessMode::Full),
            access("c", "dlr", AccessMode::Full),
        ];
        let full = build_full_network(&stations, &branches);
        let acc = build_accessible_network(&stations, &branches, &records).unwrap();
        assert_eq!(full.node_count(), acc.node_count());
        assert_eq!(full.edge_count(), acc.edge_count());
    }

    #[test]
    fn no_accessible_stations_is_an_error() {
        let stations = vec![station("a", &["l"]), station("b", &["l"])];
        let branches = vec![branch("l", "1", &["a", "b"])];
        assert!(matches!(
            build_accessible_network(&stations, &branches, &[]),
            Err(ConstructError::EmptyAccessibleSet)
        ));
    }

    #[test]
    fn terminal_inaccessible_stations_vanish() {
        let stations = vec![
            station("a", &["l"]),
            station("b", &["l"]),
            station("c", &["l"]),
        ];
        let branches = vec![branch("l", "1", &["a", "b", "c"])];
        let records = vec![
            access("a", "l", AccessMode::None),
            access("b", "l", AccessMode::Full),
            access("c", "l", AccessMode::Full),
        ];
        let g = build_accessible_network(&stations, &branches, &records).unwrap();
        assert_eq!(g.node_count(), 2);
        assert!(!g.contains(&"a".into()));
    }
}
