//! Shared test support: graph constructors, independent oracles, and
//! synthetic transit-system generation.
//!
//! The oracles deliberately avoid the library's algorithm paths: all-pairs
//! distances come from a cubic Floyd-Warshall pass and betweenness from
//! explicit enumeration of every shortest path.
#![allow(dead_code)] // each integration target uses its own slice of this module

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use transit_access::graph::{GraphBuilder, StationId, TransitGraph};
use transit_access::ingest::{AccessMode, AccessibilityRecord, LineBranch, Station};

pub fn sid(i: usize) -> StationId {
    StationId::new(format!("s{i:03}"))
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> TransitGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(sid(i));
    }
    for &(u, v) in edges {
        b.add_edge(&sid(u), &sid(v), "l").unwrap();
    }
    b.build()
}

const UNREACHED: i64 = i64::MAX / 4;

/// All-pairs shortest paths by the cubic dynamic program.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut d = vec![vec![UNREACHED; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn is_unreachable(d: i64) -> bool {
    d >= UNREACHED
}

/// Every shortest path from s to t, enumerated by backtracking over the
/// BFS distance layers.
fn enumerate_shortest_paths(
    adj: &[Vec<usize>],
    dist_from_s: &[i64],
    s: usize,
    t: usize,
) -> Vec<Vec<usize>> {
    if is_unreachable(dist_from_s[t]) {
        return Vec::new();
    }
    let mut paths = Vec::new();
    let mut current = vec![t];
    backtrack(adj, dist_from_s, s, t, &mut current, &mut paths);
    paths
}

fn backtrack(
    adj: &[Vec<usize>],
    dist: &[i64],
    s: usize,
    v: usize,
    current: &mut Vec<usize>,
    paths: &mut Vec<Vec<usize>>,
) {
    if v == s {
        let mut p = current.clone();
        p.reverse();
        paths.push(p);
        return;
    }
    for &u in &adj[v] {
        if dist[u] + 1 == dist[v] {
            current.push(u);
            backtrack(adj, dist, s, u, current, paths);
            current.pop();
        }
    }
}

/// Betweenness by brute-force path enumeration: for every unordered pair,
/// each interior node gets its share of that pair's shortest paths;
/// normalized by 2/((N-1)(N-2)).
pub fn betweenness_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let d = floyd_warshall(n, edges);
    let mut scores = vec![0.0f64; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = enumerate_shortest_paths(&adj, &d[s], s, t);
            if paths.is_empty() {
                continue;
            }
            let share = 1.0 / paths.len() as f64;
            for path in &paths {
                for &i in &path[1..path.len() - 1] {
                    scores[i] += share;
                }
            }
        }
    }
    let scale = 2.0 / ((n - 1) as f64 * (n - 2) as f64);
    for s in &mut scores {
        *s *= scale;
    }
    scores
}

/// Closeness under the (N-1) convention with component correction, from
/// the all-pairs oracle.
pub fn closeness_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let d = floyd_warshall(n, edges);
    (0..n)
        .map(|i| {
            let mut reachable = 0usize;
            let mut sum = 0i64;
            for j in 0..n {
                if !is_unreachable(d[i][j]) {
                    reachable += 1;
                    sum += d[i][j];
                }
            }
            if reachable <= 1 || sum == 0 {
                0.0
            } else {
                let ni = (reachable - 1) as f64;
                (ni / sum as f64) * (ni / (n - 1) as f64)
            }
        })
        .collect()
}

/// Random graph families for oracle-equivalence sweeps.
pub enum GraphFamily {
    Tree,
    Cycle,
    Star,
    Disconnected,
    ErdosRenyi,
}

pub fn random_graph(family: &GraphFamily, rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    match family {
        GraphFamily::Tree => {
            let n = rng.gen_range(3..=25);
            let edges = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
            (n, edges)
        }
        GraphFamily::Cycle => {
            let n = rng.gen_range(3..=25);
            let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
            (n, edges)
        }
        GraphFamily::Star => {
            let n = rng.gen_range(3..=25);
            let edges = (1..n).map(|v| (0, v)).collect();
            (n, edges)
        }
        GraphFamily::Disconnected => {
            // two ER halves with no cross edges
            let n = rng.gen_range(6..=25);
            let split = rng.gen_range(3..n - 2);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let same_side = (u < split) == (v < split);
                    if same_side && rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            (n, edges)
        }
        GraphFamily::ErdosRenyi => {
            let n = rng.gen_range(5..=25);
            let p = rng.gen_range(0.08..0.35);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            (n, edges)
        }
    }
}

/// A synthetic transit system: stations, branch sequences, and per-line
/// accessibility records, mutually consistent the way validated real input
/// is (station lines match branch membership, access records cover exactly
/// the traversed (station, line) pairs).
pub struct SyntheticSystem {
    pub stations: Vec<Station>,
    pub branches: Vec<LineBranch>,
    pub access: Vec<AccessibilityRecord>,
}

pub fn random_transit_system(rng: &mut ChaCha8Rng) -> SyntheticSystem {
    let pool = rng.gen_range(15..60);
    let lines = rng.gen_range(2..6);
    let mut branches = Vec::new();
    let mut lines_of: Vec<BTreeSet<String>> = vec![BTreeSet::new(); pool];
    for li in 0..lines {
        let line_id = format!("L{li}");
        let fully_accessible_line = rng.gen_bool(0.25);
        let branch_count = rng.gen_range(1..=2);
        for bi in 0..branch_count {
            let len = rng.gen_range(4..=12.min(pool));
            let mut order: Vec<usize> = (0..pool).collect();
            order.shuffle(rng);
            let seq: Vec<usize> = order.into_iter().take(len).collect();
            for &s in &seq {
                lines_of[s].insert(line_id.clone());
            }
            branches.push((line_id.clone(), format!("b{bi}"), seq, fully_accessible_line));
        }
    }
    let mut access = Vec::new();
    let mut seen = BTreeSet::new();
    for (line_id, _, seq, fully) in &branches {
        for &s in seq {
            if seen.insert((s, line_id.clone())) {
                let mode = if *fully {
                    AccessMode::Full
                } else {
                    match rng.gen_range(0..10) {
                        0..=3 => AccessMode::Full,
                        4..=5 => AccessMode::OneWay,
                        _ => AccessMode::None,
                    }
                };
                access.push(AccessibilityRecord {
                    station: sid(s),
                    line_id: line_id.clone(),
                    mode,
                });
            }
        }
    }
    let stations: Vec<Station> = (0..pool)
        .filter(|&s| !lines_of[s].is_empty())
        .map(|s| Station {
            id: sid(s),
            name: format!("Station {s}"),
            borough: format!("B{}", s % 5),
            region: None,
            lines: lines_of[s].clone(),
        })
        .collect();
    let branches = branches
        .into_iter()
        .map(|(line_id, branch_id, seq, _)| LineBranch {
            line_id,
            branch_id,
            stations: seq.into_iter().map(sid).collect(),
        })
        .collect();
    SyntheticSystem {
        stations,
        branches,
        access,
    }
}
