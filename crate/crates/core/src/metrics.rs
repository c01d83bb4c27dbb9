//! Exact centrality, degree-distribution, and power-law computations.
//!
//! Betweenness uses Brandes' single-source dependency accumulation over all
//! shortest paths, normalized by 2/((N-1)(N-2)) with endpoints excluded.
//! Closeness defaults to the (N-1) convention with the component-size
//! correction (n_i-1)/(N-1); the literal N/sum(d) form is available as an
//! option. Per-source passes may run in parallel; partial scores are merged
//! in fixed source order so the thread count never changes the output.

use std::collections::{BTreeMap, VecDeque};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::construct::NetworkKind;
use crate::graph::{StationId, TransitGraph};

/// Env var capping metric parallelism; 0 or unset means automatic.
pub const THREADS_ENV: &str = "TRANSIT_ACCESS_THREADS";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph has {0} nodes; betweenness normalization needs at least 3")]
    TooSmall(usize),
    #[error("degree distribution has {0} distinct degrees; power-law fit needs at least 3")]
    InsufficientSupport(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Measure {
    Betweenness,
    Closeness,
    Degree,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Degree => "degree",
        }
    }
}

/// Per-node scores for one measure over one graph.
#[derive(Debug, Clone)]
pub struct CentralityTable {
    pub measure: Measure,
    pub graph_kind: NetworkKind,
    pub scores: BTreeMap<StationId, f64>,
}

impl CentralityTable {
    /// Top `k` nodes, descending score, ties broken by ascending id.
    pub fn top_k(&self, k: usize) -> Vec<(StationId, f64)> {
        let mut entries: Vec<(StationId, f64)> = self
            .scores
            .iter()
            .map(|(id, &s)| (id.clone(), s))
            .collect();
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        entries.truncate(k);
        entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDistribution {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    /// Exponent of p(k) ~ k^-gamma (negated log-log slope).
    pub gamma: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub k_support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosenessConvention {
    /// (n_i-1)/sum(d) with component correction (n_i-1)/(N-1); the default.
    NMinusOne,
    /// Literal N/sum(d) over the reachable set.
    N,
}

impl ClosenessConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ClosenessConvention::NMinusOne => "n-1",
            ClosenessConvention::N => "n",
        }
    }
}

fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
    })
}

/// One Brandes pass: dependency contributions of source `s` to every node.
fn brandes_source(g: &TransitGraph, s: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in g.neighbors(v) {
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    let mut contrib = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            contrib[w] = delta[w];
        }
    }
    contrib
}

/// Betweenness for every node: sum over pairs of the fraction of all
/// shortest paths passing through it, scaled by 2/((N-1)(N-2)).
pub fn betweenness_all(
    g: &TransitGraph,
    kind: NetworkKind,
) -> Result<CentralityTable, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    if n < 3 {
        return Err(MetricsError::TooSmall(n));
    }
    let partials: Vec<Vec<f64>> =
        thread_pool().install(|| (0..n).into_par_iter().map(|s| brandes_source(g, s)).collect());
    // fixed-order reduction keeps the output identical across thread counts
    let mut raw = vec![0.0f64; n];
    for part in &partials {
        for (acc, &x) in raw.iter_mut().zip(part) {
            *acc += x;
        }
    }
    // each unordered pair was counted from both endpoints; the pair-count
    // normalization 2/((N-1)(N-2)) then cancels to 1/((N-1)(N-2))
    let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    let scores = g
        .node_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), raw[i] * scale))
        .collect();
    Ok(CentralityTable {
        measure: Measure::Betweenness,
        graph_kind: kind,
        scores,
    })
}

fn closeness_source(g: &TransitGraph, i: usize, convention: ClosenessConvention) -> f64 {
    let n = g.node_count();
    let dist = g.bfs_from(i);
    let mut reachable = 0usize; // including i itself
    let mut sum = 0u64;
    for d in dist.into_iter().flatten() {
        reachable += 1;
        sum += u64::from(d);
    }
    if reachable <= 1 || sum == 0 {
        return 0.0; // isolated
    }
    match convention {
        ClosenessConvention::NMinusOne => {
            let ni = (reachable - 1) as f64;
            (ni / sum as f64) * (ni / (n - 1) as f64)
        }
        ClosenessConvention::N => n as f64 / sum as f64,
    }
}

pub fn closeness_all(
    g: &TransitGraph,
    kind: NetworkKind,
    convention: ClosenessConvention,
) -> Result<CentralityTable, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let values: Vec<f64> = thread_pool().install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| closeness_source(g, i, convention))
            .collect()
    });
    let scores = g
        .node_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), values[i]))
        .collect();
    Ok(CentralityTable {
        measure: Measure::Closeness,
        graph_kind: kind,
        scores,
    })
}

/// Degree scores (raw integer degrees as floats) for ranking and scatters.
pub fn degree_all(g: &TransitGraph, kind: NetworkKind) -> Result<CentralityTable, MetricsError> {
    if g.is_empty() {
        return Err(MetricsError::EmptyGraph);
    }
    let scores = g
        .node_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), g.degree(i) as f64))
        .collect();
    Ok(CentralityTable {
        measure: Measure::Degree,
        graph_kind: kind,
        scores,
    })
}

pub fn degree_distribution(g: &TransitGraph) -> Result<DegreeDistribution, MetricsError> {
    if g.is_empty() {
        return Err(MetricsError::EmptyGraph);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..g.node_count() {
        *counts.entry(g.degree(i)).or_insert(0) += 1;
    }
    Ok(DegreeDistribution {
        counts,
        total: g.node_count(),
    })
}

/// Least-squares line on (log k, log p(k)) over nonzero-frequency degrees
/// with k >= 1; gamma is the negated slope.
pub fn fit_power_law(d: &DegreeDistribution) -> Result<PowerLawFit, MetricsError> {
    let support: Vec<(usize, f64)> = d
        .counts
        .iter()
        .filter(|(k, c)| **k >= 1 && **c > 0)
        .map(|(&k, &c)| (k, c as f64 / d.total as f64))
        .collect();
    if support.len() < 3 {
        return Err(MetricsError::InsufficientSupport(support.len()));
    }
    let (gamma, intercept, r_squared) = fit_power_law_points(&support);
    Ok(PowerLawFit {
        gamma,
        intercept,
        r_squared,
        k_support: support.into_iter().map(|(k, _)| k).collect(),
    })
}

/// Log-log least squares on raw (k, p(k)) points; returns
/// (gamma, intercept, r_squared). Shared by the histogram fit above and by
/// callers with exact (non-integer-count) frequencies.
pub fn fit_power_law_points(support: &[(usize, f64)]) -> (f64, f64, f64) {
    let points: Vec<(f64, f64)> = support
        .iter()
        .map(|&(k, p)| ((k as f64).ln(), p.ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (-slope, intercept, r_squared)
}
