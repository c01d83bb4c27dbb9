//! Undirected simple graph over transit stations.
//!
//! Nodes carry stable string identities, edges carry the set of line ids
//! that produce the adjacency. Multi-edges are collapsed at insertion and
//! the node order is canonicalized (sorted by id) when the builder is
//! finalized, so downstream metrics never depend on input row order.

use std::collections::VecDeque;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Station;

/// Opaque, unique station identity.
///
/// Stations sharing a display name but differing physically carry distinct
/// ids (e.g. `canal_st_6` vs `canal_st_nqrw`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StationId(String);

impl StationId {
    pub fn new(value: impl Into<String>) -> Self {
        StationId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StationId {
    fn from(s: &str) -> Self {
        StationId(s.to_owned())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on station {0}")]
    SelfLoop(StationId),
    #[error("unknown station {0}")]
    UnknownNode(StationId),
    #[error("graph is empty")]
    EmptyGraph,
}

/// Incremental builder; `build` canonicalizes node order.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: BTreeSet<StationId>,
    attrs: BTreeMap<StationId, Station>,
    edges: BTreeMap<(StationId, StationId), BTreeSet<String>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a bare node without attributes.
    pub fn add_node(&mut self, id: StationId) {
        self.nodes.insert(id);
    }

    /// Register a node together with its station record.
    pub fn add_station(&mut self, station: Station) {
        self.nodes.insert(station.id.clone());
        self.attrs.insert(station.id.clone(), station);
    }

    pub fn contains(&self, id: &StationId) -> bool {
        self.nodes.contains(id)
    }

    /// Insert the undirected edge {u,v}, appending `line` to its label set.
    /// Repeated insertions collapse onto the single existing edge.
    pub fn add_edge(
        &mut self,
        u: &StationId,
        v: &StationId,
        line: &str,
    ) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u.clone()));
        }
        if !self.nodes.contains(u) {
            return Err(GraphError::UnknownNode(u.clone()));
        }
        if !self.nodes.contains(v) {
            return Err(GraphError::UnknownNode(v.clone()));
        }
        let key = if u < v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        };
        self.edges.entry(key).or_default().insert(line.to_owned());
        Ok(())
    }

    pub fn build(self) -> TransitGraph {
        let ids: Vec<StationId> = self.nodes.into_iter().collect();
        let index: BTreeMap<StationId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        let mut edges: Vec<(usize, usize, BTreeSet<String>)> = Vec::with_capacity(self.edges.len());
        for ((u, v), lines) in self.edges {
            let (ui, vi) = (index[&u], index[&v]);
            adj[ui].push(vi);
            adj[vi].push(ui);
            let (a, b) = if ui < vi { (ui, vi) } else { (vi, ui) };
            edges.push((a, b, lines));
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        TransitGraph {
            ids,
            index,
            adj,
            edges,
            attrs: self.attrs,
        }
    }
}

/// Immutable undirected simple graph; shared read-only across workers.
#[derive(Debug, Clone)]
pub struct TransitGraph {
    ids: Vec<StationId>,
    index: BTreeMap<StationId, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, BTreeSet<String>)>,
    attrs: BTreeMap<StationId, Station>,
}

/// Diameter of the largest connected component, plus connectivity info.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiameterReport {
    pub diameter: u32,
    pub connected: bool,
    pub component_count: usize,
    /// Node counts per component, descending.
    pub component_sizes: Vec<usize>,
}

impl TransitGraph {
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in canonical (sorted) order.
    pub fn node_ids(&self) -> &[StationId] {
        &self.ids
    }

    pub fn contains(&self, id: &StationId) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &StationId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, idx: usize) -> &StationId {
        &self.ids[idx]
    }

    pub fn station(&self, id: &StationId) -> Option<&Station> {
        self.attrs.get(id)
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    pub fn neighbors(&self, idx: usize) -> &[usize] {
        &self.adj[idx]
    }

    /// Edges as (u, v, lines) with u < v, sorted.
    pub fn edges(&self) -> &[(usize, usize, BTreeSet<String>)] {
        &self.edges
    }

    pub fn edge_lines(&self, u: &StationId, v: &StationId) -> Option<&BTreeSet<String>> {
        let (ui, vi) = (self.index_of(u)?, self.index_of(v)?);
        let key = if ui < vi { (ui, vi) } else { (vi, ui) };
        self.edges
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .ok()
            .map(|i| &self.edges[i].2)
    }

    /// Hop distances from `source` by index; `None` marks unreachable nodes.
    pub fn bfs_from(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.ids.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Hop distances from `source`, keyed by station id.
    pub fn bfs_distances(
        &self,
        source: &StationId,
    ) -> Result<BTreeMap<StationId, Option<u32>>, GraphError> {
        let s = self
            .index_of(source)
            .ok_or_else(|| GraphError::UnknownNode(source.clone()))?;
        let dist = self.bfs_from(s);
        Ok(self
            .ids
            .iter()
            .cloned()
            .zip(dist)
            .collect())
    }

    /// Connected components as index lists, largest first.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::new();
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
        comps
    }

    /// Maximum shortest-path length within the largest connected component.
    pub fn diameter(&self) -> Result<DiameterReport, GraphError> {
        if self.ids.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let comps = self.components();
        let largest = &comps[0];
        let mut diam = 0u32;
        for &s in largest {
            let dist = self.bfs_from(s);
            for &v in largest {
                if let Some(d) = dist[v] {
                    diam = diam.max(d);
                }
            }
        }
        Ok(DiameterReport {
            diameter: diam,
            connected: comps.len() == 1,
            component_count: comps.len(),
            component_sizes: comps.iter().map(|c| c.len()).collect(),
        })
    }
}
