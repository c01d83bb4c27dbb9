//! Transit network accessibility analysis.
//!
//! Ingests station, line-sequence, accessibility, and borough tables,
//! builds the full and accessible-collapsed L-space networks, computes
//! exact centrality and degree-distribution statistics, and joins
//! borough-level socioeconomic data into plot-ready reports.

pub mod construct;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod socio;

pub use construct::{build_accessible_network, build_full_network, ConstructError, NetworkKind};
pub use graph::{DiameterReport, GraphBuilder, GraphError, StationId, TransitGraph};
pub use ingest::{
    parse_accessibility, parse_borough_table, parse_line_branches, parse_stations, AccessMode,
    AccessibilityRecord, BoroughRecord, IngestError, LineBranch, Station,
};
pub use metrics::{
    betweenness_all, closeness_all, degree_all, degree_distribution, fit_power_law,
    fit_power_law_points, CentralityTable, ClosenessConvention, DegreeDistribution, Measure,
    MetricsError, PowerLawFit,
};
pub use socio::{borough_summaries, correlate, BoroughSummary, CorrelationReport, SocioError};
