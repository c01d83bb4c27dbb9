//! Command-line driver for the transit accessibility pipeline.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use transit_access::construct::{build_accessible_network, build_full_network, NetworkKind};
use transit_access::graph::{StationId, TransitGraph};
use transit_access::ingest::{
    parse_accessibility, parse_borough_table, parse_line_branches, parse_stations, AccessMode,
    AccessibilityRecord, BoroughRecord, LineBranch, Station,
};
use transit_access::metrics::{
    betweenness_all, closeness_all, degree_distribution, fit_power_law, CentralityTable,
    ClosenessConvention,
};
use transit_access::report::{
    self, CorrelationOutput, NetworkStats, ReportError,
};
use transit_access::socio::{borough_summaries, correlate, SocioError};

const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Debug)]
enum CliError {
    /// Bad input data or arguments; exit code 2.
    Input(String),
    /// Broken internal invariant; exit code 3.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<transit_access::IngestError> for CliError {
    fn from(e: transit_access::IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<transit_access::ConstructError> for CliError {
    fn from(e: transit_access::ConstructError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<transit_access::GraphError> for CliError {
    fn from(e: transit_access::GraphError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<transit_access::MetricsError> for CliError {
    fn from(e: transit_access::MetricsError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NetworkArg {
    Full,
    Accessible,
    Both,
}

impl NetworkArg {
    fn kinds(self) -> Vec<NetworkKind> {
        match self {
            NetworkArg::Full => vec![NetworkKind::Full],
            NetworkArg::Accessible => vec![NetworkKind::Accessible],
            NetworkArg::Both => vec![NetworkKind::Full, NetworkKind::Accessible],
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    #[value(name = "n-1")]
    NMinusOne,
    #[value(name = "n")]
    N,
}

impl From<ConventionArg> for ClosenessConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::NMinusOne => ClosenessConvention::NMinusOne,
            ConventionArg::N => ClosenessConvention::N,
        }
    }
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Station table (id,name,borough,region,lines)
    #[arg(long)]
    stations: PathBuf,
    /// Line branch sequences (line_id,branch_id,seq,station_id)
    #[arg(long)]
    branches: PathBuf,
    /// Per-line accessibility records (station_id,line_id,mode)
    #[arg(long)]
    access: PathBuf,
    /// Borough socioeconomic table; required by figures/socio/all
    #[arg(long)]
    boroughs: Option<PathBuf>,
    /// Which networks to build
    #[arg(long, value_enum, default_value = "both")]
    network: NetworkArg,
    /// Closeness normalization convention
    #[arg(long = "closeness-convention", value_enum, default_value = "n-1")]
    closeness_convention: ConventionArg,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Parser)]
#[command(name = "transit-access", version, about = "Transit accessibility network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build networks and write edge lists plus stats
    Build(InputArgs),
    /// Compute centrality score tables and top-10 lists
    Centrality(InputArgs),
    /// Emit figure datasets (curves, scatters, distributions, subgraphs)
    Figures(InputArgs),
    /// Borough summaries and correlation statistics
    Socio(InputArgs),
    /// Run the whole pipeline
    All(InputArgs),
}

struct Dataset {
    stations: Vec<Station>,
    branches: Vec<LineBranch>,
    access: Vec<AccessibilityRecord>,
    boroughs: Option<Vec<BoroughRecord>>,
}

impl Dataset {
    fn load(args: &InputArgs) -> Result<Self, CliError> {
        let stations = parse_stations(&args.stations)?;
        let branches = parse_line_branches(&args.branches, &stations)?;
        let access = parse_accessibility(&args.access, &stations)?;
        let boroughs = match &args.boroughs {
            Some(p) => Some(parse_borough_table(p)?),
            None => None,
        };
        Ok(Dataset {
            stations,
            branches,
            access,
            boroughs,
        })
    }

    fn boroughs(&self) -> Result<&[BoroughRecord], CliError> {
        self.boroughs
            .as_deref()
            .ok_or_else(|| CliError::Input("--boroughs is required for this command".to_owned()))
    }

    fn accessible_station_ids(&self) -> BTreeSet<StationId> {
        self.access
            .iter()
            .filter(|r| r.mode == AccessMode::Full)
            .map(|r| r.station.clone())
            .collect()
    }

    fn network(&self, kind: NetworkKind) -> Result<TransitGraph, CliError> {
        match kind {
            NetworkKind::Full => Ok(build_full_network(&self.stations, &self.branches)),
            NetworkKind::Accessible => {
                Ok(build_accessible_network(&self.stations, &self.branches, &self.access)?)
            }
        }
    }
}

fn out_path(args: &InputArgs, name: &str) -> PathBuf {
    args.out.join(name)
}

fn prepare_out(args: &InputArgs) -> Result<(), CliError> {
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))
}

fn write_run_manifest(args: &InputArgs, command: &str, notes: Vec<String>) -> Result<(), CliError> {
    let mut inputs: Vec<&Path> = vec![&args.stations, &args.branches, &args.access];
    if let Some(b) = &args.boroughs {
        inputs.push(b);
    }
    let m = report::manifest(
        command,
        &inputs,
        &args.network.kinds(),
        args.closeness_convention.into(),
        notes,
    )?;
    report::write_manifest(&out_path(args, "manifest.json"), &m)?;
    Ok(())
}

fn stats_for(g: &TransitGraph) -> Result<NetworkStats, CliError> {
    Ok(report::network_stats(g)?)
}

fn connectivity_warning(kind: NetworkKind, stats: &NetworkStats) -> Option<String> {
    if stats.connected {
        return None;
    }
    Some(format!(
        "{} network is disconnected: component sizes {:?}; diameter computed on the largest",
        kind.as_str(),
        stats.component_sizes
    ))
}

fn run_build(args: &InputArgs, data: &Dataset) -> Result<Vec<String>, CliError> {
    let mut notes = Vec::new();
    for kind in args.network.kinds() {
        let g = data.network(kind)?;
        let stats = stats_for(&g)?;
        if let Some(w) = connectivity_warning(kind, &stats) {
            eprintln!("warning: {w}");
            notes.push(w);
        }
        report::write_edge_list(&out_path(args, &format!("{}_edges.csv", kind.as_str())), &g)?;
        report::write_stats(&out_path(args, &format!("{}_stats.json", kind.as_str())), &stats)?;
        println!(
            "{}: nodes={} edges={} diameter={} connected={}",
            kind.as_str(),
            stats.nodes,
            stats.edges,
            stats.diameter,
            stats.connected
        );
    }
    Ok(notes)
}

fn centrality_tables(
    g: &TransitGraph,
    kind: NetworkKind,
    convention: ClosenessConvention,
) -> Result<Vec<CentralityTable>, CliError> {
    Ok(vec![
        betweenness_all(g, kind)?,
        closeness_all(g, kind, convention)?,
    ])
}

fn run_centrality(args: &InputArgs, data: &Dataset) -> Result<(), CliError> {
    let accessible = data.accessible_station_ids();
    for kind in args.network.kinds() {
        let g = data.network(kind)?;
        for table in centrality_tables(&g, kind, args.closeness_convention.into())? {
            let base = format!("{}_{}", kind.as_str(), table.measure.as_str());
            report::write_node_scores(&out_path(args, &format!("{base}_scores.csv")), &g, &table)?;
            // accessibility flags only make sense on the full network
            let flag_set = match kind {
                NetworkKind::Full => Some(&accessible),
                NetworkKind::Accessible => None,
            };
            report::write_top10(
                &out_path(args, &format!("{base}_top10.csv")),
                &g,
                &table,
                flag_set,
                10,
            )?;
        }
    }
    Ok(())
}

fn run_figures(args: &InputArgs, data: &Dataset) -> Result<(), CliError> {
    for kind in args.network.kinds() {
        let g = data.network(kind)?;
        for table in centrality_tables(&g, kind, args.closeness_convention.into())? {
            let base = format!("{}_{}", kind.as_str(), table.measure.as_str());
            report::write_sorted_curve(&out_path(args, &format!("{base}_sorted.csv")), &table)?;
            report::write_degree_scatter(
                &out_path(args, &format!("{}_degree_vs_{}.csv", kind.as_str(), table.measure.as_str())),
                &g,
                &table,
            )?;
            report::write_subgraph(
                &out_path(args, &format!("{base}_top10_subgraph_nodes.csv")),
                &out_path(args, &format!("{base}_top10_subgraph_edges.csv")),
                &g,
                &table,
                10,
            )?;
        }
        let dist = degree_distribution(&g)?;
        report::write_degree_distribution(
            &out_path(args, &format!("{}_degree_distribution.csv", kind.as_str())),
            &dist,
        )?;
        match fit_power_law(&dist) {
            Ok(fit) => report::write_power_law_fit(
                &out_path(args, &format!("{}_power_law_fit.json", kind.as_str())),
                &fit,
            )?,
            Err(e) => eprintln!("warning: {} network: {e}", kind.as_str()),
        }
    }
    // borough bar data follows the accessible-network top-10 lists
    if data.boroughs.is_some() {
        let (summaries, _) = socio_summaries(args, data)?;
        report::write_borough_summaries(&out_path(args, "borough_bars.csv"), &summaries)?;
    }
    Ok(())
}

fn socio_summaries(
    args: &InputArgs,
    data: &Dataset,
) -> Result<(Vec<transit_access::BoroughSummary>, Vec<String>), CliError> {
    let boroughs = data.boroughs()?;
    let g = data.network(NetworkKind::Accessible)?;
    let tables = centrality_tables(&g, NetworkKind::Accessible, args.closeness_convention.into())?;
    Ok(borough_summaries(&data.stations, &data.access, boroughs, &tables))
}

const CORRELATION_PAIRS: &[(&str, &str)] = &[
    ("accessible_count", "median_income_k"),
    ("accessible_count", "daytime_total"),
    ("accessible_count", "daytime_workers"),
    ("accessible_count", "weekday_ridership"),
    ("accessible_count", "weekend_ridership"),
];

fn run_socio(args: &InputArgs, data: &Dataset) -> Result<Vec<String>, CliError> {
    let (summaries, unmatched) = socio_summaries(args, data)?;
    let mut notes = Vec::new();
    if !unmatched.is_empty() {
        let w = format!("station boroughs missing from borough table: {}", unmatched.join(", "));
        eprintln!("warning: {w}");
        notes.push(w);
    }
    report::write_borough_summaries(&out_path(args, "borough_summary.csv"), &summaries)?;
    let mut output = CorrelationOutput {
        reports: Vec::new(),
        skipped: Vec::new(),
    };
    for (x, y) in CORRELATION_PAIRS {
        match correlate(&summaries, x, y) {
            Ok(r) => output.reports.push(r),
            Err(e @ (SocioError::InsufficientData(_) | SocioError::ZeroVariance(_))) => {
                output
                    .skipped
                    .push(((*x).to_owned(), (*y).to_owned(), e.to_string()));
            }
            Err(e @ SocioError::UnknownField(_)) => {
                return Err(CliError::Internal(e.to_string()));
            }
        }
    }
    report::write_correlations(&out_path(args, "correlations.json"), &output)?;
    Ok(notes)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build(args) => {
            let data = Dataset::load(&args)?;
            prepare_out(&args)?;
            let notes = run_build(&args, &data)?;
            write_run_manifest(&args, "build", notes)
        }
        Command::Centrality(args) => {
            let data = Dataset::load(&args)?;
            prepare_out(&args)?;
            run_centrality(&args, &data)?;
            write_run_manifest(&args, "centrality", Vec::new())
        }
        Command::Figures(args) => {
            let data = Dataset::load(&args)?;
            prepare_out(&args)?;
            run_figures(&args, &data)?;
            write_run_manifest(&args, "figures", Vec::new())
        }
        Command::Socio(args) => {
            let data = Dataset::load(&args)?;
            data.boroughs()?;
            prepare_out(&args)?;
            let notes = run_socio(&args, &data)?;
            write_run_manifest(&args, "socio", notes)
        }
        Command::All(args) => {
            let data = Dataset::load(&args)?;
            data.boroughs()?;
            prepare_out(&args)?;
            let mut notes = run_build(&args, &data)?;
            run_centrality(&args, &data)?;
            run_figures(&args, &data)?;
            notes.extend(run_socio(&args, &data)?);
            write_run_manifest(&args, "all", notes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
