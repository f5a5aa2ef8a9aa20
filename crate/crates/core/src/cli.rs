//! Command-line front end.
//!
//! Settings are layered: built-in defaults, then the matching section of the
//! `--config` TOML file, then flags. Exit codes are 0 on success, 2 for bad
//! input or configuration and 3 when the numerics fail.

use crate::graph::io::{read_positions_file, write_edges, write_positions};
use crate::graph::{
    build_geometric_graph, graph_bandwidth, phi_max, sample_rgg, vertex_relabel, RggConfig,
};
use crate::sim::{
    first_trial_ellipses, mse_curves, run_fig2, run_localization, run_scan, write_ellipses_csv,
    write_fig2_csv, write_mse_csv, write_mse_total_csv, write_scan_csv, AgentSource, Algorithm,
    Fig2Config, ScanConfig, ScenarioConfig, SimError, DEFAULT_ELLIPSE_LEVEL,
};
use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Trial count used by `localize --full`.
pub const FULL_TRIALS: usize = 5000;

#[derive(Debug, Parser)]
#[command(name = "lbekf", version, about = "Banded EKF localization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with one section per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Existing directory that receives the output files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Banded-inverse approximation error versus L.
    Fig2(Fig2Args),
    /// Monte Carlo localization with EKF and the banded variants.
    Localize(LocalizeArgs),
    /// Strip scan statistic of planar Poisson processes.
    Scan(ScanArgs),
    /// Relabel a position file and report bandwidths.
    Relabel(RelabelArgs),
    /// Sample a random geometric graph.
    Rgg(RggArgs),
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub bandwidths: Option<Vec<usize>>,
    /// Largest L; the sweep covers 0..=l-max.
    #[arg(long)]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub timesteps: Option<usize>,
    /// Run the long study.
    #[arg(long, conflicts_with = "trials")]
    pub full: bool,
    /// Drop the relabeled banded filter.
    #[arg(long)]
    pub no_vr: bool,
    /// Algorithms to run (ekf, lb-ekf-vr, lb-ekf); repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub algo: Option<Vec<Algorithm>>,
    #[arg(long)]
    pub band: Option<usize>,
    #[arg(long)]
    pub agents: Option<usize>,
    /// Agent positions CSV (`id,x,y`) instead of random placement.
    #[arg(long, conflicts_with = "agents")]
    pub positions: Option<PathBuf>,
    #[arg(long)]
    pub beacons: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ELLIPSE_LEVEL)]
    pub ellipse_level: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sides: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RelabelArgs {
    /// Position CSV with header `id,x[,y[,z]]`.
    #[arg(long)]
    pub positions: Option<PathBuf>,
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RggArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelabelSection {
    pub positions: Option<PathBuf>,
    pub radius: f64,
}

impl Default for RelabelSection {
    fn default() -> Self {
        Self { positions: None, radius: 15.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RggSection {
    pub side: f64,
    pub dim: usize,
    pub rate: f64,
    pub radius: f64,
    pub seed: u64,
}

impl Default for RggSection {
    fn default() -> Self {
        Self {
            side: 40.0,
            dim: 2,
            rate: 0.05,
            radius: 15.0,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    /// Seed applied to every section unless the section sets its own.
    pub seed: Option<u64>,
    pub fig2: Option<toml::Table>,
    pub localize: Option<toml::Table>,
    pub scan: Option<toml::Table>,
    pub relabel: Option<toml::Table>,
    pub rgg: Option<toml::Table>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn section<T: serde::de::DeserializeOwned + Default>(
        &self,
        name: &str,
        table: &Option<toml::Table>,
    ) -> Result<T, CliError> {
        let mut table = table.clone().unwrap_or_default();
        if let Some(seed) = self.seed {
            table
                .entry("seed")
                .or_insert(toml::Value::Integer(seed as i64));
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| CliError::Config(format!("[{name}]: {e}")))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| io_err(&path, e))
}

#[derive(Serialize)]
struct RunMeta<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a C,
    notes: Vec<String>,
    wall_time_s: f64,
}

fn write_meta<C: Serialize>(
    out: &Path,
    command: &str,
    seed: u64,
    config: &C,
    notes: Vec<String>,
    started: Instant,
) -> Result<(), CliError> {
    let meta = RunMeta {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config,
        notes,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let w = create(out, "run_meta.json")?;
    serde_json::to_writer_pretty(w, &meta).map_err(|e| io_err(&out.join("run_meta.json"), e))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs an already parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if !cli.out.is_dir() {
        return Err(CliError::Config(format!(
            "output directory {} does not exist",
            cli.out.display()
        )));
    }
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs {
            if j == 0 {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError::Config(e.to_string()))?
    };
    pool.install(|| match &cli.command {
        Command::Fig2(a) => cmd_fig2(cli, &file, a),
        Command::Localize(a) => cmd_localize(cli, &file, a),
        Command::Scan(a) => cmd_scan(cli, &file, a),
        Command::Relabel(a) => cmd_relabel(cli, &file, a),
        Command::Rgg(a) => cmd_rgg(cli, &file, a),
    })
}

pub fn cmd_fig2(cli: &Cli, file: &FileConfig, args: &Fig2Args) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg: Fig2Config = file.section("fig2", &file.fig2)?;
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(b) = &args.bandwidths {
        cfg.bandwidths = b.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match args.l_max {
        Some(l) => cfg.l_values = (0..=l).collect(),
        None if args.n.is_some() => cfg.l_values.retain(|&l| l < cfg.n),
        None => {}
    }
    let rows = run_fig2(&cfg)?;
    write_fig2_csv(create(&cli.out, "fig2.csv")?, &rows)?;
    write_meta(
        &cli.out,
        "fig2",
        cfg.seed,
        &cfg,
        vec!["matrices are divided by their diagonal value 15 before inversion".into()],
        started,
    )
}

pub fn cmd_localize(cli: &Cli, file: &FileConfig, args: &LocalizeArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg: ScenarioConfig = file.section("localize", &file.localize)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if args.full {
        cfg.trials = FULL_TRIALS;
    }
    if let Some(t) = args.timesteps {
        cfg.timesteps = t;
    }
    if let Some(a) = &args.algo {
        cfg.algorithms = a.clone();
    }
    if args.no_vr {
        cfg.algorithms.retain(|&a| a != Algorithm::LbEkfVr);
    }
    if let Some(b) = args.band {
        cfg.band = b;
    }
    if let Some(n) = args.agents {
        cfg.agents = AgentSource::Uniform { count: n };
    }
    if let Some(p) = &args.positions {
        cfg.agents = AgentSource::File { path: p.clone() };
    }
    if let Some(b) = args.beacons {
        cfg.beacons = b;
    }
    if let Some(r) = args.radius {
        cfg.radius = r;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let mut dedup = Vec::new();
    for a in cfg.algorithms.drain(..) {
        if !dedup.contains(&a) {
            dedup.push(a);
        }
    }
    cfg.algorithms = dedup;

    let run = run_localization(&cfg)?;
    write_mse_csv(create(&cli.out, "mse.csv")?, &run.records)?;

    let mut curves = Vec::new();
    let mut failed = Vec::new();
    for &alg in &cfg.algorithms {
        let diverged = run.diverged_count(alg);
        println!("{alg}: {diverged}/{} trials diverged", cfg.trials);
        match mse_curves(alg, run.records.iter()) {
            Ok(c) => curves.push(c),
            Err(e) => failed.push(e.to_string()),
        }
    }
    write_mse_total_csv(create(&cli.out, "mse_total.csv")?, &curves)?;
    if cfg.dim == 2 {
        let rows = first_trial_ellipses(&run, args.ellipse_level)?;
        write_ellipses_csv(create(&cli.out, "ellipses.csv")?, &rows)?;
    }
    let s = &run.scenario;
    let mut notes = vec![
        format!(
            "network: {} agents, {} edges, bandwidth {} relabeled to {}, phi_max {}",
            s.n_agents(),
            s.graph.n_edges(),
            s.bandwidth_original,
            s.bandwidth_relabeled,
            s.phi_max
        ),
        format!("beacons: {:?}", s.model.beacons()),
    ];
    if cfg.trials < FULL_TRIALS {
        notes.push(format!(
            "reduced study: {} trials (--full runs {FULL_TRIALS})",
            cfg.trials
        ));
    }
    write_meta(&cli.out, "localize", cfg.seed, &cfg, notes, started)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(failed.join("; ")))
    }
}

pub fn cmd_scan(cli: &Cli, file: &FileConfig, args: &ScanArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg: ScanConfig = file.section("scan", &file.scan)?;
    if let Some(l) = &args.lambda {
        cfg.lambdas = l.clone();
    }
    if let Some(s) = &args.sides {
        cfg.sides = s.clone();
    }
    if let Some(r) = args.radius {
        cfg.radius = r;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let records = run_scan(&cfg)?;
    write_scan_csv(create(&cli.out, "scan.csv")?, &records)?;
    write_meta(&cli.out, "scan", cfg.seed, &cfg, Vec::new(), started)
}

pub fn cmd_relabel(cli: &Cli, file: &FileConfig, args: &RelabelArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg: RelabelSection = {
        let mut t = file.relabel.clone().unwrap_or_default();
        t.remove("seed");
        toml::Value::Table(t)
            .try_into()
            .map_err(|e| CliError::Config(format!("[relabel]: {e}")))?
    };
    if let Some(p) = &args.positions {
        cfg.positions = Some(p.clone());
    }
    if let Some(r) = args.radius {
        cfg.radius = r;
    }
    let path = cfg
        .positions
        .clone()
        .ok_or_else(|| CliError::Config("relabel needs --positions".into()))?;
    let x = read_positions_file(&path, cfg.radius).map_err(|e| io_err(&path, e))?;
    let g = build_geometric_graph(&x);
    let p = vertex_relabel(&x);
    let relabeled = p
        .permute_graph(&g)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let out_path = cli.out.join("permutation.csv");
    let mut w = csv::Writer::from_writer(create(&cli.out, "permutation.csv")?);
    let write = |w: &mut csv::Writer<_>| -> Result<(), csv::Error> {
        w.write_record(["old_id", "new_id"])?;
        for (old, &new) in p.as_slice().iter().enumerate() {
            w.write_record([old.to_string(), new.to_string()])?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).map_err(|e| io_err(&out_path, e))?;

    println!("original bandwidth: {}", graph_bandwidth(&g));
    println!("relabeled bandwidth: {}", graph_bandwidth(&relabeled));
    println!("phi_max: {}", phi_max(&x));
    write_meta(&cli.out, "relabel", 0, &cfg, Vec::new(), started)
}

pub fn cmd_rgg(cli: &Cli, file: &FileConfig, args: &RggArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg: RggSection = file.section("rgg", &file.rgg)?;
    if let Some(l) = args.lambda {
        cfg.rate = l;
    }
    if let Some(s) = args.side {
        cfg.side = s;
    }
    if let Some(d) = args.dim {
        cfg.dim = d;
    }
    if let Some(r) = args.radius {
        cfg.radius = r;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let rgg = RggConfig {
        side_lengths: vec![cfg.side; cfg.dim],
        rate: cfg.rate,
        radius: cfg.radius,
        seed: cfg.seed,
    };
    let (g, x) = sample_rgg(&rgg).map_err(|e| CliError::Config(e.to_string()))?;
    write_positions(create(&cli.out, "positions.csv")?, &x)
        .map_err(|e| io_err(&cli.out.join("positions.csv"), e))?;
    write_edges(create(&cli.out, "edges.csv")?, &g)
        .map_err(|e| io_err(&cli.out.join("edges.csv"), e))?;
    println!(
        "{} agents ({:.1} expected), {} edges",
        x.len(),
        rgg.expected_vertices(),
        g.n_edges()
    );
    write_meta(&cli.out, "rgg", cfg.seed, &cfg, Vec::new(), started)
}
