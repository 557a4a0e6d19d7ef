use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ricci_core::curvature::FormanWeighting;
use ricci_core::graph::DistanceMode;
use ricci_core::measures::WeightSource;
use ricci_core::pipeline::{
    emit_network_snapshot, ingest_prices, run_pipeline, write_prices, MissingPolicy, Perturbation, PipelineConfig,
};
use ricci_core::synthetic::{factor_panel, FactorPanelConfig};
use ricci_core::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Discrete Ricci curvature and market indicators over rolling correlation networks.
#[derive(Debug, Parser)]
#[command(name = "ricci-market", version)]
struct Cli {
    /// Log filter (error, warn, info, debug, trace or an env_logger spec).
    #[arg(long, env = "RICCI_LOG", default_value = "info", global = true)]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute per-epoch indicators from a price panel CSV.
    Analyze(AnalyzeArgs),
    /// Write a synthetic one-factor price panel with a crash window.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Price CSV: `date` column, one column per ticker, optional INDEX column.
    #[arg(long)]
    prices: PathBuf,
    /// Epoch length in trading days.
    #[arg(long, default_value_t = 22)]
    tau: usize,
    /// Shift between epochs in trading days.
    #[arg(long, default_value_t = 5)]
    delta: usize,
    /// Correlation threshold added on top of the minimum spanning tree.
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    threshold: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Skip Ollivier curvature.
    #[arg(long)]
    no_ore: bool,
    /// Skip Forman curvature.
    #[arg(long)]
    no_fre: bool,
    /// Skip Menger curvature.
    #[arg(long)]
    no_mre: bool,
    /// Skip Haantjes curvature.
    #[arg(long)]
    no_hre: bool,
    /// Longest detour counted by Haantjes curvature.
    #[arg(long, default_value_t = 4, conflicts_with = "haantjes_unbounded")]
    haantjes_max_len: usize,
    /// Count Haantjes detours of every length.
    #[arg(long)]
    haantjes_unbounded: bool,
    /// Ground metric for Ollivier curvature: hop or weighted.
    #[arg(long, default_value = "weighted")]
    ollivier_mode: DistanceMode,
    /// Edge weights for Forman curvature: distance or unit.
    #[arg(long, default_value = "distance")]
    forman_weighting: String,
    /// Metric for average path length and diameter: hop or weighted.
    #[arg(long, default_value = "hop")]
    path_mode: DistanceMode,
    /// Metric for communication efficiency: hop or weighted.
    #[arg(long, default_value = "hop")]
    efficiency_mode: DistanceMode,
    /// Edge weights for weighted degree: unit, corr, clamped_corr or dist.
    #[arg(long, default_value = "corr")]
    degree_weight: WeightSource,
    /// Edge weights for modularity: unit, corr, clamped_corr or dist.
    #[arg(long, default_value = "clamped_corr")]
    modularity_weight: WeightSource,
    /// Standard deviation of Gaussian noise added to every correlation.
    #[arg(long, requires = "seed")]
    perturb_sigma: Option<f64>,
    /// Seed for the correlation noise.
    #[arg(long)]
    seed: Option<u64>,
    /// Also export the network of the epoch ending on this date (repeatable).
    #[arg(long)]
    snapshot: Vec<String>,
    /// Missing-cell policy: drop-row or forward-fill.
    #[arg(long, default_value = "drop-row")]
    missing: MissingPolicy,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    tickers: usize,
    /// Price rows.
    #[arg(long, default_value_t = 600)]
    rows: usize,
    #[arg(long, default_value_t = 0.2)]
    normal_corr: f64,
    #[arg(long, default_value_t = 0.8)]
    crash_corr: f64,
    /// First return row of the crash window.
    #[arg(long, default_value_t = 300)]
    crash_start: usize,
    #[arg(long, default_value_t = 60)]
    crash_len: usize,
    #[arg(long, default_value_t = 2008)]
    seed: u64,
}

fn forman_weighting(s: &str) -> Result<FormanWeighting, Error> {
    match s {
        "distance" => Ok(FormanWeighting::Distance),
        "unit" => Ok(FormanWeighting::Unit),
        other => Err(Error::InvalidArgument(format!(
            "unknown Forman weighting {other:?} (expected distance or unit)"
        ))),
    }
}

fn analyze(args: AnalyzeArgs, log_level: String) -> Result<(), Error> {
    let mut cfg = PipelineConfig {
        tau: args.tau,
        delta: args.delta,
        threshold: args.threshold,
        out_dir: Some(args.out.clone()),
        log_level,
        ..Default::default()
    };
    cfg.curvature.ollivier = !args.no_ore;
    cfg.curvature.forman = !args.no_fre;
    cfg.curvature.menger = !args.no_mre;
    cfg.curvature.haantjes = !args.no_hre;
    cfg.curvature.haantjes_max_len = (!args.haantjes_unbounded).then_some(args.haantjes_max_len);
    cfg.curvature.ollivier_mode = args.ollivier_mode;
    cfg.curvature.forman_weighting = forman_weighting(&args.forman_weighting)?;
    cfg.measures.path_mode = args.path_mode;
    cfg.measures.efficiency_mode = args.efficiency_mode;
    cfg.measures.degree_weight = args.degree_weight;
    cfg.measures.modularity_weight = args.modularity_weight;
    if let Some(sigma) = args.perturb_sigma {
        cfg.perturbation = Some(Perturbation {
            sigma,
            seed: args.seed.unwrap_or_default(),
        });
    }
    cfg.validate()?;

    let panel = ingest_prices(&args.prices, args.missing, cfg.tau + 1)?;
    log::info!(
        "loaded {} rows x {} tickers from {}",
        panel.rows(),
        panel.tickers(),
        args.prices.display()
    );
    let out = run_pipeline(&cfg, &panel)?;
    for date in &args.snapshot {
        let path = args.out.join(format!("snapshot_{date}.csv"));
        let edges = emit_network_snapshot(&cfg, &panel, date, &path)?;
        log::info!("snapshot {date}: {edges} edges written to {}", path.display());
    }
    println!("{} epochs written to {}", out.series.len(), args.out.display());
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let cfg = FactorPanelConfig {
        tickers: args.tickers,
        rows: args.rows,
        normal_corr: args.normal_corr,
        crash_corr: args.crash_corr,
        crash_start: args.crash_start,
        crash_len: args.crash_len,
        seed: args.seed,
        ..Default::default()
    };
    let panel = factor_panel(&cfg)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_prices(&args.out, &panel)?;
    println!(
        "{} rows x {} tickers written to {}",
        panel.rows(),
        panel.tickers(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args, cli.log_level.clone()),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ricci-market: {err}");
            ExitCode::from(if err.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL })
        }
    }
}
