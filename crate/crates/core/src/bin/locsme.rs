//! Command-line front end for the Monte-Carlo beamforming experiments.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use locsme::config::{parse_config_with_env, ConfigError, MismatchKind, OutputFormat, RunConfig};
use locsme::harness::{aggregate_sinr_db, run_trials, sweep, Algorithm, SinrCurve, SweepAxis};
use locsme::output::{curve_to_csv, curve_to_json, format_sig9, trials_to_csv, trials_to_json};

#[derive(Parser, Debug)]
#[command(name = "locsme", version, about = "Robust adaptive beamforming SINR simulator")]
struct Cli {
    /// Configuration document (TOML); defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_name = "csv|json")]
    format: Option<OutputFormat>,

    /// Maximum number of concurrent trials (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[arg(long, global = true, value_name = "none|coherent|incoherent")]
    mismatch: Option<MismatchKind>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Independent trials at the configured SNR; one row per trial.
    Run,
    /// Terminal SINR versus SNR.
    SweepSnr,
    /// SINR versus snapshot index.
    SweepSnapshots,
    /// Print the effective configuration as TOML.
    ShowConfig,
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("reading {}: {e}", p.display()))?,
        None => String::new(),
    };
    let mut cfg = parse_config_with_env(&text, std::env::vars()).map_err(|e: ConfigError| e.to_string())?;
    if let Some(p) = &cli.output {
        cfg.output.path = Some(p.display().to_string());
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(w) = cli.workers {
        cfg.run.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.run.master_seed = s;
    }
    if let Some(m) = cli.mismatch {
        cfg.mismatch.kind = m;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), String> {
    match &cfg.output.path {
        Some(p) => fs::write(p, body).map_err(|e| format!("writing {p}: {e}")),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn summarize_curve(curve: &SinrCurve) {
    let last = curve.axis_values.len() - 1;
    for alg in &curve.algorithms {
        let v = curve.mean_sinr_db[alg][last]
            .map(format_sig9)
            .unwrap_or_else(|| "missing".into());
        eprintln!(
            "{alg}: mean SINR {v} dB at {} = {} ({} trials)",
            curve.axis.column_name(),
            format_sig9(curve.axis_values[last]),
            curve.num_trials
        );
    }
    for e in &curve.errors {
        eprintln!("cell {} failed: {}", e.axis_index, e.message);
    }
}

fn execute(cli: &Cli) -> Result<(), String> {
    let cfg = load_config(cli)?;
    if let Command::ShowConfig = cli.command {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| format!("thread pool: {e}"))?;
    let scenario = cfg.to_scenario();
    let settings = cfg.trial_settings::<f64>();

    match cli.command {
        Command::Run => {
            let trials = pool
                .install(|| {
                    run_trials(&scenario, cfg.run.n_trials, cfg.run.n_snapshots, cfg.run.master_seed, &settings)
                })
                .map_err(|e| e.to_string())?;
            let algorithms = Algorithm::canonical(&cfg.run.algorithms);
            let body = match cfg.output.format {
                OutputFormat::Csv => trials_to_csv(&trials, &algorithms),
                OutputFormat::Json => trials_to_json(&trials),
            };
            emit(&cfg, &body)?;
            for alg in algorithms {
                let vals: Vec<f64> = trials.iter().filter_map(|t| t.terminal(alg)).collect();
                let (mean, _) = aggregate_sinr_db(&vals);
                eprintln!(
                    "{alg}: mean SINR {} dB at snapshot {} ({} trials)",
                    format_sig9(mean),
                    cfg.run.n_snapshots,
                    vals.len()
                );
            }
        }
        Command::SweepSnr | Command::SweepSnapshots => {
            let axis = if matches!(cli.command, Command::SweepSnr) {
                SweepAxis::SnrDb
            } else {
                SweepAxis::Snapshots
            };
            let spec = cfg.sweep_spec(axis);
            let curve = pool
                .install(|| sweep(&scenario, &spec, &settings))
                .map_err(|e| e.to_string())?;
            let body = match cfg.output.format {
                OutputFormat::Csv => curve_to_csv(&curve),
                OutputFormat::Json => curve_to_json(&curve),
            };
            emit(&cfg, &body)?;
            summarize_curve(&curve);
            if !curve.errors.is_empty() {
                return Err(format!("{} sweep cell(s) failed", curve.errors.len()));
            }
        }
        Command::ShowConfig => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
