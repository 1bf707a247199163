use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;

use chaoswalk::observables::DistanceMetric;
use chaoswalk::runner::{self, CoinSpec, Experiment, ExperimentConfig, OutputSpec, RunOptions};
use chaoswalk::Error;

/// Coined quantum walks on a ring with chaotic coins.
///
/// The worker thread count is taken from RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "chaoswalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run {
        config: PathBuf,
        /// Output directory, overriding `outputs.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write into a non-empty output directory.
        #[arg(long)]
        force: bool,
        /// Continue from checkpoints of an interrupted run.
        #[arg(long)]
        resume: bool,
    },
    /// Reproduce a figure preset (fig1 ... fig7b).
    Figure {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the preset's fixed seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        resume: bool,
    },
    /// Compare two run directories (or two CSV files).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Tv)]
        metric: Metric,
        /// Largest accepted distance; 0 demands identical values.
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Phase portrait of the classical kicked Harper map.
    Portrait {
        #[arg(long)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 100)]
        orbits: usize,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = runner::PRESET_PORTRAIT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cells: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Tv,
    Ks,
}

enum Failure {
    Error(Error),
    Tolerance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out, force, resume } => {
            let parsed = ExperimentConfig::load(&config)?;
            let opts =
                RunOptions { force, resume, out_dir: out, config_dir: config_dir(&config), ..Default::default() };
            let manifest = runner::run(&parsed, &opts)?;
            println!("wrote {} files", manifest.outputs.len());
        }
        Command::Figure { name, out, seed, force, resume } => {
            let mut preset = runner::figure_preset(&name)?;
            if let Some(seed) = seed {
                runner::reseed(&mut preset, seed);
            }
            let out = out.unwrap_or_else(|| PathBuf::from("figures").join(&name));
            let opts = RunOptions { force, resume, out_dir: Some(out.clone()), ..Default::default() };
            let manifest = runner::run(&preset, &opts)?;
            println!("wrote {} files to {}", manifest.outputs.len(), out.display());
        }
        Command::Compare { a, b, metric, tolerance, report } => {
            let metric = match metric {
                Metric::Tv => DistanceMetric::TotalVariation,
                Metric::Ks => DistanceMetric::KolmogorovSmirnov,
            };
            let result = runner::compare(&a, &b, metric, tolerance)?;
            let text = serde_json::to_string_pretty(&result).map_err(Error::from)?;
            if let Some(path) = report {
                std::fs::write(&path, format!("{text}\n")).map_err(|e| Error::Io { path, source: e })?;
            }
            let _ = writeln!(std::io::stdout(), "{text}");
            if !result.passed {
                return Err(Failure::Tolerance);
            }
        }
        Command::Portrait { g, tau, orbits, steps, seed, cells, out, force } => {
            let config = ExperimentConfig {
                coin: Some(CoinSpec { m: None, tau: Some(tau), ..CoinSpec::harper(2, g) }),
                lattice: None,
                initial: None,
                run: None,
                outputs: OutputSpec { dir: Some(out), ..Default::default() },
                experiment: Experiment::Portrait { n_orbits: orbits, n_steps: steps, seed, cells },
                variants: Vec::new(),
            };
            let opts = RunOptions { force, ..Default::default() };
            let manifest = runner::run(&config, &opts)?;
            println!("wrote {} files", manifest.outputs.len());
        }
        Command::Validate { config } => {
            ExperimentConfig::load(&config)?.validate()?;
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance) => ExitCode::from(2),
        Err(Failure::Error(e)) => {
            error!("{e}");
            ExitCode::from(if e.is_numeric_guard() { 3 } else { 1 })
        }
    }
}
