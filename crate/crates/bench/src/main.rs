use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use proxvr_bench::experiment::final_median_subopt;
use proxvr_bench::report::emit_meta;
use proxvr_bench::tune::tune;
use proxvr_bench::{emit_csv, emit_svg, run_experiment, BenchError, ExperimentConfig, Result};

/// Directory for relative output paths.
const OUT_DIR_VAR: &str = "PROXVR_OUT_DIR";

#[derive(Parser)]
#[command(name = "proxvr-bench", version, about = "Multi-seed runs of proximal stochastic solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed and write the CSV trace and SVG plot.
    Run(Settings),
    /// Grid-search the step size of one solver and print the winning settings.
    Tune {
        #[command(flatten)]
        settings: Settings,
        /// Write the settings here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Every flag mirrors a config-file key and overrides it.
#[derive(Args)]
struct Settings {
    /// Flat `key = value` file read before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated: proxgd, proxsgd, proxsvrg, proxsaga, pl-svrg, pl-saga.
    #[arg(long)]
    solver: Option<String>,
    /// LIBSVM file; NN-PCA on its rows.
    #[arg(long)]
    data: Option<String>,
    /// Gaussian NN-PCA, e.g. `n=512,d=20,seed=1`.
    #[arg(long)]
    synthetic: Option<String>,
    /// ℓ1 least squares, e.g. `n=256,d=10,lambda=0.01`.
    #[arg(long)]
    pl: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    /// Keep LIBSVM/synthetic rows at their original scale.
    #[arg(long)]
    no_normalize: bool,
    /// single, minibatch, general, manual or pl.
    #[arg(long)]
    plan: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    batch: Option<String>,
    #[arg(long)]
    epoch_len: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    stages: Option<String>,
    /// ProxSGD initial step in units of 1/L.
    #[arg(long)]
    sgd_eta0: Option<String>,
    #[arg(long)]
    sgd_decay: Option<String>,
    #[arg(long)]
    sgd_batch: Option<String>,
    /// `1..10`, `3` or `1,5,9`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    passes: Option<String>,
    /// Start ProxSVRG/ProxSAGA from n ProxSGD steps.
    #[arg(long)]
    warm_start: bool,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    trace: Option<String>,
    #[arg(long)]
    svg: Option<String>,
}

impl Settings {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = [
            ("solver", &self.solver),
            ("data", &self.data),
            ("synthetic", &self.synthetic),
            ("pl", &self.pl),
            ("dim", &self.dim),
            ("plan", &self.plan),
            ("eta", &self.eta),
            ("batch", &self.batch),
            ("epoch-len", &self.epoch_len),
            ("rho", &self.rho),
            ("stages", &self.stages),
            ("sgd-eta0", &self.sgd_eta0),
            ("sgd-decay", &self.sgd_decay),
            ("sgd-batch", &self.sgd_batch),
            ("seeds", &self.seeds),
            ("passes", &self.passes),
            ("stride", &self.stride),
            ("trace", &self.trace),
            ("svg", &self.svg),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
        if self.no_normalize {
            out.push(("normalize", "false".into()));
        }
        if self.warm_start {
            out.push(("warm-start", "true".into()));
        }
        out
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
                ExperimentConfig::from_file_text(&text)?
            }
            None => ExperimentConfig::default(),
        };
        for (k, v) in self.overrides() {
            cfg.set(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output_path(given: Option<&Path>, default: &str) -> PathBuf {
    let path = given.map_or_else(|| PathBuf::from(default), Path::to_path_buf);
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

fn run(settings: &Settings) -> Result<()> {
    let cfg = settings.load()?;
    let result = run_experiment(&cfg)?;
    let trace = output_path(cfg.trace.as_deref(), "trace.csv");
    let svg = output_path(cfg.svg.as_deref(), "plot.svg");
    emit_csv(&result.traces, &trace)?;
    emit_meta(&result.traces, &trace)?;
    emit_svg(&result.summary, &svg)?;
    info!("wrote {} and {}", trace.display(), svg.display());
    println!("baseline F = {:.12e}", result.f_hat);
    for solver in &cfg.solvers {
        let name = solver.name();
        match final_median_subopt(&result.traces, name) {
            Some(v) => println!("{name}: median final suboptimality {v:.6e}"),
            None => println!("{name}: no suboptimality recorded"),
        }
    }
    Ok(())
}

fn run_tune(settings: &Settings, out: Option<&Path>) -> Result<()> {
    let cfg = settings.load()?;
    let outcome = tune(&cfg)?;
    for c in &outcome.candidates {
        let shown: Vec<String> = c.settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        match c.score {
            Some(s) => info!("{} -> {s:.12e}", shown.join(" ")),
            None => info!("{} -> diverged", shown.join(" ")),
        }
    }
    let text = format!(
        "# tuned {} over seeds {:?}, score = median final objective {:e}\n{}",
        outcome.solver,
        cfg.seeds,
        outcome.best.score.unwrap_or(f64::NAN),
        outcome.config_lines()
    );
    match out {
        Some(path) => {
            let path = output_path(Some(path), "");
            std::fs::write(&path, text).map_err(|e| BenchError::io(path, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(s) => run(s),
        Command::Tune { settings, out } => run_tune(settings, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
