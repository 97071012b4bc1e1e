mod config;
mod experiments;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_assignment, Experiment, ExperimentConfig};

/// Curvature experiments on collapsing four-manifolds.
#[derive(Parser)]
#[command(name = "curvlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature of a radial model metric.
    Curvature(RunArgs),
    /// Curvature decay and volume deficit of the cut-off metrics.
    Decay(RunArgs),
    /// Collapsing torus bundles.
    Collapse(RunArgs),
    /// Glued collapse certificates and the W₊ sweep.
    Glue(RunArgs),
    /// Conformal law, inequalities and Yamabe descent on flat tori.
    Yamabe(RunArgs),
    /// Characteristic-number integrals of reference models.
    Charclass(RunArgs),
    /// Yamabe sign and value of complex surfaces.
    Classify(RunArgs),
    /// Collate finished runs under DIR into summary.txt and summary.json.
    Report {
        #[arg(default_value = "out")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn run_experiment(experiment: Experiment, args: RunArgs) -> Result<bool> {
    let overrides = args.set.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>>>()?;
    let flags = [
        ("seed", args.seed.map(|v| v.to_string())),
        ("out", args.out.map(|p| p.display().to_string())),
        ("samples", args.samples.map(|v| v.to_string())),
        ("tolerance", args.tolerance.map(|v| v.to_string())),
    ];
    let cfg = ExperimentConfig::build(experiment, args.config.as_deref(), &overrides, &flags)?;
    log::info!("running {}", cfg.canonical());
    let started = chrono::Utc::now();
    let run = experiments::run(&cfg)?;
    let summary = output::persist(&cfg, &run, started)?;
    print!("{summary}");
    println!("wrote {}", cfg.out.display());
    Ok(run.all_passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Report { dir } => report::write(&dir).map(|r| {
            print!("{}", r.to_text());
            !r.any_failed()
        }),
        Command::Curvature(a) => run_experiment(Experiment::Curvature, a),
        Command::Decay(a) => run_experiment(Experiment::Decay, a),
        Command::Collapse(a) => run_experiment(Experiment::Collapse, a),
        Command::Glue(a) => run_experiment(Experiment::Glue, a),
        Command::Yamabe(a) => run_experiment(Experiment::Yamabe, a),
        Command::Charclass(a) => run_experiment(Experiment::Charclass, a),
        Command::Classify(a) => run_experiment(Experiment::Classify, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
