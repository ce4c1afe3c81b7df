use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vqoc_experiments::{run, ExpError, ExperimentConfig, ExperimentKind, Overrides, Result};

/// Variational optimal control experiments on a spin chain.
#[derive(Parser)]
#[command(name = "vqoc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize random initializations at a fixed time and budget.
    MaxFidelity(RunArgs),
    /// Fidelity at the speed-limit time and bisection for the shortest feasible time.
    TimeOptimal(RunArgs),
    /// Optimality over Trotter steps and learning budgets.
    OptimalityGrid(RunArgs),
    /// Fidelity distribution of random circuit pairs against Haar.
    Expressibility(RunArgs),
    /// Gradient variance against chain length and total time.
    Gradvar(RunArgs),
    /// Trotter error of smooth policies.
    TrotterError(RunArgs),
    /// Optimization under depolarizing noise and finite shots.
    Noisy(RunArgs),
    /// Parse and validate a configuration without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, overriding the file.
    #[arg(long)]
    threads: Option<usize>,
    /// Replications, overriding the file.
    #[arg(long)]
    replications: Option<usize>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    let (kind, args) = match command {
        Command::MaxFidelity(a) => (ExperimentKind::MaxFidelity, a),
        Command::TimeOptimal(a) => (ExperimentKind::TimeOptimal, a),
        Command::OptimalityGrid(a) => (ExperimentKind::OptimalityGrid, a),
        Command::Expressibility(a) => (ExperimentKind::Expressibility, a),
        Command::Gradvar(a) => (ExperimentKind::Gradvar, a),
        Command::TrotterError(a) => (ExperimentKind::TrotterError, a),
        Command::Noisy(a) => (ExperimentKind::Noisy, a),
        Command::ValidateConfig { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            println!(
                "{}: valid {} configuration, hash {}",
                config.display(),
                cfg.experiment,
                cfg.hash()
            );
            return Ok(());
        }
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != kind {
        return Err(ExpError::config(format!(
            "{} describes a {} experiment, not {kind}",
            args.config.display(),
            cfg.experiment
        )));
    }
    cfg.apply(&Overrides {
        seed: args.seed,
        output: args.out,
        threads: args.threads,
        replications: args.replications,
    });
    let record = run(&cfg)?;
    let dir = cfg.output_dir();
    let files = record.write(&dir)?;
    println!("{kind}: wrote {} files to {}", files.len(), dir.display());
    for (key, value) in &record.summary {
        println!("  {key} = {value:.6e}");
    }
    Ok(())
}
