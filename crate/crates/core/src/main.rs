use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use smbs::app::commands::{self, CommandContext};
use smbs::app::config::RunConfig;

/// Bayesian nonparametric inference and forecasting for discrete-time
/// semi-Markov processes.
#[derive(Parser)]
#[command(name = "smbs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample paths from the prior predictive process.
    Simulate(CommonArgs),
    /// Compute posterior summaries and posterior draws of the holding-time
    /// distributions.
    Fit(CommonArgs),
    /// Monte Carlo multi-step forecast of future states.
    Predict(CommonArgs),
    /// Generate a path with the reinforced urn walk and record every draw.
    UrnTrace(CommonArgs),
    /// Run the full simulation study: data generation, posterior sweep,
    /// forecast, and limiting distribution.
    Simstudy(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// RNG seed; outputs are byte-identical for a fixed seed.
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Fit(a) => ("fit", a),
        Command::Predict(a) => ("predict", a),
        Command::UrnTrace(a) => ("urn-trace", a),
        Command::Simstudy(a) => ("simstudy", a),
    };
    let config = RunConfig::from_file(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let ctx = CommandContext::new(config, args.seed, args.out.clone());
    let files = match name {
        "simulate" => commands::simulate(&ctx),
        "fit" => commands::fit(&ctx),
        "predict" => commands::predict(&ctx),
        "urn-trace" => commands::urn_trace(&ctx),
        "simstudy" => commands::simstudy(&ctx),
        _ => unreachable!(),
    }
    .with_context(|| format!("running {name}"))?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}
