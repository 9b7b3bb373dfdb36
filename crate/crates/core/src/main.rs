use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crsense::config::{parse_config, RunConfig};
use crsense::runner::{run, Command as RunCommand};

/// Stable-throughput analysis and slotted simulation for cognitive-radio
/// random access with spectrum sensing.
#[derive(Parser)]
#[command(name = "crsense", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the sampled stability-region boundary of every scheme.
    Region(CommonArgs),
    /// Emit the optimal policy trace of the configured scheme.
    Optimize(CommonArgs),
    /// Simulate the optimized policy at the configured arrival rates.
    Simulate(CommonArgs),
    /// Emit per-lambda_p best-scheme rows plus crossover flags.
    Compare(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSVs and plot scripts.
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Override sim.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override sim.slots.
    #[arg(long)]
    slots: Option<u64>,
    /// Override sweep.tau_points.
    #[arg(long)]
    tau_points: Option<usize>,
    /// Override sweep.b_points.
    #[arg(long)]
    b_points: Option<usize>,
}

impl CommonArgs {
    fn load(&self) -> crsense::Result<RunConfig> {
        let text = std::fs::read_to_string(&self.config)?;
        let mut cfg = parse_config(&text)?;
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
        }
        if let Some(slots) = self.slots {
            cfg.sim.slots = slots;
            cfg.sim.warmup_slots = slots / 10;
        }
        if let Some(n) = self.tau_points {
            cfg.grids.tau_points = n;
        }
        if let Some(n) = self.b_points {
            cfg.grids.b_points = n;
        }
        cfg.grids.validate()?;
        cfg.sim.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Command::Region(a) => (RunCommand::Region, a),
        Command::Optimize(a) => (RunCommand::Optimize, a),
        Command::Simulate(a) => (RunCommand::Simulate, a),
        Command::Compare(a) => (RunCommand::Compare, a),
    };
    match args.load().and_then(|cfg| run(command, &cfg, &args.output)) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
