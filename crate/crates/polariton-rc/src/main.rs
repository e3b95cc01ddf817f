//! Command-line driver: run one experiment described by a config file and
//! write CSV reports.

use clap::{Parser, Subcommand};
use polariton_rc::harness::{self, ExperimentConfig, Mode, RunOutput};
use polariton_rc::{exec, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "polariton-rc",
    about = "Reservoir computing on a simulated driven-dissipative Kerr lattice",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment config file (key = value sections).
    #[arg(long)]
    config: PathBuf,
    /// Report directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for batch simulation (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Replace the pool seed and split seeds with this single seed.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Logistic regression on raw (and optionally encoded) inputs.
    Baseline(CommonArgs),
    /// Full encode -> lattice -> camera -> readout pipeline.
    Reservoir(CommonArgs),
    /// Reservoir runs over a mask family, features concatenated.
    Ensemble(CommonArgs),
    /// Steady response versus drive power (up/down sweeps).
    Curve(CommonArgs),
    /// Probe-node activation by pumped neighbors.
    Connectivity(CommonArgs),
    /// Reservoir accuracy versus one swept parameter.
    Sweep(CommonArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Baseline(_) => Mode::Baseline,
            Command::Reservoir(_) => Mode::Reservoir,
            Command::Ensemble(_) => Mode::Ensemble,
            Command::Curve(_) => Mode::Curve,
            Command::Connectivity(_) => Mode::Connectivity,
            Command::Sweep(_) => Mode::Sweep,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Baseline(a)
            | Command::Reservoir(a)
            | Command::Ensemble(a)
            | Command::Curve(a)
            | Command::Connectivity(a)
            | Command::Sweep(a) => a,
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let args = cli.command.args();
    let mode = cli.command.mode();

    let raw = std::fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::parse(&raw)?;
    // The subcommand decides what runs; a conflicting mode key in the file
    // is almost certainly a mistake, so refuse it.
    if cfg.run.mode != mode && cfg.run.mode != Mode::Baseline {
        return Err(polariton_rc::Error::Config(format!(
            "config sets mode = {}, but the {} subcommand was invoked",
            cfg.run.mode.as_str(),
            mode.as_str()
        )));
    }
    cfg.run.mode = mode;
    if let Some(seed) = args.seed_override {
        cfg.dataset.pool_seed = seed;
        cfg.dataset.split_seeds = vec![seed];
    }
    exec::configure_threads(args.threads)?;

    let output = harness::run_experiment(&cfg, &raw, &args.out)?;
    print_outcome(&output, &args.out);
    Ok(())
}

fn print_outcome(output: &RunOutput, out_dir: &std::path::Path) {
    match output {
        RunOutput::Classification(r) => {
            println!(
                "accuracy: mean {:.4} sem {:.4} over {} repetitions",
                r.pixels_or_reservoir.mean,
                r.pixels_or_reservoir.sem,
                r.pixels_or_reservoir.reps.len()
            );
            if let Some(enc) = &r.encoded {
                println!("encoded accuracy: mean {:.4} sem {:.4}", enc.mean, enc.sem);
            }
            if let Some(c) = &r.convergence {
                println!(
                    "settling: {}/{} converged, mean settle time {:.2}",
                    c.converged, c.digits, c.mean_settle_time
                );
            }
        }
        RunOutput::Ensemble(r) => {
            for point in &r.per_mask_count {
                println!(
                    "masks {:>2}: mean accuracy {:.4} sem {:.4}",
                    point.masks, point.aggregate.mean, point.aggregate.sem
                );
            }
        }
        RunOutput::Curve(r) => {
            let points = r.up.as_ref().map_or(0, Vec::len) + r.down.as_ref().map_or(0, Vec::len);
            println!("response curve with {points} points written");
        }
        RunOutput::Connectivity(r) => {
            if let Some(last) = r.curves.ratio.last() {
                println!(
                    "connectivity ratio (second-only / all) at top power: {last:.4}"
                );
            }
        }
        RunOutput::Sweep(r) => {
            for point in &r.points {
                println!(
                    "{} = {}: mean accuracy {:.4} sem {:.4}",
                    r.axis, point.value, point.aggregate.mean, point.aggregate.sem
                );
            }
        }
    }
    println!("reports written to {}", out_dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
