use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dynovs::harness::{self, ExperimentSpec, Scale, PRESET_NAMES};

/// Monte Carlo campaigns for dynamically oversampled 1-bit MIMO receivers.
#[derive(Parser, Debug)]
#[command(name = "dynovs", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Root seed; overrides the spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of channel realizations; overrides the spec.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a campaign described by a TOML spec file.
    Run {
        spec: PathBuf,
        /// CSV output path; defaults to the spec's `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in figure preset.
    Preset {
        name: String,
        #[arg(long, conflicts_with = "paper")]
        desk: bool,
        /// Paper-scale parameters (64 antennas, 1000 realizations).
        #[arg(long)]
        paper: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset as a TOML spec instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// List the built-in presets.
    List,
}

fn execute(mut spec: ExperimentSpec, global: &Global, out: Option<PathBuf>) -> Result<()> {
    if let Some(seed) = global.seed {
        spec.system.rng_seed = seed;
    }
    if let Some(trials) = global.trials {
        spec.n_realizations = trials;
    }
    let out = match out.or_else(|| spec.output.as_ref().map(PathBuf::from)) {
        Some(p) => p,
        None => PathBuf::from(format!("{}.csv", spec.scenario)),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = global.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building the worker pool")?;
    log::info!(
        "running {} with {} realizations",
        spec.scenario,
        spec.n_realizations
    );
    let rows = pool
        .install(|| harness::run_experiment(&spec))
        .with_context(|| format!("scenario {}", spec.scenario))?;
    harness::emit_csv(&rows, &out)?;
    let meta = harness::write_meta(&spec, rows.len(), &out)?;
    println!(
        "{} rows -> {} ({})",
        rows.len(),
        out.display(),
        meta.display()
    );
    Ok(())
}

fn load(path: &Path) -> Result<ExperimentSpec> {
    Ok(ExperimentSpec::load(path)?)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out } => execute(load(&spec)?, &cli.global, out),
        Command::Preset {
            name,
            desk: _,
            paper,
            out,
            print,
        } => {
            let scale = if paper { Scale::Paper } else { Scale::Desk };
            let spec = harness::preset(&name, scale)?;
            if print {
                print!("{}", spec.to_toml()?);
                return Ok(());
            }
            execute(spec, &cli.global, out)
        }
        Command::List => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}
