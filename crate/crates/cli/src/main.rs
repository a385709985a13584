use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kwgauge_cli::config::Suite;
use kwgauge_cli::{exit_code, run_suites, CliError, Context, ExperimentConfig};

#[derive(Parser)]
#[command(name = "kwgauge", version, about = "Configured experiments on gauge pairs over gridded model geometries")]
struct Cli {
    /// Experiment config (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of random initial data and samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Multiplies every check tolerance.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise first-order algebra and discrete identity refinement studies.
    VerifyIdentities,
    /// Energy descent from the configured initial data.
    Flow,
    /// Shell profiles of a flowed configuration.
    DecayProfile,
    /// Green's function about the basepoint.
    Greens,
    /// Volume growth of geodesic balls.
    VolumeGrowth,
    /// Ricci tensor of the sampled metric under refinement.
    RicciCheck,
    /// Every suite listed under `suites` in the config.
    Run,
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if let Some(t) = cli.tolerance_scale {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config("flag `--tolerance-scale`: must be positive".into()));
        }
        config.tolerance_scale = t;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("flag `--threads`: {e}")))?;
    }
    let suites = match cli.command {
        Command::VerifyIdentities => vec![Suite::Identities],
        Command::Flow => vec![Suite::Flow],
        Command::DecayProfile => vec![Suite::DecayProfile],
        Command::Greens => vec![Suite::Greens],
        Command::VolumeGrowth => vec![Suite::VolumeGrowth],
        Command::RicciCheck => vec![Suite::RicciCheck],
        Command::Run => {
            if config.suites.is_empty() {
                return Err(CliError::Config("field `suites`: `run` needs at least one suite".into()));
            }
            config.suites.clone()
        }
    };
    let mut ctx = Context::new(config, cli.out)?;
    let reports = run_suites(&mut ctx, &suites)?;
    for r in &reports {
        if let Some(msg) = &r.not_converged {
            eprintln!("{}: {msg}", r.suite);
        }
    }
    Ok(exit_code(&reports))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match execute(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
