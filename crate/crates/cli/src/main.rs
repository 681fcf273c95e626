use std::path::PathBuf;
use std::process::ExitCode;

use cauchy_prior_cli::output::VERSION;
use cauchy_prior_cli::{run, CliError, Command, ExperimentConfig};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(version = VERSION, about = "Cauchy and α-stable difference priors: reconstruction experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML config (a run manifest works too). Without it the built-in
    /// defaults are used and --seed is required.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn resolve(args: &Args) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let mut cfg = match (&args.config, args.seed) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(seed)) => ExperimentConfig::from_toml(&format!("seed = {seed}"))?,
        (None, None) => {
            return Err(CliError::Config(
                "a seed is required: pass --seed or --config".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = resolve(&args).and_then(|(cfg, out)| run(args.command, &cfg, &out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
