use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use specrange::cli::{exit_code_for, run, Command, JobConfig, EXIT_INPUT};

/// C-numerical ranges, C-spectra and essential ranges through finite
/// truncations.
#[derive(Debug, Parser)]
#[command(name = "specrange", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Job configuration (JSON); optional for `verify`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory of the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SPECRANGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("SPECRANGE_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("SPECRANGE_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let cfg = match &args.config {
        Some(path) => JobConfig::load(path),
        None if args.command == Command::Verify => Ok(JobConfig::default()),
        None => Err(specrange::Error::Input("--config is required".into())),
    };
    let mut cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
        if let Some(s) = cfg.schedule.as_mut() {
            s.seed = seed;
        }
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    if let Some(c) = cfg.command {
        if c != args.command {
            log::warn!("config names command {c:?}; running {:?}", args.command);
        }
    }
    match run(args.command, &cfg) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                println!("  {}", f.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
