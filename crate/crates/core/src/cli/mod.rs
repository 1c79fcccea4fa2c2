//! Configuration, command dispatch and report emission behind the `dilres` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod suite;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_scan, cmd_spectrum, cmd_verify, Outcome, Status};
pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "dilres", version, about = "Spectral workbench for complex-dilated atom-photon Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full spectrum at one parameter point.
    Spectrum(RunArgs),
    /// Resonance trajectory along a path.
    Scan(RunArgs),
    /// Invariant and acceptance checks.
    Verify(RunArgs),
}

/// Reads `DILRES_THREADS` and sizes the global pool. Dense kernels always run
/// sequentially so that output bytes do not depend on the thread count.
pub fn configure_threads() -> Result<(), String> {
    faer::set_global_parallelism(faer::Par::Seq);
    let Ok(v) = std::env::var("DILRES_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("config: DILRES_THREADS={v:?} is not a positive integer"))?;
    if n == 0 {
        return Err("config: DILRES_THREADS must be at least 1".into());
    }
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Err(reason) = configure_threads() {
        eprintln!("{reason}");
        return Status::ConfigError as i32;
    }
    let (args, f): (&RunArgs, fn(&RunConfig, &std::path::Path) -> crate::Result<Outcome>) = match &cli.command {
        Command::Spectrum(a) => (a, cmd_spectrum),
        Command::Scan(a) => (a, cmd_scan),
        Command::Verify(a) => (a, cmd_verify),
    };
    let result = RunConfig::load(&args.config).and_then(|mut cfg| {
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        f(&cfg, &args.out)
    });
    match result {
        Ok(o) => {
            if let Some(r) = o.reason {
                eprintln!("{r}");
            }
            o.status as i32
        }
        Err(e) => {
            eprintln!("{}", e.to_string().replace('\n', " "));
            Status::of_error(&e) as i32
        }
    }
}
