use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use slkit::cli::{self, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Forward,
    Invert,
    Perturb,
    Rates,
    Noise,
    Asymptotics,
    Roundtrip,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Forward => Command::Forward,
            Sub::Invert => Command::Invert,
            Sub::Perturb => Command::Perturb,
            Sub::Rates => Command::Rates,
            Sub::Noise => Command::Noise,
            Sub::Asymptotics => Command::Asymptotics,
            Sub::Roundtrip => Command::Roundtrip,
        }
    }
}

/// Sturm-Liouville forward and inverse spectral toolkit.
#[derive(Debug, Parser)]
#[command(name = "slkit", version)]
struct Args {
    #[arg(value_enum)]
    command: Sub,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (falls back to SLKIT_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_VALIDATION as u8 } else { 0 });
        }
    };
    let env = std::env::var(cli::THREADS_ENV).ok();
    let result = cli::resolve_threads(args.threads, env.as_deref()).and_then(|n| {
        slkit::parallel::set_threads(n);
        let config = RunConfig::load(&args.config)?;
        cli::run(args.command.into(), &config, &args.out)
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::from(cli::EXIT_OK as u8)
        }
        Err(e) => {
            eprintln!("slkit: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
