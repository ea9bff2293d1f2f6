use clap::Parser;
use dirac_moire_cli::config::{self, Experiment};
use dirac_moire_cli::error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_ENV: &str = "DIRAC_MOIRE_THREADS";

#[derive(Parser)]
#[command(name = "dirac-moire", version, about = "Dirac interface and moiré junction experiments")]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `dirac-moire-out/<subcommand>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides DIRAC_MOIRE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Dotted `key=value` applied on top of the config file.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}='{v}' is not a thread count"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn main_inner(args: Args) -> Result<PathBuf, CliError> {
    let cfg = config::load(&args.config, &args.overrides)?;
    let n = threads(args.threads)?;
    dirac_moire::par::configure_threads(n).map_err(CliError::Config)?;
    // dense eigensolves stay single-threaded so results do not depend on `n`
    faer::set_global_parallelism(faer::Par::Seq);
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("dirac-moire-out").join(args.experiment.name()));
    dirac_moire_cli::run(args.experiment, &cfg, &out, n, &mut |line| println!("{line}"))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.record()).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
