use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qutritlab::harness::{run, Experiment, ExperimentConfig};
use qutritlab::Error;

/// Run one qutritlab experiment and write its data files.
#[derive(Debug, Parser)]
#[command(name = "qutritlab", version, about)]
struct Args {
    /// chi-curve, spectroscopy, spiral, ramsey, state-tomo, process-tomo,
    /// contextuality or sweet-spot.
    experiment: String,
    /// JSON config file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    if err.is_config_error() || matches!(err, Error::Io(_)) {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn execute(args: &Args) -> Result<(), Error> {
    let experiment: Experiment = args.experiment.parse()?;
    let config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let out = args
        .out
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
    let report = run(experiment, &config, args.seed, &out)?;
    println!("{} (config {})", report.experiment(), &report.config_hash()[..12]);
    for (key, value) in &report.summary {
        println!("  {key} = {value}");
    }
    println!("wrote {} files to {}", report.files.len() + 1, out.display());
    Ok(())
}
