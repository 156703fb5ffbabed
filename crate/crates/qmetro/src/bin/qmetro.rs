//! Experiment CLI: loads a configuration file, runs the selected sweep and
//! writes its CSV table. All logic lives in the library; this binary only
//! parses arguments and maps errors to exit codes (0 success, 2 config
//! error, 3 numerical failure). Log verbosity comes from RUST_LOG.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmetro::harness::{run_experiment, ExperimentConfig, ExperimentKind, HarnessError};

#[derive(Parser)]
#[command(name = "qmetro", version, about = "Noisy quantum sensing sweeps with variational purification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for grid cells (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity gain over a (P0, overlap) grid.
    FidelitySweep(RunArgs),
    /// Fisher information before/after purification for GHZ probes.
    QfiSweep(RunArgs),
    /// Field estimation accuracy with and without purification.
    Ramsey(RunArgs),
    /// Optimizer convergence traces across noise levels.
    Convergence(RunArgs),
    /// Purification gain through a lossy transmission link.
    TransmissionSweep(RunArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::FidelitySweep(_) => ExperimentKind::FidelitySweep,
            Command::QfiSweep(_) => ExperimentKind::QfiSweep,
            Command::Ramsey(_) => ExperimentKind::Ramsey,
            Command::Convergence(_) => ExperimentKind::Convergence,
            Command::TransmissionSweep(_) => ExperimentKind::TransmissionSweep,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::FidelitySweep(a)
            | Command::QfiSweep(a)
            | Command::Ramsey(a)
            | Command::Convergence(a)
            | Command::TransmissionSweep(a) => a,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(HarnessError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
        Err(HarnessError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(command: &Command) -> Result<(), HarnessError> {
    let args = command.args();
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if cfg.experiment != command.kind() {
        return Err(HarnessError::Config(
            qmetro::harness::ConfigError::Invalid(format!(
                "config declares experiment '{}' but the subcommand is '{}'",
                cfg.experiment.as_str(),
                command.kind().as_str()
            )),
        ));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    let out_path = cfg.output.clone().ok_or_else(|| {
        HarnessError::Config(qmetro::harness::ConfigError::Invalid(
            "no output path: set `output` in the config or pass --out".into(),
        ))
    })?;

    let output = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| {
                    HarnessError::Config(qmetro::harness::ConfigError::Invalid(format!(
                        "thread pool: {e}"
                    )))
                })?;
            pool.install(|| run_experiment(&cfg))?
        }
        None => run_experiment(&cfg)?,
    };

    std::fs::write(&out_path, &output.csv)?;
    for (key, value) in &output.summary {
        println!("{key}: {value}");
    }
    println!("output: {}", out_path.display());
    Ok(())
}
