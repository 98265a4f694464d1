use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use docket_sim::{report, run_simulation, ReportFormat, SimConfig, SimError};

/// Simulates a court docket over a synthetic caseload.
#[derive(Debug, Parser)]
#[command(name = "docket-sim", version)]
struct Args {
    /// TOML file with simulation settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    days: Option<u32>,
    /// Where to write metrics JSON. Assignments go to assignments.ndjson in
    /// the same directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the assignments file location.
    #[arg(long)]
    assignments: Option<PathBuf>,
    /// Format of the summary printed to stdout.
    #[arg(long, value_enum, default_value_t)]
    format: ReportFormat,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    dir.map_or(Ok(()), std::fs::create_dir_all)
        .and_then(|()| std::fs::write(path, contents))
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn run(args: Args) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(n) = args.cases {
        config.n_cases = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(d) = args.days {
        config.days = d;
    }
    config.validate()?;

    let started = Instant::now();
    let output = run_simulation(&config)?;
    let elapsed = started.elapsed();

    print!("{}", report(&output.metrics, args.format));
    if args.format == ReportFormat::Json {
        println!();
    }
    if let Some(out) = &args.out {
        write(out, &(report(&output.metrics, ReportFormat::Json) + "\n"))?;
        let assignments = args
            .assignments
            .clone()
            .unwrap_or_else(|| out.with_file_name("assignments.ndjson"));
        write(&assignments, &output.assignments_ndjson())?;
    } else if let Some(path) = &args.assignments {
        write(path, &output.assignments_ndjson())?;
    }
    eprintln!(
        "simulated {} days in {:.3}s",
        config.days,
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("docket-sim: {e}");
            match e {
                CliError::Sim(SimError::InvariantViolation { .. }) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
