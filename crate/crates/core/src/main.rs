use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use channelgeo::harness::{run, sweep, ExperimentConfig, Kind};
use clap::Parser;

/// Geometric and channel complexity experiments.
#[derive(Parser, Debug)]
#[command(name = "channelgeo", version, about)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    kind: Kind,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Report path; CSV output goes next to it with a `.csv` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(cli: &Cli) -> channelgeo::Result<bool> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| channelgeo::Error::InvalidArgument(e.to_string()))?;
    }
    let mut cfg = ExperimentConfig::from_path(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let started = Instant::now();
    let (json, csv, ok) = match &cfg.sweep {
        Some(s) => {
            let out = sweep(cli.kind, &cfg, &s.parameter, &s.values)?;
            (out.to_json(), Some(out.csv.clone()), out.all_hold())
        }
        None => {
            let out = run(cli.kind, &cfg)?;
            for c in out.report.failed_checks() {
                eprintln!("check failed: {} (lhs {:e}, rhs {:e})", c.name, c.lhs, c.rhs);
            }
            (out.report.to_json(), out.csv, out.report.all_hold())
        }
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, json)?;
            if let Some(bytes) = csv {
                std::fs::write(path.with_extension("csv"), bytes)?;
            }
        }
        None => print!("{json}"),
    }
    eprintln!("{} finished in {:.3}s", cli.kind, started.elapsed().as_secs_f64());
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
