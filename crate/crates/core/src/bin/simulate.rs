use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use irsim::channel::dump;
use irsim::montecarlo::{DropSource, GeometricSource};
use irsim::{emit_report, parse_config, run_trials_with, Execution, SchemeId};

/// Monte-Carlo sum spectral efficiency of IRS-aided multiple-access schemes.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// TOML configuration file (may be empty for the baseline scenario).
    #[arg(long)]
    config: PathBuf,

    /// Number of drops; overrides the config file.
    #[arg(long)]
    drops: Option<usize>,

    /// Base seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated scheme list, e.g. FDMA,FDMA-EUS; overrides the config file.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,

    /// Output directory for the CSV files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,

    /// Worker threads (default: all cores; 1 runs serially).
    #[arg(long)]
    threads: Option<usize>,

    /// Also write every drop's channel realization to this binary file.
    #[arg(long)]
    dump_channels: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("reading {}: {e}", args.config.display()))?;
    let mut config = parse_config(&text)?;
    if let Some(d) = args.drops {
        config.n_drops = d;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(list) = &args.schemes {
        config.schemes = list
            .iter()
            .map(|s| s.parse::<SchemeId>())
            .collect::<Result<_, _>>()?;
    }
    config.validate()?;

    let exec = match args.threads {
        Some(1) => Execution::Serial,
        Some(n) => Execution::Threads(n),
        None => Execution::Parallel,
    };
    let source = GeometricSource::new(&config)?;
    let report = run_trials_with(&config, &source, exec)?;
    let paths = emit_report(&report, &args.out_dir)?;

    if let Some(path) = &args.dump_channels {
        let mut w = BufWriter::new(fs::File::create(path)?);
        for drop in 0..config.n_drops as u64 {
            match source.draw(drop) {
                Ok(sample) => dump::write_record(&mut w, config.seed, drop, &sample.channels)?,
                Err(e) => log::warn!("drop {drop} not dumped: {e}"),
            }
        }
    }

    println!(
        "config {}  seed {}  drops {} ({} aborted)",
        report.config_hash,
        report.seed,
        report.n_drops,
        report.aborted_drops.len()
    );
    println!(
        "{:<10} {:>10} {:>10} {:>10}",
        "scheme", "p05", "p50", "mean"
    );
    for s in &report.schemes {
        println!(
            "{:<10} {:>10.3} {:>10.3} {:>10.3}",
            s.scheme.name(),
            s.p05,
            s.p50,
            s.mean
        );
    }
    println!("wrote {}", paths.summary.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
