//! Monte-Carlo driver: draws drops, evaluates every requested scheme on the
//! same realization, and aggregates sum rates into CDF statistics.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::beamforming::random_reflection;
use crate::channel::{generate_channel_set, los_component, ChannelSet};
use crate::config::SystemConfig;
use crate::error::{invalid, Error, Result};
use crate::geometry::{draw_large_scale_gains, drop_users};
use crate::multiaccess::{schedule_random, DropRandomness, SchemeEvaluator, SchemeId};
use crate::numerics::{ComplexMatrix, RngStream};

/// Substream offsets within a drop's stream.
const SUB_POSITIONS: u64 = 0;
const SUB_SHADOWING: u64 = 1;
const SUB_FADING: u64 = 2;
const SUB_RANDOM_REFLECTION: u64 = 3;
const SUB_RANDOM_USER: u64 = 4;

/// Everything drawn for one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropSample {
    pub channels: ChannelSet,
    pub randomness: DropRandomness,
}

/// Supplies the realization for a given drop index.
pub trait DropSource: Sync {
    fn draw(&self, drop: u64) -> Result<DropSample>;
}

/// Default source: user dropping, shadowing and fading from the configured
/// scenario. Drop `i` uses stream `i` of the configured seed.
pub struct GeometricSource<'a> {
    config: &'a SystemConfig,
    los: ComplexMatrix,
}

impl<'a> GeometricSource<'a> {
    pub fn new(config: &'a SystemConfig) -> Result<Self> {
        config.validate()?;
        let los = los_component(&config.scenario, config.n_elements, config.n_antennas);
        Ok(Self { config, los })
    }
}

impl DropSource for GeometricSource<'_> {
    fn draw(&self, drop: u64) -> Result<DropSample> {
        let c = self.config;
        let stream = RngStream::new(c.seed, drop);
        let positions = drop_users(&c.scenario, c.n_users, &mut stream.substream(SUB_POSITIONS))?;
        let gains = draw_large_scale_gains(
            &c.scenario,
            &c.pathloss,
            &positions,
            &mut stream.substream(SUB_SHADOWING),
        )?;
        let channels = generate_channel_set(
            &c.channel_params(),
            &self.los,
            &gains,
            &mut stream.substream(SUB_FADING),
        )?;
        let randomness = DropRandomness {
            random_reflection: random_reflection(
                c.n_elements,
                &mut stream.substream(SUB_RANDOM_REFLECTION),
            ),
            random_user: schedule_random(c.n_users, &mut stream.substream(SUB_RANDOM_USER))?,
        };
        Ok(DropSample {
            channels,
            randomness,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Rayon global pool.
    #[default]
    Parallel,
    /// Dedicated pool with this many threads.
    Threads(usize),
}

/// Sum-rate samples and summary statistics for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSamples {
    pub scheme: SchemeId,
    /// `(drop index, sum rate)` in drop order.
    pub by_drop: Vec<(u64, f64)>,
    /// Ascending.
    pub sorted: Vec<f64>,
    /// 95%-likely rate (5th percentile).
    pub p05: f64,
    pub p50: f64,
    pub mean: f64,
}

impl SchemeSamples {
    fn new(scheme: SchemeId, by_drop: Vec<(u64, f64)>) -> Result<Self> {
        let mut sorted: Vec<f64> = by_drop.iter().map(|&(_, v)| v).collect();
        sorted.sort_by(f64::total_cmp);
        let p05 = percentile(&sorted, 0.05)?;
        let p50 = percentile(&sorted, 0.5)?;
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Ok(Self {
            scheme,
            by_drop,
            sorted,
            p05,
            p50,
            mean,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfReport {
    pub schemes: Vec<SchemeSamples>,
    pub config_hash: String,
    pub seed: u64,
    pub n_drops: usize,
    pub aborted_drops: Vec<u64>,
}

impl CdfReport {
    pub fn get(&self, scheme: SchemeId) -> Option<&SchemeSamples> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

fn evaluate_drop(config: &SystemConfig, source: &dyn DropSource, drop: u64) -> Result<Vec<f64>> {
    let sample = source.draw(drop)?;
    let budget = config.link_budget()?;
    let mut ev = SchemeEvaluator::new(&sample.channels, budget, &config.ao);
    config
        .schemes
        .iter()
        .map(|&s| {
            ev.evaluate(s, &config.noma, &sample.randomness)
                .map(|r| r.sum_rate)
        })
        .collect()
}

/// Runs every drop with the default geometric source in parallel.
pub fn run_trials(config: &SystemConfig) -> Result<CdfReport> {
    let source = GeometricSource::new(config)?;
    run_trials_with(config, &source, Execution::Parallel)
}

/// Runs every drop from `source`. Results do not depend on `exec`.
///
/// A drop that fails is logged and skipped; more than 1% failed drops fails
/// the run.
pub fn run_trials_with(
    config: &SystemConfig,
    source: &dyn DropSource,
    exec: Execution,
) -> Result<CdfReport> {
    config.validate()?;
    let drops: Vec<u64> = (0..config.n_drops as u64).collect();
    let run = |d: &u64| (*d, evaluate_drop(config, source, *d));
    let results: Vec<(u64, Result<Vec<f64>>)> = match exec {
        Execution::Serial => drops.iter().map(run).collect(),
        Execution::Parallel => drops.par_iter().map(run).collect(),
        Execution::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| drops.par_iter().map(run).collect()),
    };

    let mut per_scheme: Vec<Vec<(u64, f64)>> =
        vec![Vec::with_capacity(drops.len()); config.schemes.len()];
    let mut aborted = Vec::new();
    for (drop, res) in results {
        match res {
            Ok(rates) => {
                for (bucket, r) in per_scheme.iter_mut().zip(rates) {
                    bucket.push((drop, r));
                }
            }
            Err(e) => {
                log::warn!("drop {drop} aborted: {e}");
                aborted.push(drop);
            }
        }
    }
    if aborted.len() * 100 > config.n_drops {
        return Err(Error::TooManyAborted {
            aborted: aborted.len(),
            total: config.n_drops,
        });
    }

    let schemes = config
        .schemes
        .iter()
        .zip(per_scheme)
        .map(|(&s, v)| SchemeSamples::new(s, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(CdfReport {
        schemes,
        config_hash: config.hash(),
        seed: config.seed,
        n_drops: config.n_drops,
        aborted_drops: aborted,
    })
}

/// Ceiling order statistic: the sample at 1-based rank `⌈p·n⌉` of the
/// ascending sort.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return invalid("percentile of an empty sample");
    }
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("percentile fraction must be in (0, 1), got {p}"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // guard against p·n landing a hair above an integer
    let rank = ((p * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    Ok(sorted[rank - 1])
}

/// Step-function points `(x_(i), i/n)`.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return invalid("empirical CDF of an empty sample");
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect())
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportPaths {
    pub samples: PathBuf,
    pub summary: PathBuf,
    pub cdf: PathBuf,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `samples.csv`, `summary.csv` and `cdf.csv` into `out_dir`.
pub fn emit_report(report: &CdfReport, out_dir: &Path) -> Result<ReportPaths> {
    fs::create_dir_all(out_dir)?;
    let paths = ReportPaths {
        samples: out_dir.join("samples.csv"),
        summary: out_dir.join("summary.csv"),
        cdf: out_dir.join("cdf.csv"),
    };

    let mut w = BufWriter::new(fs::File::create(&paths.samples)?);
    writeln!(w, "scheme,drop,sum_rate_bps_hz")?;
    for s in &report.schemes {
        for &(drop, v) in &s.by_drop {
            writeln!(w, "{},{},{}", s.scheme, drop, num(v))?;
        }
    }
    w.flush()?;

    let mut w = BufWriter::new(fs::File::create(&paths.summary)?);
    writeln!(w, "scheme,p05,p50,mean,n_drops,seed")?;
    for s in &report.schemes {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.scheme,
            num(s.p05),
            num(s.p50),
            num(s.mean),
            s.sorted.len(),
            report.seed
        )?;
    }
    w.flush()?;

    let mut w = BufWriter::new(fs::File::create(&paths.cdf)?);
    writeln!(w, "scheme,value,cum_fraction")?;
    for s in &report.schemes {
        for (x, q) in empirical_cdf(&s.sorted)? {
            writeln!(w, "{},{},{}", s.scheme, num(x), num(q))?;
        }
    }
    w.flush()?;

    Ok(paths)
}
