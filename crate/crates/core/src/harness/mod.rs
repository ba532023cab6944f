//! Monte Carlo bit-error-rate measurement.
//!
//! A grid point is simulated as independent transmissions ("trials") of
//! `block_length` data symbols, each preceded by its own random known
//! preamble of `max(g, warmup)` symbols that is not counted. Every random
//! stream of a trial is seeded from `(master_seed, grid index, salt, trial,
//! stream)` through [`crate::seed`], and trial results are integer counts
//! summed in a fixed order, so results do not depend on how trials are
//! scheduled across threads.
//!
//! Work runs in the caller's rayon pool (the global one by default) unless
//! the `EQLAB_THREADS` environment variable sets the worker count.

mod compare;
mod report;

use std::time::Instant;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{advantage_db, crossing_snr, Advantage};
pub use report::{ops_report, write_csv, write_json, OpsRow, CSV_VERSION, JSON_VERSION};

use crate::channel::{noise_variance, propagate, ChannelModel, NoiseSource};
use crate::constellation::{bits_to_symbols, symbols_to_bits, QamPoint, BITS_PER_SYMBOL, ORDER};
use crate::detectors::{Detector, DetectorSpec, OpCounts};
use crate::error::{Error, Result};
use crate::seed::{name_salt, point_seed, trial_rng, Stream};

/// Smallest number of symbols per grid point.
pub const MIN_SYMBOLS: usize = 1000;

/// One simulation: a channel, a detector and an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub channel: ChannelModel,
    pub detector: DetectorSpec,
    /// Strictly increasing; `+∞` means noiseless.
    pub snr_db: Vec<f64>,
    pub symbols_per_point: usize,
    pub master_seed: u64,
    /// Minimum preamble length.
    pub warmup: usize,
    /// Data symbols per transmission.
    pub block_length: usize,
    /// Draw bits, noise and fading independently of the detector, so that
    /// runs differing only in the detector see identical realizations.
    pub paired: bool,
}

impl SimSpec {
    pub fn new(channel: ChannelModel, detector: DetectorSpec, snr_db: Vec<f64>) -> Self {
        Self {
            channel,
            detector,
            snr_db,
            symbols_per_point: 100_000,
            master_seed: 1,
            warmup: 20,
            block_length: 4096,
            paired: false,
        }
    }

    pub fn with_symbols(mut self, n: usize) -> Self {
        self.symbols_per_point = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_paired(mut self, paired: bool) -> Self {
        self.paired = paired;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbols_per_point < MIN_SYMBOLS {
            return Err(Error::Parameter(format!(
                "symbols per point must be at least {MIN_SYMBOLS}, got {}",
                self.symbols_per_point
            )));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Parameter("the SNR grid is empty".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::Parameter("SNR values must be numbers below +inf".into()));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("the SNR grid must be strictly increasing".into()));
        }
        if self.block_length == 0 {
            return Err(Error::Parameter("block_length must be at least 1".into()));
        }
        if let ChannelModel::Mobile(cfg) = &self.channel {
            cfg.validate()?;
        }
        if let DetectorSpec::NearMlse(cfg) = &self.detector {
            cfg.validate(self.channel.memory())?;
        }
        Ok(())
    }

    pub fn preamble_length(&self) -> usize {
        self.channel.memory().max(self.warmup)
    }

    /// Seed of grid point `index`.
    pub fn point_seed(&self, index: usize) -> u64 {
        let salt = if self.paired { 0 } else { name_salt(self.detector.name()) };
        point_seed(self.master_seed, index, salt)
    }

    /// Every setting as `key=value` pairs, in a form the config parser
    /// accepts back.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![("channel".to_string(), self.channel.name())];
        if let ChannelModel::Mobile(cfg) = &self.channel {
            out.extend([
                ("speed_kmh".to_string(), cfg.speed_kmh.to_string()),
                ("num_paths".to_string(), cfg.num_paths.to_string()),
                ("distance_m".to_string(), cfg.distance_m.to_string()),
                ("wavelength_m".to_string(), cfg.wavelength_m.to_string()),
                ("rayleigh_mean_db".to_string(), cfg.rayleigh_mean_db.to_string()),
                ("symbol_period_s".to_string(), cfg.symbol_period_s.to_string()),
                ("fading_block".to_string(), cfg.block_length.to_string()),
            ]);
        }
        out.push(("detector".to_string(), self.detector.name().to_string()));
        out.extend(self.detector.params());
        let grid: Vec<String> = self.snr_db.iter().map(|s| s.to_string()).collect();
        out.extend([
            ("snr".to_string(), grid.join(",")),
            ("symbols".to_string(), self.symbols_per_point.to_string()),
            ("seed".to_string(), self.master_seed.to_string()),
            ("warmup".to_string(), self.warmup.to_string()),
            ("block_length".to_string(), self.block_length.to_string()),
            ("paired".to_string(), self.paired.to_string()),
        ]);
        out
    }
}

/// Measurement at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub symbols: u64,
    pub symbol_errors: u64,
    pub seed: u64,
    pub ops: OpCounts,
}

impl BerPoint {
    pub fn from_counts(snr_db: f64, bits: u64, bit_errors: u64) -> Self {
        Self {
            snr_db,
            bits,
            bit_errors,
            ber: bit_errors as f64 / bits.max(1) as f64,
            symbols: bits / BITS_PER_SYMBOL as u64,
            symbol_errors: 0,
            seed: 0,
            ops: OpCounts::default(),
        }
    }

    /// Binomial standard error `sqrt(ber (1 − ber) / bits)`.
    pub fn stderr(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits.max(1) as f64).sqrt()
    }
}

/// A finished sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub format_version: u32,
    pub channel: String,
    pub detector: String,
    pub config: Vec<(String, String)>,
    pub points: Vec<BerPoint>,
    pub wall_clock_s: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct TrialCounts {
    bits: u64,
    bit_errors: u64,
    symbols: u64,
    symbol_errors: u64,
    ops: OpCounts,
}

impl TrialCounts {
    fn merge(mut self, other: TrialCounts) -> Self {
        self.bits += other.bits;
        self.bit_errors += other.bit_errors;
        self.symbols += other.symbols;
        self.symbol_errors += other.symbol_errors;
        self.ops.merge(&other.ops);
        self
    }
}

fn random_symbols(n: usize, rng: &mut impl Rng) -> Vec<QamPoint> {
    (0..n).map(|_| QamPoint::from_index(rng.random_range(0..ORDER))).collect()
}

fn run_trial(
    spec: &SimSpec,
    detector: &dyn Detector,
    seed: u64,
    trial: usize,
    len: usize,
    variance: f64,
) -> Result<TrialCounts> {
    let mut bits_rng = trial_rng(seed, trial, Stream::Bits);
    let bits: Vec<u8> = (0..len * BITS_PER_SYMBOL).map(|_| bits_rng.random_range(0..2u8)).collect();
    let tx = bits_to_symbols(&bits)?;
    let preamble = random_symbols(spec.preamble_length(), &mut trial_rng(seed, trial, Stream::Preamble));
    let fading_seed = trial_rng(seed, trial, Stream::Fading).next_u64();
    let track = spec.channel.realize(fading_seed, len)?;
    let mut noise = NoiseSource::new(variance, trial_rng(seed, trial, Stream::Noise));
    let rx = propagate(&preamble, &tx, track, &mut noise);
    let det = detector.detect(&rx, &preamble)?;
    let mut counts = TrialCounts {
        bits: (len * BITS_PER_SYMBOL) as u64,
        symbols: len as u64,
        ops: det.ops,
        ..TrialCounts::default()
    };
    let decided = symbols_to_bits(&det.symbols);
    for (sent, got) in bits.chunks(BITS_PER_SYMBOL).zip(decided.chunks(BITS_PER_SYMBOL)) {
        let d = sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64;
        counts.bit_errors += d;
        counts.symbol_errors += u64::from(d > 0);
    }
    Ok(counts)
}

/// Trial lengths covering `symbols` in blocks of `block`.
fn trial_lengths(symbols: usize, block: usize) -> Vec<usize> {
    let mut lens = vec![block; symbols / block];
    if symbols % block > 0 {
        lens.push(symbols % block);
    }
    lens
}

/// Worker cap from `EQLAB_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("EQLAB_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("EQLAB_THREADS={v} is not a positive count"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` in a pool of `EQLAB_THREADS` workers, or in the current rayon
/// context when the variable is unset.
fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match thread_cap()? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn point_jobs(spec: &SimSpec, detector: &dyn Detector, indices: &[usize], serial: bool) -> Result<Vec<BerPoint>> {
    let signal_power = spec.channel.signal_power()?;
    let lens = trial_lengths(spec.symbols_per_point, spec.block_length);
    let jobs: Vec<(usize, usize)> =
        indices.iter().flat_map(|&i| (0..lens.len()).map(move |t| (i, t))).collect();
    let run = |&(i, t): &(usize, usize)| {
        let variance = noise_variance(signal_power, spec.snr_db[i]);
        run_trial(spec, detector, spec.point_seed(i), t, lens[t], variance)
    };
    let results: Vec<Result<TrialCounts>> =
        if serial { jobs.iter().map(run).collect() } else { jobs.par_iter().map(run).collect() };

    let mut points = Vec::with_capacity(indices.len());
    let mut iter = results.into_iter();
    for &i in indices {
        let mut total = TrialCounts::default();
        for _ in 0..lens.len() {
            total = total.merge(iter.next().expect("one result per job")?);
        }
        points.push(BerPoint {
            snr_db: spec.snr_db[i],
            bits: total.bits,
            bit_errors: total.bit_errors,
            ber: total.bit_errors as f64 / total.bits as f64,
            symbols: total.symbols,
            symbol_errors: total.symbol_errors,
            seed: spec.point_seed(i),
            ops: total.ops,
        });
    }
    Ok(points)
}

/// Measures grid point `index` of `spec`.
pub fn run_point(spec: &SimSpec, index: usize) -> Result<BerPoint> {
    spec.validate()?;
    if index >= spec.snr_db.len() {
        return Err(Error::Parameter(format!("grid index {index} out of range")));
    }
    let detector = spec.detector.build();
    let mut points = in_pool(|| point_jobs(spec, detector.as_ref(), &[index], false))??;
    Ok(points.remove(0))
}

fn sweep_with(spec: &SimSpec, serial: bool) -> Result<RunResult> {
    spec.validate()?;
    let started = Instant::now();
    let detector = spec.detector.build();
    let indices: Vec<usize> = (0..spec.snr_db.len()).collect();
    let points = if serial {
        point_jobs(spec, detector.as_ref(), &indices, true)?
    } else {
        in_pool(|| point_jobs(spec, detector.as_ref(), &indices, false))??
    };
    Ok(RunResult {
        format_version: JSON_VERSION,
        channel: spec.channel.name(),
        detector: spec.detector.name().to_string(),
        config: spec.echo(),
        points,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

/// Measures every grid point, trials running in parallel.
pub fn sweep(spec: &SimSpec) -> Result<RunResult> {
    sweep_with(spec, false)
}

/// [`sweep`] on the calling thread only.
pub fn sweep_serial(spec: &SimSpec) -> Result<RunResult> {
    sweep_with(spec, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn spec(detector: &str, snr: Vec<f64>) -> SimSpec {
        SimSpec::new(
            ChannelModel::by_name("tc1").unwrap(),
            DetectorSpec::by_name(detector, &BTreeMap::new()).unwrap(),
            snr,
        )
        .with_symbols(5000)
    }

    #[test]
    fn trial_lengths_cover_exactly() {
        assert_eq!(trial_lengths(10_000, 4096), vec![4096, 4096, 1808]);
        assert_eq!(trial_lengths(4096, 4096), vec![4096]);
        assert_eq!(trial_lengths(1000, 4096), vec![1000]);
    }

    #[test]
    fn validation() {
        assert!(spec("dfe", vec![10.0, 12.0]).validate().is_ok());
        assert!(spec("dfe", vec![12.0, 10.0]).validate().is_err());
        assert!(spec("dfe", vec![]).validate().is_err());
        assert!(spec("dfe", vec![f64::NAN]).validate().is_err());
        assert!(spec("dfe", vec![10.0]).with_symbols(999).validate().is_err());
        assert!(spec("dfe", vec![10.0, f64::INFINITY]).validate().is_ok());
    }

    #[test]
    fn single_point_grid() {
        let r = sweep(&spec("dfe", vec![15.0])).unwrap();
        assert_eq!(r.points.len(), 1);
        let p = &r.points[0];
        assert_eq!(p.bits, 20_000);
        assert_eq!(p.ber, p.bit_errors as f64 / p.bits as f64);
        assert!(p.symbol_errors <= p.bit_errors && p.bit_errors <= 4 * p.symbol_errors);
    }

    #[test]
    fn run_point_matches_sweep_entry() {
        let s = spec("perturb1", vec![12.0, 16.0]);
        let r = sweep(&s).unwrap();
        assert_eq!(run_point(&s, 1).unwrap(), r.points[1]);
        assert_eq!(run_point(&s, 1).unwrap(), run_point(&s, 1).unwrap());
    }

    #[test]
    fn serial_equals_parallel() {
        let s = spec("near-mlse", vec![14.0, 18.0]).with_symbols(9000);
        assert_eq!(sweep(&s).unwrap().points, sweep_serial(&s).unwrap().points);
    }

    #[test]
    fn pairing_controls_realizations() {
        let a = spec("dfe", vec![12.0]).with_paired(true);
        let b = spec("perturb1", vec![12.0]).with_paired(true);
        assert_eq!(a.point_seed(0), b.point_seed(0));
        let (a, b) = (a.with_paired(false), b.with_paired(false));
        assert_ne!(a.point_seed(0), b.point_seed(0));
    }

    #[test]
    fn stderr_formula() {
        let p = BerPoint::from_counts(10.0, 10_000, 100);
        assert!((p.stderr() - (0.01f64 * 0.99 / 10_000.0).sqrt()).abs() < 1e-15);
    }
}
