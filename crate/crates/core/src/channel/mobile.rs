//! Rayleigh-fading multipath model for the mobile link.
//!
//! Each path is a tapped-delay-line coefficient `10^(-Z/20) · R_n(t)`, where
//! `Z = 20·log₁₀(4πd/λ)` is free-space path loss and `R_n(t)` is an
//! independent sum-of-sinusoids Rayleigh process. Fading is block-static:
//! one coefficient set per block of `block_length` symbols, sampled at the
//! block start time. Each block's tap vector is converted to its
//! minimum-phase equivalent and then normalized to `y₀ = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fir::{minimum_phase, Fir};
use crate::error::{Error, Result};
use crate::seed;

/// Number of sinusoids per path in the fading simulator.
pub const SINUSOIDS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobileChannelConfig {
    /// Number of symbol-spaced paths (`L + 1`).
    pub num_paths: usize,
    /// Vehicle to base-station distance, meters.
    pub distance_m: f64,
    /// Carrier wavelength, meters.
    pub wavelength_m: f64,
    /// Mean power of each path's Rayleigh gain, dB.
    pub rayleigh_mean_db: f64,
    pub speed_kmh: f64,
    /// Symbol period, seconds.
    pub symbol_period_s: f64,
    /// Delay spread, seconds. Informational: paths sit at whole-symbol delays.
    pub multipath_spread_s: f64,
    /// Symbols per quasi-static fading block.
    pub block_length: usize,
}

impl Default for MobileChannelConfig {
    fn default() -> Self {
        Self {
            num_paths: 3,
            distance_m: 500.0,
            wavelength_m: 0.333,
            rayleigh_mean_db: -5.7,
            speed_kmh: 3.0,
            symbol_period_s: 3.69e-6,
            multipath_spread_s: 0.25e-6,
            block_length: 128,
        }
    }
}

impl MobileChannelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MobileConfig(msg));
        if self.num_paths < 1 {
            return bad("num_paths must be at least 1".into());
        }
        if !(self.distance_m > 0.0) {
            return bad(format!("distance must be positive, got {}", self.distance_m));
        }
        if !(self.wavelength_m > 0.0) {
            return bad(format!("wavelength must be positive, got {}", self.wavelength_m));
        }
        if !(self.speed_kmh >= 0.0) || !self.speed_kmh.is_finite() {
            return bad(format!("speed must be non-negative, got {}", self.speed_kmh));
        }
        if !(self.symbol_period_s > 0.0) {
            return bad(format!("symbol period must be positive, got {}", self.symbol_period_s));
        }
        if !(self.multipath_spread_s >= 0.0) {
            return bad(format!("multipath spread must be non-negative, got {}", self.multipath_spread_s));
        }
        if self.block_length == 0 {
            return bad("block_length must be at least 1".into());
        }
        if !self.rayleigh_mean_db.is_finite() {
            return bad("rayleigh mean power must be finite".into());
        }
        Ok(())
    }

    /// Maximum Doppler shift `v/λ`, Hz.
    pub fn doppler_hz(&self) -> f64 {
        self.speed_kmh / 3.6 / self.wavelength_m
    }

    /// Mean power of one path's Rayleigh gain, linear.
    pub fn rayleigh_mean_power(&self) -> f64 {
        10f64.powf(self.rayleigh_mean_db / 10.0)
    }

    /// Amplitude factor `10^(-Z/20)` of the path loss.
    pub fn path_amplitude(&self) -> Result<f64> {
        Ok(10f64.powf(-path_loss_db(self.distance_m, self.wavelength_m)? / 20.0))
    }

    /// Expected raw channel energy `E[Σ|t_n|²]` before any normalization.
    pub fn mean_energy(&self) -> Result<f64> {
        let a = self.path_amplitude()?;
        Ok(self.num_paths as f64 * a * a * self.rayleigh_mean_power())
    }

    pub fn block_duration_s(&self) -> f64 {
        self.block_length as f64 * self.symbol_period_s
    }
}

/// Free-space path loss `20·log₁₀(4πd/λ)` in dB.
pub fn path_loss_db(distance_m: f64, wavelength_m: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::NonPositive { what: "distance", value: distance_m });
    }
    if !(wavelength_m > 0.0) {
        return Err(Error::NonPositive { what: "wavelength", value: wavelength_m });
    }
    Ok(20.0 * (4.0 * PI * distance_m / wavelength_m).log10())
}

/// A sum-of-sinusoids Rayleigh process with random arrival angles and phases.
///
/// `R(t) = A/√M · Σ exp(j(2π f_d cos αₙ t + φₙ))`, `αₙ = (2πn + θ)/M`, with
/// `θ` and every `φₙ` uniform. `E|R|² = A²` for any `t`.
#[derive(Debug, Clone)]
pub struct SumOfSinusoids {
    amplitude: f64,
    frequencies: Vec<f64>,
    phases: Vec<f64>,
}

impl SumOfSinusoids {
    pub fn new(mean_power: f64, doppler_hz: f64, rng: &mut ChaCha8Rng) -> Self {
        let theta: f64 = rng.random_range(-PI..PI);
        let m = SINUSOIDS as f64;
        let frequencies = (0..SINUSOIDS)
            .map(|n| doppler_hz * ((2.0 * PI * n as f64 + theta) / m).cos())
            .collect();
        let phases = (0..SINUSOIDS).map(|_| rng.random_range(-PI..PI)).collect();
        Self { amplitude: (mean_power / m).sqrt(), frequencies, phases }
    }

    pub fn gain(&self, t: f64) -> Complex64 {
        let sum: Complex64 = self
            .frequencies
            .iter()
            .zip(&self.phases)
            .map(|(f, p)| Complex64::from_polar(1.0, 2.0 * PI * f * t + p))
            .sum();
        sum * self.amplitude
    }
}

fn path_process(config: &MobileChannelConfig, path_index: usize, seed: u64) -> SumOfSinusoids {
    let mut rng = seed::trial_rng(seed, path_index, seed::Stream::Fading);
    SumOfSinusoids::new(config.rayleigh_mean_power(), config.doppler_hz(), &mut rng)
}

/// Per-block complex gains `R_n` of path `path_index` for `blocks` blocks.
pub fn rayleigh_process(
    config: &MobileChannelConfig,
    path_index: usize,
    seed: u64,
    blocks: usize,
) -> Result<Vec<Complex64>> {
    config.validate()?;
    let process = path_process(config, path_index, seed);
    let dt = config.block_duration_s();
    Ok((0..blocks).map(|b| process.gain(b as f64 * dt)).collect())
}

/// One fading block as handed to the detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingBlock {
    /// Minimum-phase, normalized taps (`y₀ = 1`).
    pub fir: Fir,
    /// First minimum-phase tap before normalization; received samples are
    /// divided by it, so noise in this block is scaled by `1/|scale|`.
    pub scale: Complex64,
}

/// Block-fading realization for `blocks` blocks.
pub fn mobile_channel(config: &MobileChannelConfig, seed: u64, blocks: usize) -> Result<Vec<FadingBlock>> {
    config.validate()?;
    let amp = config.path_amplitude()?;
    let processes: Vec<SumOfSinusoids> =
        (0..config.num_paths).map(|n| path_process(config, n, seed)).collect();
    let dt = config.block_duration_s();

    (0..blocks)
        .map(|b| {
            // A numerically vanishing tap vector is redrawn one symbol later.
            for attempt in 0..16 {
                let t = b as f64 * dt + attempt as f64 * config.symbol_period_s;
                let raw: Vec<Complex64> = processes.iter().map(|p| p.gain(t) * amp).collect();
                let raw = Fir::new(raw)?;
                if raw.energy() < f64::MIN_POSITIVE {
                    continue;
                }
                let minphase = minimum_phase(&raw)?;
                if let Ok((fir, scale)) = minphase.normalized() {
                    return Ok(FadingBlock { fir, scale });
                }
            }
            Err(Error::DegenerateFir)
        })
        .collect()
}
