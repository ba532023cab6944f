//! Channel models: the four telephone circuits, the fading mobile link, and
//! the AWGN that rides on both.
//!
//! Received samples are always expressed relative to a normalized response
//! (`y₀ = 1`); the first raw tap is divided out of the signal and the noise
//! alike.

mod fir;
pub mod mobile;
mod roots;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use fir::{format_complex, minimum_phase, sig6, Fir};
pub use mobile::{mobile_channel, path_loss_db, rayleigh_process, FadingBlock, MobileChannelConfig};
pub use roots::polynomial_roots;

use crate::constellation::{QamPoint, MEAN_ENERGY};
use crate::error::{Error, Result};

/// Sampled responses of the four telephone circuits, as `(re, im)` triples.
const TELEPHONE_TAPS: [[(f64, f64); 3]; 4] = [
    [(3.412, 0.0667), (-0.13, -0.0358), (0.0263, 0.0051)],
    [(0.2544, 0.9941), (-1.7394, 0.2019), (0.6795, -0.8086)],
    [(0.4861, 1.0988), (-0.598, 0.0703), (0.1702, -0.1938)],
    [(0.5031, 0.2008), (-0.1447, -0.0083), (0.03, -0.0097)],
];

/// Raw (un-normalized) response of telephone circuit `id` (1–4).
pub fn telephone_circuit_raw(id: u8) -> Result<Fir> {
    match id {
        1..=4 => Fir::from_pairs(&TELEPHONE_TAPS[id as usize - 1]),
        _ => Err(Error::UnknownChannel(format!("telephone circuit {id}"))),
    }
}

/// Normalized response of telephone circuit `id` (1–4).
pub fn telephone_circuit(id: u8) -> Result<Fir> {
    Ok(telephone_circuit_raw(id)?.normalized()?.0)
}

/// Names accepted by [`ChannelModel::by_name`].
pub const CATALOGUE: [&str; 6] = ["tc1", "tc2", "tc3", "tc4", "gsm", "ideal"];

/// A channel from the catalogue.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Distortion-free channel with `memory` zero taps after `y₀`.
    Ideal { memory: usize },
    Telephone(u8),
    Mobile(MobileChannelConfig),
}

impl ChannelModel {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "ideal" => Ok(ChannelModel::Ideal { memory: 0 }),
            "tc1" => Ok(ChannelModel::Telephone(1)),
            "tc2" => Ok(ChannelModel::Telephone(2)),
            "tc3" => Ok(ChannelModel::Telephone(3)),
            "tc4" => Ok(ChannelModel::Telephone(4)),
            "gsm" => Ok(ChannelModel::Mobile(MobileChannelConfig::default())),
            _ => Err(Error::UnknownChannel(name.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ChannelModel::Ideal { .. } => "ideal".into(),
            ChannelModel::Telephone(id) => format!("tc{id}"),
            ChannelModel::Mobile(_) => "gsm".into(),
        }
    }

    /// Channel memory `g` seen by the detectors.
    pub fn memory(&self) -> usize {
        match self {
            ChannelModel::Ideal { memory } => *memory,
            ChannelModel::Telephone(_) => 2,
            ChannelModel::Mobile(cfg) => cfg.num_paths - 1,
        }
    }

    /// Noiseless per-sample signal power `P_S` that the SNR refers to.
    ///
    /// Static channels use the normalized taps. The mobile channel uses the
    /// mean raw power over the fading ensemble, since each block's noise is
    /// rescaled along with its signal.
    pub fn signal_power(&self) -> Result<f64> {
        match self {
            ChannelModel::Ideal { .. } => Ok(MEAN_ENERGY),
            ChannelModel::Telephone(id) => Ok(MEAN_ENERGY * telephone_circuit(*id)?.energy()),
            ChannelModel::Mobile(cfg) => Ok(MEAN_ENERGY * cfg.mean_energy()?),
        }
    }

    /// Channel realization for one trial of `symbols` symbols.
    pub fn realize(&self, seed: u64, symbols: usize) -> Result<ChannelTrack> {
        match self {
            ChannelModel::Ideal { memory } => Ok(ChannelTrack::Static(Fir::identity(*memory))),
            ChannelModel::Telephone(id) => Ok(ChannelTrack::Static(telephone_circuit(*id)?)),
            ChannelModel::Mobile(cfg) => {
                let blocks = symbols.div_ceil(cfg.block_length).max(1);
                Ok(ChannelTrack::Blocks {
                    blocks: mobile_channel(cfg, seed, blocks)?,
                    block_length: cfg.block_length,
                })
            }
        }
    }
}

/// The normalized response in force at every sample of one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelTrack {
    Static(Fir),
    Blocks { blocks: Vec<FadingBlock>, block_length: usize },
}

impl ChannelTrack {
    /// Response applied to sample `k`. Samples past the last block reuse it.
    #[inline]
    pub fn fir_at(&self, k: usize) -> &Fir {
        match self {
            ChannelTrack::Static(fir) => fir,
            ChannelTrack::Blocks { blocks, block_length } => {
                &blocks[(k / block_length).min(blocks.len() - 1)].fir
            }
        }
    }

    /// Multiplier on unit-referenced noise at sample `k`.
    #[inline]
    pub fn noise_gain_at(&self, k: usize) -> f64 {
        match self {
            ChannelTrack::Static(_) => 1.0,
            ChannelTrack::Blocks { blocks, block_length } => {
                1.0 / blocks[(k / block_length).min(blocks.len() - 1)].scale.norm()
            }
        }
    }

    /// Largest memory over all blocks.
    pub fn memory(&self) -> usize {
        match self {
            ChannelTrack::Static(fir) => fir.memory(),
            ChannelTrack::Blocks { blocks, .. } => blocks.iter().map(|b| b.fir.memory()).max().unwrap_or(0),
        }
    }
}

impl From<Fir> for ChannelTrack {
    fn from(fir: Fir) -> Self {
        ChannelTrack::Static(fir)
    }
}

/// Circular complex Gaussian noise with total variance `σ² = E|w|²`.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    variance: f64,
    per_axis_sigma: f64,
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn new(variance: f64, rng: ChaCha8Rng) -> Self {
        assert!(variance >= 0.0 && variance.is_finite(), "noise variance must be finite and non-negative");
        Self { variance, per_axis_sigma: (variance / 2.0).sqrt(), rng }
    }

    pub fn silent() -> Self {
        use rand::SeedableRng;
        Self::new(0.0, ChaCha8Rng::seed_from_u64(0))
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    #[inline]
    pub fn sample(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * self.per_axis_sigma
    }
}

/// `σ² = P_S / 10^(snr/10)`; `+∞` dB gives zero.
pub fn noise_variance(signal_power: f64, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        signal_power / 10f64.powf(snr_db / 10.0)
    }
}

/// Noise variance for a static normalized response at `snr_db`.
pub fn noise_variance_for_snr(fir: &Fir, snr_db: f64) -> f64 {
    noise_variance(MEAN_ENERGY * fir.energy(), snr_db)
}

/// Received samples for the data part of a transmission.
#[derive(Debug, Clone)]
pub struct ReceivedSequence {
    pub samples: Vec<Complex64>,
    pub track: ChannelTrack,
}

impl ReceivedSequence {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn fir_at(&self, k: usize) -> &Fir {
        self.track.fir_at(k)
    }
}

/// `r_k = Σ_h y_h s_{k-h} + w_k` for every data symbol, where symbols before
/// the data come from `preamble` (last element is `s_{-1}`) and are zero
/// beyond it.
pub fn propagate(
    preamble: &[QamPoint],
    symbols: &[QamPoint],
    track: ChannelTrack,
    noise: &mut NoiseSource,
) -> ReceivedSequence {
    let symbol_at = |j: isize| -> Complex64 {
        if j >= 0 {
            symbols[j as usize].value()
        } else {
            let p = preamble.len() as isize + j;
            if p >= 0 {
                preamble[p as usize].value()
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let samples = (0..symbols.len())
        .map(|k| {
            let fir = track.fir_at(k);
            let clean: Complex64 =
                fir.taps().iter().enumerate().map(|(h, y)| y * symbol_at(k as isize - h as isize)).sum();
            if noise.variance() > 0.0 {
                clean + noise.sample() * track.noise_gain_at(k)
            } else {
                clean
            }
        })
        .collect();
    ReceivedSequence { samples, track }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(re: i8, im: i8) -> QamPoint {
        QamPoint::new(re, im).unwrap()
    }

    #[test]
    fn raw_tables() {
        let t1 = telephone_circuit_raw(1).unwrap();
        assert_eq!(t1.taps(), &[c(3.412, 0.0667), c(-0.13, -0.0358), c(0.0263, 0.0051)]);
        let t4 = telephone_circuit_raw(4).unwrap();
        assert_eq!(t4.taps(), &[c(0.5031, 0.2008), c(-0.1447, -0.0083), c(0.03, -0.0097)]);
        assert!(telephone_circuit(0).is_err());
        assert!(telephone_circuit(5).is_err());
    }

    #[test]
    fn normalized_circuit_one() {
        let y = telephone_circuit(1).unwrap();
        assert_eq!(y.tap(0), c(1.0, 0.0));
        // (a+bi)/(c+di) = ((ac+bd) + (bc-ad)i)/(c²+d²)
        let (a, b, cc, d) = (-0.13, -0.0358, 3.412, 0.0667);
        let den = cc * cc + d * d;
        let want = c((a * cc + b * d) / den, (b * cc - a * d) / den);
        assert!((y.tap(1) - want).norm() < 1e-15);
    }

    #[test]
    fn identity_propagation() {
        let track = ChannelTrack::Static(Fir::identity(2));
        let rx = propagate(&[], &[q(1, 1), q(3, -1)], track, &mut NoiseSource::silent());
        assert_eq!(rx.samples, vec![c(1.0, 1.0), c(3.0, -1.0)]);
    }

    #[test]
    fn two_tap_propagation() {
        let fir = Fir::from_pairs(&[(1.0, 0.0), (0.5, 0.0)]).unwrap();
        let rx = propagate(&[], &[q(1, -1), q(3, 3)], fir.into(), &mut NoiseSource::silent());
        assert_eq!(rx.samples[0], c(1.0, -1.0));
        assert_eq!(rx.samples[1], c(3.5, 2.5));
    }

    #[test]
    fn snr_sizing() {
        let id = Fir::identity(0);
        assert_eq!(noise_variance_for_snr(&id, 10.0), 1.0);
        assert_eq!(noise_variance_for_snr(&id, 0.0), 10.0);
        assert_eq!(noise_variance_for_snr(&id, f64::INFINITY), 0.0);
        let y = telephone_circuit(1).unwrap();
        let energy: f64 = y.taps().iter().map(|t| t.norm_sqr()).sum();
        assert!((noise_variance_for_snr(&y, 20.0) - 10.0 * energy / 100.0).abs() < 1e-15);
    }

    #[test]
    fn noise_statistics() {
        let mut n = NoiseSource::new(0.7, ChaCha8Rng::seed_from_u64(11));
        let draws: Vec<Complex64> = (0..1_000_000).map(|_| n.sample()).collect();
        let count = draws.len() as f64;
        let power = draws.iter().map(|w| w.norm_sqr()).sum::<f64>() / count;
        assert!((power / 0.7 - 1.0).abs() < 0.01, "{power}");
        let mean_re = draws.iter().map(|w| w.re).sum::<f64>() / count;
        let mean_im = draws.iter().map(|w| w.im).sum::<f64>() / count;
        let cov = draws.iter().map(|w| (w.re - mean_re) * (w.im - mean_im)).sum::<f64>() / count;
        let var_re = draws.iter().map(|w| (w.re - mean_re).powi(2)).sum::<f64>() / count;
        let var_im = draws.iter().map(|w| (w.im - mean_im).powi(2)).sum::<f64>() / count;
        assert!((cov / (var_re * var_im).sqrt()).abs() < 0.01);
        assert!((var_re / 0.35 - 1.0).abs() < 0.01 && (var_im / 0.35 - 1.0).abs() < 0.01);
    }

    #[test]
    fn catalogue_loads() {
        for name in CATALOGUE {
            let model = ChannelModel::by_name(name).unwrap();
            assert_eq!(model.name(), name);
            let track = model.realize(3, 1000).unwrap();
            assert!(track.fir_at(0).is_normalized());
            assert!(model.signal_power().unwrap() > 0.0);
        }
        assert!(ChannelModel::by_name("tc9").is_err());
    }
}
