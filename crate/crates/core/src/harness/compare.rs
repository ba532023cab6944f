//! Horizontal distance between BER curves.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use super::BerPoint;
use crate::error::{Error, Result};

/// SNR advantage of one curve over another at a target BER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Advantage {
    /// Positive when the first curve reaches the target at lower SNR.
    pub db: f64,
    /// One standard deviation, from the binomial errors of the four points
    /// bracketing the target.
    pub stderr_db: f64,
}

/// `log₁₀` BER of a point, with zero counts read as half an error.
fn log_ber(p: &BerPoint) -> f64 {
    let ber = if p.bit_errors == 0 { 0.5 / p.bits.max(1) as f64 } else { p.ber };
    ber.log10()
}

/// Standard deviation of [`log_ber`].
fn log_ber_sd(p: &BerPoint) -> f64 {
    let ber = if p.bit_errors == 0 { 0.5 / p.bits.max(1) as f64 } else { p.ber };
    (ber * (1.0 - ber) / p.bits.max(1) as f64).sqrt() / (ber * LN_10)
}

/// SNR at which `curve` crosses `target_ber`, interpolating linearly in
/// `(snr_db, log₁₀ ber)` on the first segment that brackets the target,
/// with its standard deviation.
pub fn crossing_snr(curve: &[BerPoint], target_ber: f64) -> Result<(f64, f64)> {
    if !(target_ber > 0.0 && target_ber < 1.0) {
        return Err(Error::NotBracketed(target_ber));
    }
    let lt = target_ber.log10();
    for w in curve.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(a.snr_db.is_finite() && b.snr_db.is_finite()) {
            continue;
        }
        let (la, lb) = (log_ber(a), log_ber(b));
        if !(la >= lt && lt >= lb) {
            continue;
        }
        if la == lb {
            return Ok((a.snr_db, 0.0));
        }
        let ds = b.snr_db - a.snr_db;
        let dl = lb - la;
        let t = (lt - la) / dl;
        let snr = a.snr_db + t * ds;
        let ga = ds * (t - 1.0) / dl;
        let gb = -ds * t / dl;
        let sd = ((ga * log_ber_sd(a)).powi(2) + (gb * log_ber_sd(b)).powi(2)).sqrt();
        return Ok((snr, sd));
    }
    Err(Error::NotBracketed(target_ber))
}

/// How much less SNR `curve_a` needs than `curve_b` to reach `target_ber`.
pub fn advantage_db(curve_a: &[BerPoint], curve_b: &[BerPoint], target_ber: f64) -> Result<Advantage> {
    let (sa, da) = crossing_snr(curve_a, target_ber)?;
    let (sb, db) = crossing_snr(curve_b, target_ber)?;
    Ok(Advantage { db: sb - sa, stderr_db: da.hypot(db) })
}
