use num_complex::Complex64;

use super::roots::polynomial_roots;
use crate::error::{Error, Result};

/// A sampled impulse response `y₀ … y_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fir {
    taps: Vec<Complex64>,
}

impl Fir {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::DegenerateFir);
        }
        if taps.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::NonFinite("impulse response"));
        }
        Ok(Self { taps })
    }

    /// Builds from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// `1, 0, …, 0` with `memory` trailing zeros.
    pub fn identity(memory: usize) -> Self {
        let mut taps = vec![Complex64::new(0.0, 0.0); memory + 1];
        taps[0] = Complex64::new(1.0, 0.0);
        Self { taps }
    }

    #[inline]
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Channel memory `g` (number of taps after the first).
    #[inline]
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// Tap `h`, zero past the end.
    #[inline]
    pub fn tap(&self, h: usize) -> Complex64 {
        self.taps.get(h).copied().unwrap_or_default()
    }

    /// Divides every tap by `y₀`, returning the normalized response and the
    /// removed scale. `y₀` of the result is exactly one.
    pub fn normalized(&self) -> Result<(Fir, Complex64)> {
        let y0 = self.taps[0];
        if y0.norm_sqr() == 0.0 {
            return Err(Error::DegenerateFir);
        }
        let mut taps: Vec<Complex64> = self.taps.iter().map(|t| t / y0).collect();
        taps[0] = Complex64::new(1.0, 0.0);
        Ok((Fir { taps }, y0))
    }

    #[inline]
    pub fn is_normalized(&self) -> bool {
        self.taps[0] == Complex64::new(1.0, 0.0)
    }

    /// `Σ |y_h|²`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// `H(e^{jω}) = Σ y_h e^{-jωh}`.
    pub fn response(&self, omega: f64) -> Complex64 {
        self.taps
            .iter()
            .enumerate()
            .map(|(h, t)| t * Complex64::from_polar(1.0, -omega * h as f64))
            .sum()
    }

    /// Zeros of `Σ y_h z^{-h}` in the z-plane. A leading run of zero taps is a
    /// pure delay and contributes no zeros.
    pub fn zeros(&self) -> Vec<Complex64> {
        let first = match self.taps.iter().position(|t| t.norm_sqr() > 0.0) {
            Some(i) => i,
            None => return Vec::new(),
        };
        polynomial_roots(&self.taps[first..])
    }

    /// Largest zero modulus, or 0 for a response without zeros.
    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_minimum_phase(&self) -> bool {
        self.max_zero_modulus() <= 1.0 + 1e-9
    }
}

impl std::fmt::Display for Fir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.taps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_complex(*t))?;
        }
        Ok(())
    }
}

/// `a+bi` with six significant digits per part.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
    format!("{}{}{}i", sig6(z.re), sign, sig6(z.im.abs()))
}

/// Six significant digits, trailing zeros trimmed; scientific notation
/// below 1e-4.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude < -4 {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Replaces every zero outside the unit circle with its conjugate reciprocal,
/// scaling by the zero's modulus so `|H(e^{jω})|` is unchanged. Leading zero
/// taps (a pure delay) are moved to the end.
pub fn minimum_phase(fir: &Fir) -> Result<Fir> {
    let taps = fir.taps();
    let first = taps.iter().position(|t| t.norm_sqr() > 0.0).ok_or(Error::DegenerateFir)?;
    let active = &taps[first..];

    let mut gain = active[0];
    let zeros: Vec<Complex64> = polynomial_roots(active)
        .into_iter()
        .map(|z| {
            let m = z.norm();
            if m > 1.0 {
                gain *= m;
                1.0 / z.conj()
            } else {
                z
            }
        })
        .collect();

    // Expand gain · Π (1 − z_i z⁻¹).
    let mut coeffs = vec![gain];
    for z in &zeros {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * z;
        }
        coeffs = next;
    }
    coeffs.resize(taps.len(), Complex64::new(0.0, 0.0));
    Fir::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_sets_first_tap_exactly() {
        let raw = Fir::from_pairs(&[(3.412, 0.0667), (-0.13, -0.0358), (0.0263, 0.0051)]).unwrap();
        let (n, scale) = raw.normalized().unwrap();
        assert_eq!(n.tap(0), c(1.0, 0.0));
        assert!(n.is_normalized());
        assert_eq!(scale, c(3.412, 0.0667));
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert_eq!(Fir::new(vec![]), Err(Error::DegenerateFir));
        assert!(Fir::new(vec![c(f64::NAN, 0.0)]).is_err());
        let zero = Fir::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(minimum_phase(&zero), Err(Error::DegenerateFir));
        assert!(zero.normalized().is_err());
    }

    #[test]
    fn reflects_outside_zero() {
        let f = Fir::from_pairs(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        let m = minimum_phase(&f).unwrap();
        assert!((m.tap(0) - c(2.0, 0.0)).norm() < 1e-12);
        assert!((m.tap(1) - c(1.0, 0.0)).norm() < 1e-12);
        let (n, _) = m.normalized().unwrap();
        assert!((n.tap(1) - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn minimum_phase_input_is_kept() {
        let f = Fir::from_pairs(&[(1.0, 0.0), (0.5, 0.0)]).unwrap();
        let m = minimum_phase(&f).unwrap();
        assert!((m.tap(0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m.tap(1) - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn leading_delay_moves_to_tail() {
        let f = Fir::from_pairs(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let m = minimum_phase(&f).unwrap();
        assert_eq!(m.taps(), &[c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(3.412), "3.412");
        assert_eq!(sig6(-0.0380998), "-0.0380998");
        assert_eq!(sig6(1234567.0), "1234567");
        assert_eq!(sig6(0.00012345678), "0.000123457");
        assert_eq!(sig6(2.5e-5), "2.5e-5");
        assert_eq!(sig6(-7.56012345e-10), "-7.56012e-10");
        assert_eq!(format_complex(c(3.412, 0.0667)), "3.412+0.0667i");
        assert_eq!(format_complex(c(0.03, -0.0097)), "0.03-0.0097i");
    }
}
