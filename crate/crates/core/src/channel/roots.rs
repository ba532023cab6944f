//! Complex polynomial root finding (Aberth–Ehrlich with Newton polishing).

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 500;

/// Roots of `c[0]·zⁿ + c[1]·zⁿ⁻¹ + … + c[n]`. `c[0]` must be non-zero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    assert!(!coeffs.is_empty() && coeffs[0].norm_sqr() > 0.0, "leading coefficient must be non-zero");
    let zero = Complex64::new(0.0, 0.0);

    // Trailing zero coefficients are roots at the origin.
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1].norm_sqr() == 0.0 {
        end -= 1;
    }
    let mut roots = vec![zero; coeffs.len() - end];
    let monic: Vec<Complex64> = coeffs[..end].iter().map(|c| c / coeffs[0]).collect();
    let n = monic.len() - 1;

    match n {
        0 => {}
        1 => roots.push(-monic[1]),
        _ => roots.extend(aberth(&monic)),
    }
    roots
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = p[0];
    let mut deriv = Complex64::new(0.0, 0.0);
    for c in &p[1..] {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

fn aberth(monic: &[Complex64]) -> Vec<Complex64> {
    let n = monic.len() - 1;
    // Cauchy bound on root modulus.
    let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(monic, z[i]);
            if p.norm_sqr() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm_sqr() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(monic, *zi);
            if dp.norm_sqr() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}
