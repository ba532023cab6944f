//! Exact maximum-likelihood sequence estimation by the Viterbi algorithm.
//!
//! States are the last `g` symbols, `x₀ + 16·x₁ + … + 16^{g−1}·x_{g−1}`
//! with `x₀` the most recent. The trellis starts in the single state given
//! by the preamble.

use num_complex::Complex64;

use super::{Detection, Detector, OpCounts};
use crate::channel::ReceivedSequence;
use crate::constellation::{slice, QamPoint, ORDER};
use crate::error::{Error, Result};

/// Largest trellis handled (`16^g ≤ MAX_STATES`).
pub const MAX_STATES: usize = 256;

/// Maximum-likelihood decisions for `rx`, whose transmission was preceded by
/// `preamble` (at least `g` symbols).
pub fn viterbi_mlse(rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection> {
    let g = rx.track.memory();
    let mut states = 1usize;
    for _ in 0..g {
        states = states.saturating_mul(ORDER);
        if states > MAX_STATES {
            return Err(Error::StateBudget { memory: g, max: MAX_STATES });
        }
    }
    if preamble.len() < g {
        return Err(Error::Parameter(format!(
            "the Viterbi detector needs a preamble of at least {g} symbols, got {}",
            preamble.len()
        )));
    }
    let n = rx.len();
    let mut ops = OpCounts::default();

    if g == 0 {
        let symbols: Vec<QamPoint> = rx.samples.iter().map(|&r| slice(r)).collect();
        ops.comparisons += crate::constellation::SLICE_COMPARISONS * n as u64;
        ops.cost_evals += n as u64;
        ops.symbols += n as u64;
        return Ok(Detection { symbols, ops });
    }

    let values: Vec<Complex64> = (0..ORDER).map(|i| QamPoint::from_index(i).value()).collect();
    let start = preamble[preamble.len() - g..]
        .iter()
        .fold(0usize, |state, p| state * ORDER + p.index());
    let mut cost = vec![f64::INFINITY; states];
    cost[start] = 0.0;
    let mut next = vec![0.0; states];
    let mut back = vec![0u8; n * states];
    let mut partial = vec![Complex64::new(0.0, 0.0); states];
    let shift = states / ORDER;

    for k in 0..n {
        let fir = rx.fir_at(k);
        let r = rx.samples[k];
        // Residual after removing the ISI of each predecessor state.
        for (s, p) in partial.iter_mut().enumerate() {
            let mut z = r;
            let mut rest = s;
            for h in 1..=g {
                z -= fir.tap(h) * values[rest % ORDER];
                rest /= ORDER;
            }
            *p = z;
        }
        ops.mults += (states * g) as u64;
        ops.adds += (states * g) as u64;

        // The 16 predecessors of a state differ only in their oldest symbol.
        for (ns, slot) in next.iter_mut().enumerate() {
            let x = ns % ORDER;
            let mut best = f64::INFINITY;
            let mut arg = 0u8;
            for oldest in 0..ORDER {
                let prev = ns / ORDER + oldest * shift;
                let c = cost[prev] + (partial[prev] - values[x]).norm_sqr();
                if c < best {
                    best = c;
                    arg = oldest as u8;
                }
            }
            *slot = best;
            back[k * states + ns] = arg;
        }
        let branches = (states * ORDER) as u64;
        ops.cost_evals += branches;
        ops.adds += 3 * branches;
        ops.mults += branches;
        ops.comparisons += branches;
        ops.symbols += 1;
        std::mem::swap(&mut cost, &mut next);
    }

    let mut state = 0;
    for s in 1..states {
        if cost[s] < cost[state] {
            state = s;
        }
    }
    ops.comparisons += (states - 1) as u64;
    let mut symbols = vec![QamPoint::from_index(0); n];
    for k in (0..n).rev() {
        symbols[k] = QamPoint::from_index(state % ORDER);
        let oldest = back[k * states + state] as usize;
        state = state / ORDER + oldest * shift;
    }
    Ok(Detection { symbols, ops })
}

/// [`viterbi_mlse`] as a [`Detector`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ViterbiMlse;

impl Detector for ViterbiMlse {
    fn name(&self) -> String {
        "mlse".into()
    }

    fn detect(&self, rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection> {
        viterbi_mlse(rx, preamble)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{propagate, telephone_circuit, Fir, NoiseSource};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symbols(n: usize, rng: &mut ChaCha8Rng) -> Vec<QamPoint> {
        (0..n).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect()
    }

    fn brute_force(rx: &ReceivedSequence, preamble: &[QamPoint]) -> (Vec<QamPoint>, f64) {
        let n = rx.len();
        let fir = rx.fir_at(0);
        let g = fir.memory();
        let mut best = (Vec::new(), f64::INFINITY);
        for code in 0..16usize.pow(n as u32) {
            let seq: Vec<QamPoint> = (0..n).map(|i| QamPoint::from_index(code / 16usize.pow(i as u32) % 16)).collect();
            let mut cost = 0.0;
            for k in 0..n {
                let mut z = rx.samples[k];
                for h in 0..=g {
                    let s = if h <= k {
                        seq[k - h].value()
                    } else {
                        preamble[preamble.len() + k - h].value()
                    };
                    z -= fir.tap(h) * s;
                }
                cost += z.norm_sqr();
            }
            if cost < best.1 {
                best = (seq, cost);
            }
        }
        best
    }

    #[test]
    fn matches_enumeration_on_short_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fir = Fir::from_pairs(&[(1.0, 0.0), (0.9, 0.4), (-0.3, 0.6)]).unwrap();
        for trial in 0..20 {
            let pre = random_symbols(2, &mut rng);
            let tx = random_symbols(3, &mut rng);
            let mut noise = NoiseSource::new(4.0, ChaCha8Rng::seed_from_u64(trial));
            let rx = propagate(&pre, &tx, fir.clone().into(), &mut noise);
            let (oracle, _) = brute_force(&rx, &pre);
            assert_eq!(viterbi_mlse(&rx, &pre).unwrap().symbols, oracle);
        }
    }

    #[test]
    fn noiseless_recovery_and_branch_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pre = random_symbols(2, &mut rng);
        let tx = random_symbols(60, &mut rng);
        let rx = propagate(&pre, &tx, telephone_circuit(3).unwrap().into(), &mut NoiseSource::silent());
        let det = viterbi_mlse(&rx, &pre).unwrap();
        assert_eq!(det.symbols, tx);
        assert_eq!(det.ops.cost_evals, 60 * 16 * 16 * 16);
    }

    #[test]
    fn memory_zero_is_slicing() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let tx = random_symbols(30, &mut rng);
        let rx = propagate(&[], &tx, Fir::identity(0).into(), &mut NoiseSource::silent());
        assert_eq!(viterbi_mlse(&rx, &[]).unwrap().symbols, tx);
    }

    #[test]
    fn budget_and_preamble_checks() {
        let fir = Fir::identity(3);
        let rx = propagate(&[], &[QamPoint::from_index(0)], fir.into(), &mut NoiseSource::silent());
        assert!(matches!(viterbi_mlse(&rx, &[]), Err(Error::StateBudget { .. })));
        let rx = propagate(&[], &[QamPoint::from_index(0)], Fir::identity(2).into(), &mut NoiseSource::silent());
        assert!(matches!(viterbi_mlse(&rx, &[QamPoint::from_index(1)]), Err(Error::Parameter(_))));
    }
}
