use num_complex::Complex64;

use super::{preamble_tail, Detection, Detector, OpCounts};
use crate::channel::{Fir, ReceivedSequence};
use crate::constellation::{slice, QamPoint};
use crate::error::Result;

/// Feedback history `s'ₖ₋₁ … s'ₖ₋g` of a decision-feedback equalizer.
#[derive(Debug, Clone)]
pub struct DfeState {
    /// Oldest first.
    history: Vec<Complex64>,
}

impl DfeState {
    pub fn new(preamble: &[QamPoint], g: usize) -> Self {
        Self { history: preamble_tail(preamble, g) }
    }

    /// Oldest first; always exactly `g` entries.
    pub fn history(&self) -> &[Complex64] {
        &self.history
    }

    /// ISI estimate `f'ₖ = Σ_{h=1..g} s'ₖ₋ₕ yₕ`.
    pub fn isi(&self, fir: &Fir, ops: &mut OpCounts) -> Complex64 {
        let g = self.history.len();
        let mut f = Complex64::new(0.0, 0.0);
        for h in 1..=g {
            f += fir.tap(h) * self.history[g - h];
        }
        ops.mults += g as u64;
        ops.adds += g.saturating_sub(1) as u64;
        f
    }

    pub fn push(&mut self, decision: Complex64) {
        if !self.history.is_empty() {
            self.history.rotate_left(1);
            *self.history.last_mut().unwrap() = decision;
        }
    }

    /// Detects one sample: `eₖ = rₖ − f'ₖ`, decision `slice(eₖ)`.
    pub fn step(&mut self, r: Complex64, fir: &Fir, ops: &mut OpCounts) -> QamPoint {
        let e = r - self.isi(fir, ops);
        let d = slice(e);
        ops.adds += 1;
        ops.slice();
        ops.cost_evals += 1;
        ops.symbols += 1;
        self.push(d.value());
        d
    }
}

/// Conventional decision-feedback equalizer with exact feedback taps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dfe;

impl Detector for Dfe {
    fn name(&self) -> String {
        "dfe".into()
    }

    fn detect(&self, rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection> {
        let mut state = DfeState::new(preamble, rx.track.memory());
        let mut ops = OpCounts::default();
        let symbols = rx.samples.iter().enumerate().map(|(k, &r)| state.step(r, rx.fir_at(k), &mut ops)).collect();
        Ok(Detection { symbols, ops })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{propagate, NoiseSource};

    fn q(re: i8, im: i8) -> QamPoint {
        QamPoint::new(re, im).unwrap()
    }

    #[test]
    fn identity_channel_is_transparent() {
        let tx: Vec<QamPoint> = (0..16).map(QamPoint::from_index).collect();
        let rx = propagate(&[], &tx, Fir::identity(2).into(), &mut NoiseSource::silent());
        assert_eq!(Dfe.detect(&rx, &[]).unwrap().symbols, tx);
    }

    #[test]
    fn feedback_cancels_known_isi() {
        let fir = Fir::from_pairs(&[(1.0, 0.0), (0.5, 0.0)]).unwrap();
        let mut state = DfeState::new(&[q(3, 1)], 1);
        let r = Complex64::new(2.5, -0.5);
        let mut ops = OpCounts::default();
        let e = r - state.isi(&fir, &mut ops);
        assert_eq!(e, Complex64::new(1.0, -1.0));
        assert_eq!(state.step(r, &fir, &mut ops), q(1, -1));
        assert_eq!(state.history(), &[q(1, -1).value()]);
    }

    #[test]
    fn one_cost_evaluation_per_symbol() {
        let tx: Vec<QamPoint> = (0..40).map(|i| QamPoint::from_index(i % 16)).collect();
        let fir = crate::channel::telephone_circuit(1).unwrap();
        let rx = propagate(&[], &tx, fir.into(), &mut NoiseSource::silent());
        let det = Dfe.detect(&rx, &[]).unwrap();
        assert_eq!(det.symbols, tx);
        assert_eq!(det.ops.cost_evals, 40);
        assert_eq!(det.ops.symbols, 40);
    }
}
