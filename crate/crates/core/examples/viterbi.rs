//! Exact MLSE by the Viterbi algorithm against the DFE.

use eqlab::channel::{noise_variance_for_snr, propagate, telephone_circuit, NoiseSource};
use eqlab::constellation::QamPoint;
use eqlab::detectors::{viterbi_mlse, Detector, Dfe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let fir = telephone_circuit(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pre: Vec<QamPoint> = (0..2).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let tx: Vec<QamPoint> = (0..20_000).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let errors = |s: &[QamPoint]| s.iter().zip(&tx).filter(|(a, b)| a != b).count();
    for snr in [12.0, 15.0, 18.0] {
        let mut noise = NoiseSource::new(noise_variance_for_snr(&fir, snr), ChaCha8Rng::seed_from_u64(6));
        let rx = propagate(&pre, &tx, fir.clone().into(), &mut noise);
        let mlse = viterbi_mlse(&rx, &pre).unwrap();
        let dfe = Dfe.detect(&rx, &pre).unwrap();
        println!(
            "{snr} dB: mlse {} errors ({} cost evals/symbol), dfe {} errors",
            errors(&mlse.symbols),
            mlse.ops.cost_evals / tx.len() as u64,
            errors(&dfe.symbols)
        );
    }
}
