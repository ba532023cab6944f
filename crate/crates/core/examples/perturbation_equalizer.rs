//! Perturbation equalizer on circuit 2: greedy block decisions, neighbor
//! descent, then delayed per-symbol decisions.

use eqlab::channel::{noise_variance_for_snr, propagate, telephone_circuit, NoiseSource};
use eqlab::constellation::QamPoint;
use eqlab::detectors::{greedy_block_search, neighbor_descent, Detector, Dfe, Perturb, PerturbConfig, SearchMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let fir = telephone_circuit(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pre: Vec<QamPoint> = (0..2).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let tx: Vec<QamPoint> = (0..4000).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let mut noise = NoiseSource::new(noise_variance_for_snr(&fir, 24.0), ChaCha8Rng::seed_from_u64(2));
    let rx = propagate(&pre, &tx, fir.into(), &mut noise);

    let greedy = greedy_block_search(&rx, &pre);
    let refined = neighbor_descent(&greedy, &rx, &pre, 8);
    println!("block error: greedy {:.1}, after descent {:.1}", greedy.total_error, refined.total_error);

    let errors = |s: &[QamPoint]| s.iter().zip(&tx).filter(|(a, b)| a != b).count();
    println!("dfe        {} symbol errors", errors(&Dfe.detect(&rx, &pre).unwrap().symbols));
    for delay in [1, 2] {
        for mode in [SearchMode::Neighbor, SearchMode::Full] {
            let det = Perturb::new(PerturbConfig { delay, mode, ..Default::default() });
            let out = det.detect(&rx, &pre).unwrap();
            println!("{:<10} {mode:?}: {} symbol errors", det.name(), errors(&out.symbols));
        }
    }
}
