//! Near-MLSE tracker stepped sample by sample, showing the survivor costs.

use eqlab::channel::{noise_variance_for_snr, propagate, telephone_circuit, NoiseSource};
use eqlab::constellation::QamPoint;
use eqlab::detectors::{NearMlseConfig, NearMlseTracker, SPAWN_SCHEDULE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let fir = telephone_circuit(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pre: Vec<QamPoint> = (0..2).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let tx: Vec<QamPoint> = (0..2000).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let mut noise = NoiseSource::new(noise_variance_for_snr(&fir, 16.0), ChaCha8Rng::seed_from_u64(4));
    let rx = propagate(&pre, &tx, fir.clone().into(), &mut noise);

    println!("spawn schedule {SPAWN_SCHEDULE:?}");
    let mut tracker = NearMlseTracker::new(&NearMlseConfig::default(), &pre, fir.memory()).unwrap();
    let mut decided = Vec::new();
    for (k, &r) in rx.samples.iter().enumerate() {
        decided.extend(tracker.step(r, &fir));
        if k == 100 {
            let mut costs: Vec<f64> = tracker.survivors().iter().map(|s| s.cost).collect();
            costs.sort_by(f64::total_cmp);
            let shown: Vec<String> = costs.iter().take(6).map(|c| format!("{c:.2}")).collect();
            println!("after 101 samples, cheapest survivors: {}", shown.join(" "));
        }
    }
    decided.extend(tracker.flush());
    let errors = decided.iter().zip(&tx).filter(|(a, b)| a != b).count();
    let ops = tracker.ops();
    println!("{} symbols, {errors} errors, {} cost evaluations per symbol", decided.len(), ops.cost_evals / tx.len() as u64);
}
