//! SNR advantage of near-MLSE and perturbation over DFE on circuit 2, with
//! paired bits and noise.

use std::collections::BTreeMap;

use eqlab::channel::ChannelModel;
use eqlab::detectors::DetectorSpec;
use eqlab::harness::{advantage_db, crossing_snr, sweep, SimSpec};

fn main() {
    let snr: Vec<f64> = (0..=12).map(|i| 17.0 + i as f64).collect();
    let curve = |name: &str| {
        let det = DetectorSpec::by_name(name, &BTreeMap::new()).unwrap();
        sweep(&SimSpec::new(ChannelModel::Telephone(2), det, snr.clone()).with_symbols(100_000).with_paired(true))
            .unwrap()
    };
    let dfe = curve("dfe");
    let target = 1e-2;
    let (s, sd) = crossing_snr(&dfe.points, target).unwrap();
    println!("dfe reaches {target} at {s:.2} ± {sd:.2} dB");
    for name in ["perturb1", "perturb2", "near-mlse"] {
        let adv = advantage_db(&curve(name).points, &dfe.points, target).unwrap();
        println!("{name:<10} {:+.2} ± {:.2} dB", adv.db, adv.stderr_db);
    }
}
