//! Per-symbol operation counts of each detector.

use std::collections::BTreeMap;

use eqlab::channel::ChannelModel;
use eqlab::detectors::DetectorSpec;
use eqlab::harness::{ops_report, OpsRow, SimSpec};

fn main() {
    let specs: Vec<SimSpec> = ["dfe", "perturb1", "perturb2", "near-mlse", "mlse"]
        .iter()
        .map(|d| {
            let det = DetectorSpec::by_name(d, &BTreeMap::new()).unwrap();
            SimSpec::new(ChannelModel::Telephone(2), det, vec![16.0]).with_symbols(10_000)
        })
        .collect();
    print!("{}", OpsRow::table(&ops_report(&specs).unwrap()));
}
