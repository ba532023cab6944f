//! A BER sweep written as CSV.

use std::collections::BTreeMap;

use eqlab::channel::ChannelModel;
use eqlab::detectors::DetectorSpec;
use eqlab::harness::{sweep, write_csv, SimSpec};

fn main() {
    let detector = DetectorSpec::by_name("perturb2", &BTreeMap::new()).unwrap();
    let spec = SimSpec::new(ChannelModel::Telephone(3), detector, vec![10.0, 12.0, 14.0, 16.0, 18.0]).with_symbols(50_000);
    let run = sweep(&spec).unwrap();
    print!("{}", write_csv(&run));
    eprintln!("{:.2} s", run.wall_clock_s);
}
