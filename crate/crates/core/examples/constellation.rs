//! The 16-QAM alphabet: Gray labels, neighbors and slicing.

use eqlab::constellation::{bits_to_symbols, build_constellation, slice, symbols_to_bits};
use num_complex::Complex64;

fn main() {
    let qam = build_constellation();
    println!("mean energy {}", qam.mean_energy());
    for im in [3, 1, -1, -3] {
        let row: Vec<String> = qam
            .points()
            .iter()
            .filter(|p| p.im() == im)
            .map(|p| format!("{:+}{:+}j:{:04b}", p.re(), p.im(), p.label()))
            .collect();
        println!("{}", row.join("  "));
    }

    let corner = qam.points()[0];
    let names: Vec<String> = qam.neighbors(corner).iter().map(|n| format!("{:+}{:+}j", n.re(), n.im())).collect();
    println!("neighbors of {:+}{:+}j: {}", corner.re(), corner.im(), names.join(", "));

    let z = Complex64::new(1.7, -2.4);
    let p = slice(z);
    println!("{z} slices to {:+}{:+}j", p.re(), p.im());

    let bits = [1, 0, 1, 1, 0, 0, 1, 0];
    let symbols = bits_to_symbols(&bits).unwrap();
    assert_eq!(symbols_to_bits(&symbols), bits);
    println!("bits {bits:?} map to {} symbols and back", symbols.len());
}
