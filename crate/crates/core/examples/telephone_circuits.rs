//! The four telephone circuits: raw and normalized taps, zeros and
//! magnitude responses.

use std::f64::consts::PI;

use eqlab::channel::{minimum_phase, sig6, telephone_circuit, telephone_circuit_raw};

fn main() {
    for id in 1..=4 {
        let raw = telephone_circuit_raw(id).unwrap();
        let fir = telephone_circuit(id).unwrap();
        println!("tc{id}");
        println!("  raw         {raw}");
        println!("  normalized  {fir}");
        let zeros: Vec<String> = fir.zeros().iter().map(|z| sig6(z.norm())).collect();
        println!("  |zeros|     {}  minimum phase: {}", zeros.join(", "), fir.is_minimum_phase());
        if !fir.is_minimum_phase() {
            println!("  reflected   {}", minimum_phase(&fir).unwrap());
        }
        let mags: Vec<String> = (0..8).map(|i| format!("{:.3}", fir.response(PI * i as f64 / 8.0).norm())).collect();
        println!("  |Y(w)|      {}", mags.join(" "));
    }
}
