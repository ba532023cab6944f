//! Block-fading mobile channel: per-path Rayleigh gains and the resulting
//! minimum-phase taps.

use eqlab::channel::{mobile_channel, rayleigh_process, sig6, MobileChannelConfig};

fn main() {
    for speed in [3.0, 60.0] {
        let cfg = MobileChannelConfig { speed_kmh: speed, ..Default::default() };
        println!("{speed} km/h: doppler {} Hz, block {} s", sig6(cfg.doppler_hz()), sig6(cfg.block_duration_s()));

        let gains = rayleigh_process(&cfg, 0, 7, 20_000).unwrap();
        let power = gains.iter().map(|g| g.norm_sqr()).sum::<f64>() / gains.len() as f64;
        println!("  path 0 mean |R|^2 {} (target {})", sig6(power), sig6(cfg.rayleigh_mean_power()));

        for (i, block) in mobile_channel(&cfg, 7, 4).unwrap().iter().enumerate() {
            println!("  block {i}: taps {}  scale |{}|", block.fir, sig6(block.scale.norm()));
        }
    }
}
