//! End-to-end acceptance checks. Each test prints one `criterion N:` line
//! with its verdict; run with `--nocapture` to see them all.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use eqlab::channel::{
    propagate, telephone_circuit, ChannelModel, Fir, MobileChannelConfig, NoiseSource, ReceivedSequence, CATALOGUE,
    noise_variance_for_snr,
};
use eqlab::constellation::QamPoint;
use eqlab::detectors::{viterbi_mlse, DetectorSpec, REGISTRY};
use eqlab::harness::{advantage_db, ops_report, sweep, sweep_serial, write_csv, Advantage, BerPoint, RunResult, SimSpec};

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

fn spec(channel: ChannelModel, detector: &str, snr: Vec<f64>, symbols: usize) -> SimSpec {
    SimSpec::new(channel, DetectorSpec::by_name(detector, &BTreeMap::new()).unwrap(), snr)
        .with_symbols(symbols)
        .with_paired(true)
}

fn tc(id: u8) -> ChannelModel {
    ChannelModel::Telephone(id)
}

fn run(channel: ChannelModel, detector: &str, snr: Vec<f64>, symbols: usize) -> RunResult {
    sweep(&spec(channel, detector, snr, symbols)).unwrap()
}

fn fmt(a: &Advantage) -> String {
    format!("{:+.2} ± {:.2} dB", a.db, a.stderr_db)
}

fn verdict(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_1_perturbation_advantages_on_telephone_circuits() {
    const SYMBOLS: usize = 1_000_000;
    const TARGET: f64 = 1e-2;
    let grids = [(1, grid(10.0, 17.0, 0.5)), (2, grid(17.0, 28.0, 0.5)), (3, grid(11.0, 18.0, 0.5)), (4, grid(10.0, 17.0, 0.5))];
    let mut ok = true;
    let mut detail = Vec::new();
    for (id, snr) in grids {
        let dfe = run(tc(id), "dfe", snr.clone(), SYMBOLS);
        let p1 = run(tc(id), "perturb1", snr.clone(), SYMBOLS);
        let p2 = run(tc(id), "perturb2", snr, SYMBOLS);
        let a1 = advantage_db(&p1.points, &dfe.points, TARGET).unwrap();
        let a2 = advantage_db(&p2.points, &dfe.points, TARGET).unwrap();
        let pass = match id {
            1 => (a1.db - 0.5).abs() <= 0.5 && (a2.db - 1.0).abs() <= 0.5,
            2 => (a1.db - 1.0).abs() <= 0.75 && (a2.db - 2.0).abs() <= 0.75,
            3 => (a1.db - 1.5).abs() <= 0.75 && (a2.db - 2.0).abs() <= 0.75,
            _ => a1.db >= 1.0 && a2.db >= a1.db,
        };
        ok &= pass;
        detail.push(format!("tc{id} perturb1 {} perturb2 {} [{}]", fmt(&a1), fmt(&a2), if pass { "ok" } else { "miss" }));
    }
    verdict(1, ok, &detail.join("; "));
}

#[test]
fn criterion_2_near_mlse_advantages() {
    const SYMBOLS: usize = 1_000_000;
    const TARGET: f64 = 1e-3;
    let cases = [(1, grid(13.0, 19.0, 0.5), 2.5), (2, grid(17.0, 29.0, 0.5), 4.0)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (id, snr, expected) in cases {
        let dfe = run(tc(id), "dfe", snr.clone(), SYMBOLS);
        let nm = run(tc(id), "near-mlse", snr, SYMBOLS);
        let a = advantage_db(&nm.points, &dfe.points, TARGET).unwrap();
        let pass = (a.db - expected).abs() <= 1.0;
        ok &= pass;
        detail.push(format!("tc{id} near-mlse {} (expected {expected:+}) [{}]", fmt(&a), if pass { "ok" } else { "miss" }));
    }
    verdict(2, ok, &detail.join("; "));
}

#[test]
fn criterion_3_mobile_channel() {
    const SYMBOLS: usize = 400_000;
    const TARGET: f64 = 1e-3;
    let snr = grid(10.0, 31.0, 1.5);
    let mut within = true;
    let mut ordered = true;
    let mut detail = Vec::new();
    for (speed, e1, enm) in [(3.0, 0.9, 4.2), (60.0, 0.5, 2.7)] {
        let cfg = MobileChannelConfig { speed_kmh: speed, ..Default::default() };
        assert!(SYMBOLS / cfg.block_length >= 200);
        let mobile = |d: &str| {
            let mut s = spec(ChannelModel::Mobile(cfg.clone()), d, snr.clone(), SYMBOLS);
            s.block_length = 256;
            sweep(&s).unwrap()
        };
        let dfe = mobile("dfe");
        let p1 = mobile("perturb1");
        let nm = mobile("near-mlse");
        let a1 = advantage_db(&p1.points, &dfe.points, TARGET).unwrap();
        let anm = advantage_db(&nm.points, &dfe.points, TARGET).unwrap();
        within &= (a1.db - e1).abs() <= 1.5 && (anm.db - enm).abs() <= 1.5;
        ordered &= anm.db > a1.db && a1.db > 0.0;
        detail.push(format!("{speed} km/h perturb1 {} near-mlse {}", fmt(&a1), fmt(&anm)));
    }
    let how = if within { "within tolerance" } else if ordered { "ordering near-mlse > perturb1 > 0 holds" } else { "ordering violated" };
    verdict(3, within || ordered, &format!("{}; {how}", detail.join("; ")));
}

#[test]
fn criterion_4_optimality_sandwich() {
    const SYMBOLS: usize = 100_000;
    let order = ["mlse", "near-mlse", "perturb2", "perturb1", "dfe"];
    let grids = [
        (1, vec![10.0, 12.0, 14.0, 16.0, 18.0]),
        (2, vec![18.0, 20.0, 22.0, 24.0, 26.0]),
        (3, vec![10.0, 12.0, 14.0, 16.0, 18.0]),
        (4, vec![10.0, 12.0, 14.0, 16.0, 18.0]),
    ];
    let mut violations = Vec::new();
    for (id, snr) in grids {
        let curves: Vec<RunResult> = order.iter().map(|d| run(tc(id), d, snr.clone(), SYMBOLS)).collect();
        for pair in curves.windows(2) {
            for (lo, hi) in pair[0].points.iter().zip(&pair[1].points) {
                let bound = 2.0 * lo.stderr().hypot(hi.stderr());
                if lo.ber > hi.ber + bound {
                    violations.push(format!(
                        "tc{id} {} dB: {} {} > {} {}",
                        lo.snr_db, pair[0].detector, lo.ber, pair[1].detector, hi.ber
                    ));
                }
            }
        }
    }
    verdict(4, violations.is_empty(), &format!("{} violations {}", violations.len(), violations.join("; ")));
}

/// Exact sequence minimization by depth-first enumeration, pruning partial
/// costs that already exceed the best complete one.
fn enumerate_best(rx: &ReceivedSequence, preamble: &[QamPoint]) -> (f64, Vec<QamPoint>) {
    fn dfs(k: usize, rx: &ReceivedSequence, prev: Complex64, cur: &mut Vec<QamPoint>, cost: f64, best: &mut (f64, Vec<QamPoint>)) {
        if cost >= best.0 {
            return;
        }
        if k == rx.len() {
            *best = (cost, cur.clone());
            return;
        }
        let fir = rx.fir_at(k);
        let isi = rx.samples[k] - fir.tap(1) * prev;
        for i in 0..16 {
            let x = QamPoint::from_index(i);
            cur.push(x);
            dfs(k + 1, rx, x.value(), cur, cost + (isi - fir.tap(0) * x.value()).norm_sqr(), best);
            cur.pop();
        }
    }
    let mut best = (f64::INFINITY, Vec::new());
    dfs(0, rx, preamble.last().unwrap().value(), &mut Vec::new(), 0.0, &mut best);
    best
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for instance in 0..100 {
        let fir = Fir::from_pairs(&[(1.0, 0.0), (rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2))]).unwrap();
        let pre = vec![QamPoint::from_index(rng.random_range(0..16))];
        let tx: Vec<QamPoint> = (0..6).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
        let mut noise = NoiseSource::new(1.0, ChaCha8Rng::seed_from_u64(1000 + instance));
        let rx = propagate(&pre, &tx, fir.into(), &mut noise);
        let (_, best) = enumerate_best(&rx, &pre);
        if viterbi_mlse(&rx, &pre).unwrap().symbols != best {
            mismatches += 1;
        }
    }

    let fir = telephone_circuit(4).unwrap();
    let pre: Vec<QamPoint> = (0..2).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let tx: Vec<QamPoint> = (0..10_000).map(|_| QamPoint::from_index(rng.random_range(0..16))).collect();
    let mut noise = NoiseSource::new(noise_variance_for_snr(&fir, 30.0), ChaCha8Rng::seed_from_u64(55));
    let rx = propagate(&pre, &tx, fir.into(), &mut noise);
    let mlse = viterbi_mlse(&rx, &pre).unwrap().symbols;
    let agreement = |name: &str| {
        let out = DetectorSpec::by_name(name, &BTreeMap::new()).unwrap().build().detect(&rx, &pre).unwrap().symbols;
        out.iter().zip(&mlse).filter(|(a, b)| a == b).count() as f64 / mlse.len() as f64
    };
    let (nm, p2) = (agreement("near-mlse"), agreement("perturb2"));
    verdict(
        5,
        mismatches == 0 && nm >= 0.99 && p2 >= 0.99,
        &format!("brute force mismatches {mismatches}/100; agreement near-mlse {nm:.4} perturb2 {p2:.4}"),
    );
}

#[test]
fn criterion_6_complexity() {
    let names = ["dfe", "perturb1", "perturb2", "near-mlse"];
    let mut ok = true;
    let mut detail = Vec::new();
    for channel in ["tc1", "tc2", "gsm"] {
        let specs: Vec<SimSpec> =
            names.iter().map(|d| spec(ChannelModel::by_name(channel).unwrap(), d, vec![16.0], 20_000)).collect();
        let rows = ops_report(&specs).unwrap();
        let totals: Vec<f64> = rows.iter().map(|r| r.per_symbol.total).collect();
        let evals_exact = rows[0].per_symbol.cost_evals == 1.0 && rows[3].per_symbol.cost_evals == 24.0;
        let ordered = totals.windows(2).all(|w| w[0] < w[1]);
        let ratio = totals[3] / totals[0];
        ok &= evals_exact && ordered && ratio >= 10.0;
        detail.push(format!(
            "{channel} totals {:.0}/{:.0}/{:.0}/{:.0} ratio {ratio:.1} evals {}/{}",
            totals[0], totals[1], totals[2], totals[3], rows[0].per_symbol.cost_evals, rows[3].per_symbol.cost_evals
        ));
    }
    verdict(6, ok, &detail.join("; "));
}

#[test]
fn criterion_7_noiseless_floor() {
    let mut failures = Vec::new();
    for channel in CATALOGUE {
        for detector in REGISTRY {
            let r = run(ChannelModel::by_name(channel).unwrap(), detector, vec![f64::INFINITY], 10_000);
            if r.points[0].bit_errors != 0 {
                failures.push(format!("{channel}/{detector}: {} errors", r.points[0].bit_errors));
            }
        }
    }
    let combos = CATALOGUE.len() * REGISTRY.len();
    verdict(7, failures.is_empty(), &format!("{combos} channel/detector pairs {}", failures.join("; ")));
}

fn q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[test]
fn criterion_8_awgn_calibration() {
    let mut ok = true;
    let mut detail = Vec::new();
    for sigma2 in [0.2, 0.5, 1.0] {
        let s = (sigma2 / 2.0f64).sqrt();
        let oracle = (3.0 * q(1.0 / s) + 2.0 * q(3.0 / s) - q(5.0 / s)) / 4.0;
        let snr = 10.0 * (10.0 / sigma2).log10();
        let p: BerPoint = run(ChannelModel::by_name("ideal").unwrap(), "dfe", vec![snr], 1_000_000).points.remove(0);
        let z = (p.ber - oracle) / p.stderr();
        ok &= z.abs() <= 3.0;
        detail.push(format!("σ²={sigma2}: {:.6} vs {oracle:.6} ({z:+.2} SE)", p.ber));
    }
    verdict(8, ok, &detail.join("; "));
}

#[test]
fn criterion_9_determinism() {
    let cases = [
        spec(tc(2), "perturb2", vec![18.0, 22.0, 26.0], 30_000),
        spec(ChannelModel::by_name("gsm").unwrap(), "near-mlse", vec![15.0, 25.0], 30_000),
        spec(tc(3), "mlse", vec![14.0], 8_000).with_paired(false),
    ];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut ok = true;
    for s in &cases {
        let first = write_csv(&sweep(s).unwrap());
        let again = write_csv(&sweep(s).unwrap());
        let serial = write_csv(&sweep_serial(s).unwrap());
        let pooled = write_csv(&pool.install(|| sweep(s)).unwrap());
        ok &= first == again && first == serial && first == pooled;
    }
    verdict(9, ok, &format!("{} configurations, rerun/serial/4-thread outputs byte-identical: {ok}", cases.len()));
}
