//! Near-maximum-likelihood detection with the 16-8-16 survivor schedule.
//!
//! Sixteen stored vectors are carried from sample to sample. Each sample:
//!
//! * every stored vector is extended by its best next symbol (the slice of
//!   `rᵢ − Σ_{h≥1} yₕ qᵢ₋ₕ`), its cost growing by the squared residual;
//! * the 16 extensions are ranked by cost. The two best also spawn the
//!   extensions by their 2nd–4th best symbols, the 3rd and 4th best spawn
//!   the extension by their 2nd best symbol, and ranks 9–16 are dropped;
//! * the 8 best extensions and the 8 spawned vectors are stored (16 vectors
//!   from 24 evaluated costs).
//!
//! The oldest symbol of the cheapest vector is released once vectors span
//! `decision_delay` symbols.

use num_complex::Complex64;

use super::{Detection, Detector, OpCounts};
use crate::channel::{Fir, ReceivedSequence};
use crate::constellation::{slice, QamPoint, LEVELS, ORDER};
use crate::error::{Error, Result};

/// Vectors kept between samples.
pub const STORED_COUNT: usize = 16;

/// Extra extensions spawned by the vectors ranked 1st, 2nd, … after the
/// first extension round (the "8" of 16-8-16).
pub const SPAWN_SCHEDULE: [usize; 4] = [3, 3, 1, 1];

/// Cost evaluations per sample.
const EVALUATIONS: usize = STORED_COUNT + 8;

/// Window capacity of a vector; bounds the decision delay.
const WINDOW: usize = 64;

/// Marker for "no symbol" (zero) positions before the preamble.
const ZERO_SLOT: u8 = ORDER as u8;

#[inline]
fn slot_value(slot: u8) -> Complex64 {
    if slot == ZERO_SLOT {
        Complex64::new(0.0, 0.0)
    } else {
        QamPoint::from_index(slot as usize).value()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearMlseConfig {
    /// Symbols spanned by each stored vector; the oldest is released as the
    /// decision.
    pub decision_delay: usize,
}

impl Default for NearMlseConfig {
    fn default() -> Self {
        Self { decision_delay: 16 }
    }
}

impl NearMlseConfig {
    /// Checks the delay against channel memory `g`.
    pub fn validate(&self, g: usize) -> Result<()> {
        let d = self.decision_delay;
        if d < g + 1 || d == 0 {
            return Err(Error::Parameter(format!("near-MLSE decision delay {d} must be at least g+1 = {}", g + 1)));
        }
        if d > WINDOW {
            return Err(Error::Parameter(format!("near-MLSE decision delay {d} exceeds {WINDOW}")));
        }
        Ok(())
    }
}

/// A stored vector as seen from outside: its window of symbols and costs.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivorVector {
    /// Symbol values for the window ending at the latest sample, oldest
    /// first. Positions before the transmission are zero.
    pub symbols: Vec<Complex64>,
    /// Cumulative squared residual.
    pub cost: f64,
    /// Squared residual added at the latest sample.
    pub last_increment: f64,
}

#[derive(Clone, Copy)]
struct Path {
    /// Ring buffer indexed by `time mod WINDOW`.
    ring: [u8; WINDOW],
    cost: f64,
    increment: f64,
}

/// Position of `time` (which may be negative) in a ring.
#[inline]
fn ring_pos(time: i64) -> usize {
    time.rem_euclid(WINDOW as i64) as usize
}

/// Per-axis level indices ordered by distance from `x` (nearest first).
#[inline]
fn axis_order(x: f64) -> [usize; 4] {
    let dist = |l: usize| (x - LEVELS[l] as f64).abs();
    let first = if x < -2.0 {
        0
    } else if x < 0.0 {
        1
    } else if x < 2.0 {
        2
    } else {
        3
    };
    let mut order = [first; 4];
    let (mut lo, mut hi) = (first as isize - 1, first + 1);
    for slot in order.iter_mut().skip(1) {
        let take_lo = if lo < 0 {
            false
        } else if hi > 3 {
            true
        } else {
            dist(lo as usize) <= dist(hi)
        };
        if take_lo {
            *slot = lo as usize;
            lo -= 1;
        } else {
            *slot = hi;
            hi += 1;
        }
    }
    order
}

/// The 2nd, 3rd and 4th nearest points to `z` with their squared distances,
/// nearest first. Only pairs of per-axis ranks `(i, j)` with `i·j ≤ 4` can
/// occupy the first four places, so those eight are ranked.
fn next_nearest(z: Complex64, ops: &mut OpCounts) -> [(QamPoint, f64); 3] {
    const PAIRS: [(usize, usize); 7] = [(0, 1), (1, 0), (1, 1), (0, 2), (2, 0), (0, 3), (3, 0)];
    let re = axis_order(z.re);
    let im = axis_order(z.im);
    let dre: [f64; 4] = re.map(|l| (z.re - LEVELS[l] as f64).powi(2));
    let dim: [f64; 4] = im.map(|l| (z.im - LEVELS[l] as f64).powi(2));
    // 2 × (4 subtractions, 4 squares), 3 threshold picks per axis.
    ops.adds += 8;
    ops.mults += 8;
    ops.comparisons += 6;

    let mut cands: [(QamPoint, f64); 7] = PAIRS.map(|(i, j)| (QamPoint::from_index(re[i] * 4 + im[j]), dre[i] + dim[j]));
    ops.adds += 7;
    // Three selection passes over 7, 6 and 5 entries.
    for pos in 0..3 {
        for j in pos + 1..7 {
            let (a, b) = (cands[pos], cands[j]);
            if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                cands.swap(pos, j);
            }
        }
    }
    ops.comparisons += 6 + 5 + 4;
    [cands[0], cands[1], cands[2]]
}

/// Batcher odd-even merge sort comparators for 16 keys.
fn sorting_network() -> &'static [(usize, usize)] {
    use std::sync::OnceLock;
    static NETWORK: OnceLock<Vec<(usize, usize)>> = OnceLock::new();
    NETWORK.get_or_init(|| {
        let n = STORED_COUNT;
        let mut pairs = Vec::new();
        let mut p = 1;
        while p < n {
            let mut k = p;
            while k >= 1 {
                let mut j = k % p;
                while j + k < n {
                    for i in 0..k.min(n - j - k) {
                        if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                            pairs.push((i + j, i + j + k));
                        }
                    }
                    j += 2 * k;
                }
                k /= 2;
            }
            p *= 2;
        }
        pairs
    })
}

/// Step-by-step near-MLSE state.
#[derive(Clone)]
pub struct NearMlseTracker {
    delay: usize,
    g: usize,
    /// Index of the next sample.
    time: i64,
    paths: Vec<Path>,
    ops: OpCounts,
}

impl NearMlseTracker {
    /// Starts from the known preamble; one vector holds it at zero cost and
    /// the others start empty (infinite cost).
    pub fn new(config: &NearMlseConfig, preamble: &[QamPoint], g: usize) -> Result<Self> {
        config.validate(g)?;
        let mut ring = [ZERO_SLOT; WINDOW];
        for (i, p) in preamble.iter().rev().take(WINDOW).enumerate() {
            ring[ring_pos(-(i as i64) - 1)] = p.index() as u8;
        }
        let mut paths = vec![Path { ring, cost: f64::INFINITY, increment: 0.0 }; STORED_COUNT];
        paths[0].cost = 0.0;
        Ok(Self { delay: config.decision_delay, g, time: 0, paths, ops: OpCounts::default() })
    }

    pub fn ops(&self) -> OpCounts {
        self.ops
    }

    /// Processes sample `r` received through `fir`; returns the released
    /// decision (for time `t − D + 1`) once the window is full.
    pub fn step(&mut self, r: Complex64, fir: &Fir) -> Option<QamPoint> {
        let t = self.time;
        let g = fir.memory().min(self.g);
        let ops = &mut self.ops;

        // First round: best extension of every stored vector.
        let mut residual = [Complex64::new(0.0, 0.0); STORED_COUNT];
        let mut ext = [(0.0f64, 0u8, 0.0f64); STORED_COUNT];
        for (j, path) in self.paths.iter().enumerate() {
            let mut z = r;
            for h in 1..=g {
                z -= fir.tap(h) * slot_value(path.ring[ring_pos(t - h as i64)]);
            }
            let best = slice(z);
            let inc = (z - best.value()).norm_sqr();
            residual[j] = z;
            ext[j] = (path.cost + inc, best.index() as u8, inc);
        }
        ops.mults += (g * STORED_COUNT) as u64;
        ops.adds += (g * STORED_COUNT) as u64;
        ops.comparisons += crate::constellation::SLICE_COMPARISONS * STORED_COUNT as u64;
        // residual, squared magnitude, accumulation
        ops.adds += 3 * STORED_COUNT as u64;
        ops.mults += STORED_COUNT as u64;

        // Rank by (cost, slot).
        let mut rank: [usize; STORED_COUNT] = std::array::from_fn(|i| i);
        for &(a, b) in sorting_network() {
            let (ia, ib) = (rank[a], rank[b]);
            if ext[ib].0 < ext[ia].0 || (ext[ib].0 == ext[ia].0 && ib < ia) {
                rank.swap(a, b);
            }
        }
        ops.comparisons += sorting_network().len() as u64;

        let mut next: Vec<Path> = Vec::with_capacity(STORED_COUNT);
        for &j in &rank[..STORED_COUNT - 8] {
            let mut p = self.paths[j];
            p.ring[ring_pos(t)] = ext[j].1;
            p.cost = ext[j].0;
            p.increment = ext[j].2;
            next.push(p);
        }
        for (place, &extra) in SPAWN_SCHEDULE.iter().enumerate() {
            let j = rank[place];
            let alternatives = next_nearest(residual[j], ops);
            for &(sym, inc) in alternatives.iter().take(extra) {
                let mut p = self.paths[j];
                p.ring[ring_pos(t)] = sym.index() as u8;
                p.cost = self.paths[j].cost + inc;
                p.increment = inc;
                ops.adds += 1;
                next.push(p);
            }
        }
        debug_assert_eq!(next.len(), STORED_COUNT);
        ops.cost_evals += EVALUATIONS as u64;
        ops.symbols += 1;
        self.paths = next;
        self.time += 1;

        let released = t - self.delay as i64 + 1;
        if released < 0 {
            return None;
        }
        let best = self.best_path();
        let decided = self.paths[best].ring[ring_pos(released)];
        let ops = &mut self.ops;
        ops.comparisons += (STORED_COUNT - 1) as u64;
        // Survivors that disagree on the released symbol inherit it.
        for p in self.paths.iter_mut() {
            p.ring[ring_pos(released)] = decided;
        }
        ops.comparisons += STORED_COUNT as u64;
        Some(QamPoint::from_index(decided as usize))
    }

    fn best_path(&self) -> usize {
        let mut best = 0;
        for (j, p) in self.paths.iter().enumerate().skip(1) {
            if p.cost < self.paths[best].cost {
                best = j;
            }
        }
        best
    }

    /// Symbols of the cheapest vector not yet released, oldest first.
    pub fn flush(&self) -> Vec<QamPoint> {
        let best = &self.paths[self.best_path()];
        let first = (self.time - self.delay as i64 + 1).max(0);
        (first..self.time).map(|t| QamPoint::from_index(best.ring[ring_pos(t)] as usize)).collect()
    }

    /// The stored vectors with windows ending at the latest sample.
    pub fn survivors(&self) -> Vec<SurvivorVector> {
        let last = self.time - 1;
        self.paths
            .iter()
            .map(|p| SurvivorVector {
                symbols: (last - self.delay as i64 + 1..=last).map(|t| slot_value(p.ring[ring_pos(t)])).collect(),
                cost: p.cost,
                last_increment: p.increment,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct NearMlse {
    config: NearMlseConfig,
}

impl NearMlse {
    pub fn new(config: NearMlseConfig) -> Self {
        Self { config }
    }
}

impl Detector for NearMlse {
    fn name(&self) -> String {
        "near-mlse".into()
    }

    fn detect(&self, rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection> {
        let mut tracker = NearMlseTracker::new(&self.config, preamble, rx.track.memory())?;
        let mut symbols = Vec::with_capacity(rx.len());
        for (k, &r) in rx.samples.iter().enumerate() {
            if let Some(d) = tracker.step(r, rx.fir_at(k)) {
                symbols.push(d);
            }
        }
        symbols.extend(tracker.flush());
        debug_assert_eq!(symbols.len(), rx.len());
        Ok(Detection { symbols, ops: tracker.ops() })
    }
}
