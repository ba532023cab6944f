//! Nonlinear equalizer with perturbation search and one- or two-sample
//! decision delay.
//!
//! Detection runs block by block:
//!
//! 1. **Greedy search.** Each symbol of the block is taken as the alphabet
//!    point minimizing `|rₖ − sₖ − Σ_{h≥1} yₕ sₖ₋ₕ|²` given the symbols
//!    already chosen. With `y₀ = 1` that is a slice of the DFE output.
//! 2. **Neighbor descent.** Forward sweeps over the block try each symbol's
//!    axis neighbors and keep the substitution that lowers the block's total
//!    squared residual the most, until a sweep changes nothing.
//! 3. **Delayed decision.** For every `k` the equalized signals
//!    `eₖ, eₖ,ₖ₊₁ (, eₖ,ₖ₊₂)` are formed from the final past decisions and
//!    `sₖ` is chosen to minimize the delayed cost `c₁,ₖ` (or `c₂,ₖ`) over a
//!    candidate set selected by [`SearchMode`]. The block estimate from
//!    steps 1–2 contributes its own symbol to the neighbor candidate set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{preamble_tail, Detection, Detector, OpCounts};
use crate::channel::ReceivedSequence;
use crate::constellation::{slice, QamPoint, ORDER};
use crate::error::{Error, Result};

/// Candidate set searched at each delayed decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// `slice(eₖ)`, its axis neighbors and the block-estimate symbol; with
    /// delay 2, `xₖ₊₁` likewise ranges over its slice and neighbors.
    #[default]
    Neighbor,
    /// All 16 values of `xₖ`.
    Full,
    /// All 16 × 16 pairs `(xₖ, xₖ₊₁)`; delay 2 only.
    Exhaustive,
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neighbor" => Ok(SearchMode::Neighbor),
            "full" => Ok(SearchMode::Full),
            "exhaustive" => Ok(SearchMode::Exhaustive),
            _ => Err(Error::Parameter(format!("unknown search mode `{s}` (neighbor, full, exhaustive)"))),
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Neighbor => "neighbor",
            SearchMode::Full => "full",
            SearchMode::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbConfig {
    /// Decision delay `n` in samples, 1 or 2.
    pub delay: usize,
    pub mode: SearchMode,
    /// Symbols per greedy/descent block.
    pub block_length: usize,
    /// Upper bound on descent sweeps per block.
    pub max_sweeps: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self { delay: 1, mode: SearchMode::Neighbor, block_length: 128, max_sweeps: 8 }
    }
}

impl PerturbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.delay) {
            return Err(Error::Parameter(format!("decision delay must be 1 or 2, got {}", self.delay)));
        }
        if self.mode == SearchMode::Exhaustive && self.delay != 2 {
            return Err(Error::Parameter("exhaustive search requires decision delay 2".into()));
        }
        if self.block_length == 0 {
            return Err(Error::Parameter("block_length must be at least 1".into()));
        }
        Ok(())
    }
}

/// `eₖ`, `eₖ,ₖ₊₁` and `eₖ,ₖ₊₂` together with the taps that weight the
/// candidate symbols in the delayed costs. The look-ahead signals are absent
/// when the requested delay is shorter or the sequence ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizedSignals {
    pub e_k: Complex64,
    pub e_k_k1: Option<Complex64>,
    pub e_k_k2: Option<Complex64>,
    /// `y₁` in force at sample `k+1`.
    pub y1_at_k1: Complex64,
    /// `y₁` in force at sample `k+2`.
    pub y1_at_k2: Complex64,
    /// `y₂` in force at sample `k+2`.
    pub y2_at_k2: Complex64,
}

/// Builds the equalized signals at `k` from past decisions `past`
/// (`s'ₖ₋g … s'ₖ₋₁`, oldest first).
pub fn equalized_signals(
    rx: &ReceivedSequence,
    k: usize,
    past: &[Complex64],
    delay: usize,
) -> Result<EqualizedSignals> {
    if k + delay >= rx.len() {
        return Err(Error::BeyondEnd { index: k, delay, len: rx.len() });
    }
    if delay > 2 {
        return Err(Error::Parameter(format!("decision delay must be at most 2, got {delay}")));
    }
    Ok(signals(rx, k, past, delay, &mut OpCounts::default()))
}

fn signals(rx: &ReceivedSequence, k: usize, past: &[Complex64], delay: usize, ops: &mut OpCounts) -> EqualizedSignals {
    let zero = Complex64::new(0.0, 0.0);
    let n = past.len();
    // r_{k+j} − Σ_{h=1..g−j} s'_{k−h} y_{h+j}
    let mut equalize = |j: usize| -> (Complex64, &crate::channel::Fir) {
        let fir = rx.fir_at(k + j);
        let g = fir.memory().min(n + j);
        let mut e = rx.samples[k + j];
        for h in 1..=g.saturating_sub(j) {
            e -= past[n - h] * fir.tap(h + j);
            ops.mults += 1;
            ops.adds += 1;
        }
        (e, fir)
    };
    let (e_k, _) = equalize(0);
    let mut out = EqualizedSignals {
        e_k,
        e_k_k1: None,
        e_k_k2: None,
        y1_at_k1: zero,
        y1_at_k2: zero,
        y2_at_k2: zero,
    };
    if delay >= 1 {
        let (e, fir) = equalize(1);
        out.e_k_k1 = Some(e);
        out.y1_at_k1 = fir.tap(1);
    }
    if delay >= 2 {
        let (e, fir) = equalize(2);
        out.e_k_k2 = Some(e);
        out.y1_at_k2 = fir.tap(1);
        out.y2_at_k2 = fir.tap(2);
    }
    out
}

/// The minimizing candidate of one delayed decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateCost {
    pub x_k: QamPoint,
    pub x_k1: Option<QamPoint>,
    pub x_k2: Option<QamPoint>,
    /// `c₁,ₖ`, or `|eₖ − xₖ|²` when no look-ahead is available.
    pub c1: f64,
    /// `c₂,ₖ` when two samples of look-ahead were used.
    pub c2: Option<f64>,
}

impl CandidateCost {
    /// The cost that was minimized.
    pub fn cost(&self) -> f64 {
        self.c2.unwrap_or(self.c1)
    }
}

/// Candidate list for one symbol position, in constellation-index order.
struct Candidates {
    items: [QamPoint; ORDER],
    len: usize,
}

impl Candidates {
    fn all() -> Self {
        let mut items = [QamPoint::from_index(0); ORDER];
        for (i, p) in items.iter_mut().enumerate() {
            *p = QamPoint::from_index(i);
        }
        Self { items, len: ORDER }
    }

    fn around(center: QamPoint, extra: Option<QamPoint>) -> Self {
        let mut items = [center; ORDER];
        let mut len = 1;
        for &n in center.neighbors() {
            items[len] = n;
            len += 1;
        }
        if let Some(x) = extra {
            if !items[..len].contains(&x) {
                items[len] = x;
                len += 1;
            }
        }
        items[..len].sort_unstable();
        Self { items, len }
    }

    fn as_slice(&self) -> &[QamPoint] {
        &self.items[..self.len]
    }
}

/// Minimizes the delayed cost over the candidate set of `mode`. The delay is
/// implied by which look-ahead signals are present; `tentative` joins the
/// neighbor-mode set for `xₖ`.
pub fn select_candidate(
    sig: &EqualizedSignals,
    mode: SearchMode,
    tentative: Option<QamPoint>,
    ops: &mut OpCounts,
) -> CandidateCost {
    let xk_set = match mode {
        SearchMode::Neighbor => {
            ops.slice();
            Candidates::around(slice(sig.e_k), tentative)
        }
        SearchMode::Full | SearchMode::Exhaustive => Candidates::all(),
    };

    let mut best: Option<CandidateCost> = None;
    let mut consider = |cand: CandidateCost, ops: &mut OpCounts| {
        ops.cost_evals += 1;
        match best {
            Some(b) => {
                ops.comparisons += 1;
                if cand.cost() < b.cost() {
                    best = Some(cand);
                }
            }
            None => best = Some(cand),
        }
    };

    for &x in xk_set.as_slice() {
        let d0 = (sig.e_k - x.value()).norm_sqr();
        ops.adds += 1;
        ops.norm_sqr();
        let Some(e1) = sig.e_k_k1 else {
            consider(CandidateCost { x_k: x, x_k1: None, x_k2: None, c1: d0, c2: None }, ops);
            continue;
        };
        let u = e1 - x.value() * sig.y1_at_k1;
        ops.mults += 1;
        ops.adds += 1;

        let Some(e2) = sig.e_k_k2 else {
            let x1 = slice(u);
            ops.slice();
            let c1 = d0 + (u - x1.value()).norm_sqr();
            ops.adds += 2;
            ops.norm_sqr();
            consider(CandidateCost { x_k: x, x_k1: Some(x1), x_k2: None, c1, c2: None }, ops);
            continue;
        };
        let w = e2 - x.value() * sig.y2_at_k2;
        ops.mults += 1;
        ops.adds += 1;
        let x1_set = match mode {
            SearchMode::Exhaustive => Candidates::all(),
            _ => {
                ops.slice();
                Candidates::around(slice(u), None)
            }
        };
        for &x1 in x1_set.as_slice() {
            let c1 = d0 + (u - x1.value()).norm_sqr();
            ops.adds += 2;
            ops.norm_sqr();
            let v = w - x1.value() * sig.y1_at_k2;
            ops.mults += 1;
            ops.adds += 1;
            let x2 = slice(v);
            ops.slice();
            let c2 = c1 + (v - x2.value()).norm_sqr();
            ops.adds += 2;
            ops.norm_sqr();
            consider(CandidateCost { x_k: x, x_k1: Some(x1), x_k2: Some(x2), c1, c2: Some(c2) }, ops);
        }
    }
    best.expect("candidate sets are never empty")
}

/// Tentative hard-symbol vector for a block with its total squared residual
/// `e² = Σₖ |rₖ − Σₕ yₕ s'ₖ₋ₕ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEstimate {
    pub symbols: Vec<QamPoint>,
    pub total_error: f64,
}

/// Working state of one block: `seq` holds the `g` fixed past symbols
/// followed by the block's symbols, `residuals` the per-sample residuals
/// `rₖ − Σₕ yₕ s'ₖ₋ₕ`.
///
/// Neighbors differ from a symbol by `δ = 2u`, `u ∈ {±1, ±j}`, so moving
/// symbol `i` changes the block error by
/// `4·Σₕ|yₕ|² − 4·Re(ū·cᵢ)` with `cᵢ = Σₕ ρᵢ₊ₕ·ȳₕ`. One correlation per
/// position prices all its neighbors.
struct BlockWork {
    start: usize,
    g: usize,
    seq: Vec<Complex64>,
    symbols: Vec<QamPoint>,
    residuals: Vec<Complex64>,
    /// `4·Σₕ|yₕ|²` over the taps that reach inside the block.
    energy: Vec<f64>,
}

impl BlockWork {
    fn new(
        rx: &ReceivedSequence,
        start: usize,
        seq: Vec<Complex64>,
        symbols: Vec<QamPoint>,
        residuals: Vec<Complex64>,
        ops: &mut OpCounts,
    ) -> Self {
        let g = seq.len() - symbols.len();
        let len = symbols.len();
        let mut cached: Option<(&crate::channel::Fir, Vec<f64>)> = None;
        let energy = (0..len)
            .map(|i| {
                let fir = rx.fir_at(start + i);
                // Tap energies change only with the response.
                if cached.as_ref().is_none_or(|(p, _)| !std::ptr::eq(*p, fir)) {
                    let taps: Vec<f64> = (0..=g).map(|h| fir.tap(h).norm_sqr()).collect();
                    for _ in 0..=g {
                        ops.norm_sqr();
                    }
                    cached = Some((fir, taps));
                }
                let taps = &cached.as_ref().expect("cached above").1;
                let reach = (len - i).min(g + 1);
                4.0 * taps[..reach].iter().sum::<f64>()
            })
            .collect();
        BlockWork { start, g, seq, symbols, residuals, energy }
    }

    fn greedy(rx: &ReceivedSequence, start: usize, end: usize, past: &[Complex64], ops: &mut OpCounts) -> Self {
        let g = past.len();
        let len = end - start;
        let mut seq = Vec::with_capacity(g + len);
        seq.extend_from_slice(past);
        let mut symbols = Vec::with_capacity(len);
        let mut residuals = Vec::with_capacity(len);
        for i in 0..len {
            let fir = rx.fir_at(start + i);
            let mut e = rx.samples[start + i];
            for h in 1..=fir.memory().min(g) {
                e -= fir.tap(h) * seq[g + i - h];
            }
            let gk = fir.memory().min(g) as u64;
            ops.mults += gk;
            ops.adds += gk;
            let s = slice(e);
            ops.slice();
            ops.adds += 1;
            seq.push(s.value());
            symbols.push(s);
            residuals.push(e - s.value());
        }
        Self::new(rx, start, seq, symbols, residuals, ops)
    }

    /// Rebuilds residuals for given block symbols.
    fn evaluate(rx: &ReceivedSequence, start: usize, past: &[Complex64], symbols: &[QamPoint]) -> Self {
        let g = past.len();
        let mut seq = past.to_vec();
        seq.extend(symbols.iter().map(|s| s.value()));
        let residuals: Vec<Complex64> = (0..symbols.len())
            .map(|i| {
                let fir = rx.fir_at(start + i);
                let mut rho = rx.samples[start + i] - seq[g + i];
                for h in 1..=fir.memory().min(g) {
                    rho -= fir.tap(h) * seq[g + i - h];
                }
                rho
            })
            .collect();
        Self::new(rx, start, seq, symbols.to_vec(), residuals, &mut OpCounts::default())
    }

    fn total_error(&self) -> f64 {
        self.residuals.iter().map(|r| r.norm_sqr()).sum()
    }

    /// One forward sweep; returns whether any symbol changed.
    fn sweep(&mut self, rx: &ReceivedSequence, ops: &mut OpCounts) -> bool {
        let len = self.symbols.len();
        let mut changed = false;
        for i in 0..len {
            let current = self.symbols[i];
            let reach = (len - i).min(self.g + 1);
            let mut corr = Complex64::new(0.0, 0.0);
            for h in 0..reach {
                corr += self.residuals[i + h] * rx.fir_at(self.start + i + h).tap(h).conj();
            }
            ops.mults += reach as u64;
            ops.adds += reach as u64 - 1;

            let mut best: Option<(QamPoint, Complex64)> = None;
            let mut best_delta = 0.0;
            for &x in current.neighbors() {
                let step = x.value() - current.value();
                // Re(δ̄·c) with δ = ±2 or ±2j is a signed component of c.
                let delta = self.energy[i] - 2.0 * (step.conj() * corr).re;
                ops.adds += 1;
                ops.comparisons += 1;
                // Strict reduction only; the margin absorbs rounding.
                if delta < best_delta && delta < -1e-12 {
                    best_delta = delta;
                    best = Some((x, step));
                }
            }
            if let Some((x, step)) = best {
                for h in 0..reach {
                    self.residuals[i + h] -= rx.fir_at(self.start + i + h).tap(h) * step;
                }
                ops.mults += reach as u64;
                ops.adds += reach as u64;
                self.symbols[i] = x;
                self.seq[self.g + i] = x.value();
                changed = true;
            }
        }
        changed
    }

    fn descend(&mut self, rx: &ReceivedSequence, max_sweeps: usize, ops: &mut OpCounts) {
        for _ in 0..max_sweeps {
            if !self.sweep(rx, ops) {
                break;
            }
        }
    }

    fn estimate(&self) -> BlockEstimate {
        BlockEstimate { symbols: self.symbols.clone(), total_error: self.total_error() }
    }
}

/// Greedy symbol-by-symbol search over the whole received sequence.
pub fn greedy_block_search(rx: &ReceivedSequence, preamble: &[QamPoint]) -> BlockEstimate {
    let past = preamble_tail(preamble, rx.track.memory());
    BlockWork::greedy(rx, 0, rx.len(), &past, &mut OpCounts::default()).estimate()
}

/// Neighbor descent on `estimate` (covering the whole received sequence),
/// for at most `max_sweeps` sweeps.
pub fn neighbor_descent(
    estimate: &BlockEstimate,
    rx: &ReceivedSequence,
    preamble: &[QamPoint],
    max_sweeps: usize,
) -> BlockEstimate {
    let past = preamble_tail(preamble, rx.track.memory());
    let mut work = BlockWork::evaluate(rx, 0, &past, &estimate.symbols);
    work.descend(rx, max_sweeps, &mut OpCounts::default());
    work.estimate()
}

/// Total squared residual of `symbols` against the whole received sequence.
pub fn block_error(rx: &ReceivedSequence, preamble: &[QamPoint], symbols: &[QamPoint]) -> f64 {
    let past = preamble_tail(preamble, rx.track.memory());
    BlockWork::evaluate(rx, 0, &past, symbols).total_error()
}

#[derive(Debug, Clone)]
pub struct Perturb {
    config: PerturbConfig,
}

impl Perturb {
    pub fn new(config: PerturbConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &PerturbConfig {
        &self.config
    }
}

impl Detector for Perturb {
    fn name(&self) -> String {
        format!("perturb{}", self.config.delay)
    }

    fn detect(&self, rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection> {
        self.config.validate()?;
        let n = rx.len();
        let g = rx.track.memory();
        let mut ops = OpCounts::default();
        let mut past = preamble_tail(preamble, g);
        let mut decided = Vec::with_capacity(n);

        let mut start = 0;
        while start < n {
            let end = (start + self.config.block_length).min(n);
            let mut work = BlockWork::greedy(rx, start, end, &past, &mut ops);
            work.descend(rx, self.config.max_sweeps, &mut ops);

            for k in start..end {
                let delay = self.config.delay.min(n - 1 - k);
                let sig = signals(rx, k, &past, delay, &mut ops);
                let best = select_candidate(&sig, self.config.mode, Some(work.symbols[k - start]), &mut ops);
                decided.push(best.x_k);
                if g > 0 {
                    past.rotate_left(1);
                    past[g - 1] = best.x_k.value();
                }
            }
            start = end;
        }
        ops.symbols = n as u64;
        Ok(Detection { symbols: decided, ops })
    }
}
