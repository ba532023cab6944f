//! Operation tallies.
//!
//! Counting convention, applied uniformly to every detector:
//!
//! * complex multiply: 1 mult (a product by the normalized `y₀ = 1` is free)
//! * complex or real add/subtract: 1 add
//! * squared magnitude: 1 mult + 1 add
//! * slicing: 4 comparisons, no arithmetic
//! * any comparison of two costs or distances: 1 comparison
//!
//! A *cost evaluation* is the formation of one candidate decision metric
//! (one `c₁,ₖ`/`c₂,ₖ`, one survivor extension, one Viterbi branch); a bare
//! slicer decision with no competing candidates counts as one. Search
//! steps (sorting, selection, threshold tests) are charged a fixed number
//! of comparisons per step regardless of their outcome, so tallies depend
//! on the candidate sets visited and never on the channel coefficients.

use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub mults: u64,
    pub adds: u64,
    pub comparisons: u64,
    pub cost_evals: u64,
    /// Number of symbols the tallies cover.
    pub symbols: u64,
}

impl OpCounts {
    /// Multiplications plus additions/subtractions.
    pub fn arithmetic(&self) -> u64 {
        self.mults + self.adds
    }

    pub fn total(&self) -> u64 {
        self.arithmetic() + self.comparisons
    }

    pub fn merge(&mut self, other: &OpCounts) {
        self.mults += other.mults;
        self.adds += other.adds;
        self.comparisons += other.comparisons;
        self.cost_evals += other.cost_evals;
        self.symbols += other.symbols;
    }

    pub fn per_symbol(&self) -> OpAverages {
        let n = self.symbols.max(1) as f64;
        OpAverages {
            cost_evals: self.cost_evals as f64 / n,
            arithmetic: self.arithmetic() as f64 / n,
            search: self.comparisons as f64 / n,
            total: self.total() as f64 / n,
            mults: self.mults as f64 / n,
            adds: self.adds as f64 / n,
        }
    }

    #[inline]
    pub(crate) fn norm_sqr(&mut self) {
        self.mults += 1;
        self.adds += 1;
    }

    #[inline]
    pub(crate) fn slice(&mut self) {
        self.comparisons += crate::constellation::SLICE_COMPARISONS;
    }
}

/// Per-symbol averages in the column layout of a complexity table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpAverages {
    pub cost_evals: f64,
    /// Multiplications, additions and subtractions.
    pub arithmetic: f64,
    /// Comparisons made while searching.
    pub search: f64,
    pub total: f64,
    pub mults: f64,
    pub adds: f64,
}
