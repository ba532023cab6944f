//! A laboratory for equalizing 16-QAM over channels with intersymbol
//! interference.
//!
//! The crate provides the constellation and its slicer, static telephone
//! circuits and a block-fading mobile channel, four hard-decision detectors
//! (a decision-feedback equalizer, the perturbation equalizer with one or
//! two symbols of delay, a 16-survivor near-MLSE and the Viterbi MLSE), and
//! a seeded, parallel Monte Carlo harness for bit-error-rate and operation
//! count studies.

pub mod channel;
pub mod config;
pub mod constellation;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod seed;

pub use error::{Error, Result};
