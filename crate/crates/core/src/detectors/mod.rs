//! Hard-decision sequence detectors.
//!
//! Every detector consumes a [`ReceivedSequence`] whose responses are
//! normalized (`y₀ = 1`) and a known preamble (the symbols transmitted just
//! before the data, last element most recent). Preamble positions beyond
//! its start are taken as zero, matching [`crate::channel::propagate`].

mod dfe;
mod near_mlse;
mod ops;
mod perturb;
mod viterbi;

use std::collections::BTreeMap;

use num_complex::Complex64;

pub use dfe::{Dfe, DfeState};
pub use near_mlse::{NearMlse, NearMlseConfig, NearMlseTracker, SurvivorVector, SPAWN_SCHEDULE, STORED_COUNT};
pub use ops::{OpAverages, OpCounts};
pub use perturb::{
    block_error, equalized_signals, greedy_block_search, neighbor_descent, select_candidate, BlockEstimate,
    CandidateCost, EqualizedSignals, Perturb, PerturbConfig, SearchMode,
};
pub use viterbi::{viterbi_mlse, ViterbiMlse, MAX_STATES};

use crate::channel::ReceivedSequence;
use crate::constellation::QamPoint;
use crate::error::{Error, Result};

/// Decisions for the data part of one received sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub symbols: Vec<QamPoint>,
    pub ops: OpCounts,
}

pub trait Detector: Send + Sync {
    fn name(&self) -> String;

    fn detect(&self, rx: &ReceivedSequence, preamble: &[QamPoint]) -> Result<Detection>;
}

/// Last `g` symbols before the data, oldest first, zero-padded at the front.
pub(crate) fn preamble_tail(preamble: &[QamPoint], g: usize) -> Vec<Complex64> {
    let mut tail = vec![Complex64::new(0.0, 0.0); g];
    for (slot, p) in tail.iter_mut().rev().zip(preamble.iter().rev()) {
        *slot = p.value();
    }
    tail
}

/// Names accepted by [`DetectorSpec::by_name`].
pub const REGISTRY: [&str; 5] = ["dfe", "perturb1", "perturb2", "near-mlse", "mlse"];

/// A detector from the registry with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSpec {
    Dfe,
    Perturb(PerturbConfig),
    NearMlse(NearMlseConfig),
    Mlse,
}

impl DetectorSpec {
    /// Resolves `name` with flat `key=value` parameters. Recognized keys:
    /// `search_mode` (perturbation detectors), `decision_delay`, `search_block`
    /// (perturbation search block) and `max_sweeps`.
    pub fn by_name(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let parse_usize = |key: &str| -> Result<Option<usize>> {
            params
                .get(key)
                .map(|v| v.parse::<usize>().map_err(|_| Error::Parameter(format!("{key}={v} is not a count"))))
                .transpose()
        };
        let reject_others = |allowed: &[&str]| -> Result<()> {
            match params.keys().find(|k| !allowed.contains(&k.as_str())) {
                Some(k) => Err(Error::Parameter(format!("`{k}` does not apply to detector `{name}`"))),
                None => Ok(()),
            }
        };
        match name {
            "dfe" => {
                reject_others(&[])?;
                Ok(DetectorSpec::Dfe)
            }
            "mlse" => {
                reject_others(&[])?;
                Ok(DetectorSpec::Mlse)
            }
            "perturb1" | "perturb2" => {
                reject_others(&["search_mode", "decision_delay", "search_block", "max_sweeps"])?;
                let delay = if name == "perturb1" { 1 } else { 2 };
                if let Some(d) = parse_usize("decision_delay")? {
                    if d != delay {
                        return Err(Error::Parameter(format!("{name} has decision delay {delay}, not {d}")));
                    }
                }
                let mut cfg = PerturbConfig { delay, ..PerturbConfig::default() };
                if let Some(mode) = params.get("search_mode") {
                    cfg.mode = mode.parse()?;
                }
                if let Some(n) = parse_usize("search_block")? {
                    cfg.block_length = n;
                }
                if let Some(n) = parse_usize("max_sweeps")? {
                    cfg.max_sweeps = n;
                }
                cfg.validate()?;
                Ok(DetectorSpec::Perturb(cfg))
            }
            "near-mlse" => {
                reject_others(&["decision_delay"])?;
                let mut cfg = NearMlseConfig::default();
                if let Some(d) = parse_usize("decision_delay")? {
                    cfg.decision_delay = d;
                }
                cfg.validate(0)?;
                Ok(DetectorSpec::NearMlse(cfg))
            }
            _ => Err(Error::UnknownDetector(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetectorSpec::Dfe => "dfe",
            DetectorSpec::Perturb(cfg) if cfg.delay == 1 => "perturb1",
            DetectorSpec::Perturb(_) => "perturb2",
            DetectorSpec::NearMlse(_) => "near-mlse",
            DetectorSpec::Mlse => "mlse",
        }
    }

    /// Parameters as `key=value` pairs, defaults included.
    pub fn params(&self) -> Vec<(String, String)> {
        match self {
            DetectorSpec::Dfe | DetectorSpec::Mlse => Vec::new(),
            DetectorSpec::Perturb(cfg) => vec![
                ("search_mode".into(), cfg.mode.to_string()),
                ("decision_delay".into(), cfg.delay.to_string()),
                ("search_block".into(), cfg.block_length.to_string()),
                ("max_sweeps".into(), cfg.max_sweeps.to_string()),
            ],
            DetectorSpec::NearMlse(cfg) => vec![("decision_delay".into(), cfg.decision_delay.to_string())],
        }
    }

    pub fn build(&self) -> Box<dyn Detector> {
        match self {
            DetectorSpec::Dfe => Box::new(Dfe),
            DetectorSpec::Perturb(cfg) => Box::new(Perturb::new(cfg.clone())),
            DetectorSpec::NearMlse(cfg) => Box::new(NearMlse::new(cfg.clone())),
            DetectorSpec::Mlse => Box::new(ViterbiMlse),
        }
    }
}
