//! Flat `key=value` run configuration.
//!
//! Files hold one `key=value` per line; `#` starts a comment. Later
//! settings override earlier ones, so command-line flags are applied with
//! [`Config::set`] after the file. Unknown keys are errors.
//!
//! `snr` takes a comma list (`10,12.5,15`, `inf` allowed) or an inclusive
//! range `start:stop:step`. `detector` may list several detectors separated
//! by commas; detector parameters apply to every listed detector that
//! accepts them.

use std::collections::BTreeMap;

use crate::channel::{ChannelModel, MobileChannelConfig};
use crate::detectors::DetectorSpec;
use crate::error::{Error, Result};
use crate::harness::SimSpec;

const GENERAL_KEYS: [&str; 9] =
    ["channel", "detector", "snr", "symbols", "seed", "warmup", "block_length", "paired", "target_ber"];
const DETECTOR_KEYS: [&str; 4] = ["search_mode", "decision_delay", "search_block", "max_sweeps"];
const MOBILE_KEYS: [&str; 7] =
    ["speed_kmh", "num_paths", "distance_m", "wavelength_m", "rayleigh_mean_db", "symbol_period_s", "fading_block"];

/// Every key a configuration may contain.
pub fn known_keys() -> impl Iterator<Item = &'static str> {
    GENERAL_KEYS.into_iter().chain(DETECTOR_KEYS).chain(MOBILE_KEYS)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got `{v}`"))),
    }
}

/// Parses an SNR grid: a comma list or `start:stop:step`.
pub fn parse_snr_grid(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() == 3 {
        let (start, stop, step): (f64, f64, f64) =
            (parse_num("snr", parts[0])?, parse_num("snr", parts[1])?, parse_num("snr", parts[2])?);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::Config(format!("snr: bad range `{v}`")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    if parts.len() != 1 {
        return Err(Error::Config(format!("snr: bad grid `{v}`")));
    }
    v.split(',').map(|s| parse_num::<f64>("snr", s)).collect()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !known_keys().any(|k| k == key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn target_ber(&self) -> Result<Option<f64>> {
        self.get("target_ber")
            .map(|v| {
                let t: f64 = parse_num("target_ber", v)?;
                if t > 0.0 && t < 1.0 {
                    Ok(t)
                } else {
                    Err(Error::Config(format!("target_ber must lie in (0, 1), got {v}")))
                }
            })
            .transpose()
    }

    /// Detector names listed under `detector` (default `dfe`).
    pub fn detector_names(&self) -> Vec<String> {
        self.get("detector").unwrap_or("dfe").split(',').map(|s| s.trim().to_string()).collect()
    }

    fn channel(&self) -> Result<ChannelModel> {
        let mut channel = ChannelModel::by_name(self.get("channel").unwrap_or("tc1"))?;
        let mobile_keys: Vec<&str> = MOBILE_KEYS.into_iter().filter(|k| self.values.contains_key(*k)).collect();
        match &mut channel {
            ChannelModel::Mobile(cfg) => {
                let set = |key: &str, cfg: &mut MobileChannelConfig| -> Result<()> {
                    let Some(v) = self.get(key) else { return Ok(()) };
                    match key {
                        "speed_kmh" => cfg.speed_kmh = parse_num(key, v)?,
                        "num_paths" => cfg.num_paths = parse_num(key, v)?,
                        "distance_m" => cfg.distance_m = parse_num(key, v)?,
                        "wavelength_m" => cfg.wavelength_m = parse_num(key, v)?,
                        "rayleigh_mean_db" => cfg.rayleigh_mean_db = parse_num(key, v)?,
                        "symbol_period_s" => cfg.symbol_period_s = parse_num(key, v)?,
                        "fading_block" => cfg.block_length = parse_num(key, v)?,
                        _ => unreachable!(),
                    }
                    Ok(())
                };
                for key in MOBILE_KEYS {
                    set(key, cfg)?;
                }
                cfg.validate()?;
            }
            _ if !mobile_keys.is_empty() => {
                return Err(Error::Config(format!("`{}` applies only to the gsm channel", mobile_keys[0])));
            }
            _ => {}
        }
        Ok(channel)
    }

    fn detectors(&self) -> Result<Vec<DetectorSpec>> {
        let params: BTreeMap<String, String> = DETECTOR_KEYS
            .iter()
            .filter_map(|k| self.get(k).map(|v| (k.to_string(), v.to_string())))
            .collect();
        let mut used = vec![false; DETECTOR_KEYS.len()];
        let mut specs = Vec::new();
        for name in self.detector_names() {
            // Defaults tell which keys this detector takes.
            let accepted: Vec<String> =
                DetectorSpec::by_name(&name, &BTreeMap::new())?.params().into_iter().map(|(k, _)| k).collect();
            let own: BTreeMap<String, String> =
                params.iter().filter(|(k, _)| accepted.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
            for (i, k) in DETECTOR_KEYS.iter().enumerate() {
                used[i] |= own.contains_key(*k);
            }
            specs.push(DetectorSpec::by_name(&name, &own)?);
        }
        if let Some(i) = (0..DETECTOR_KEYS.len()).find(|&i| params.contains_key(DETECTOR_KEYS[i]) && !used[i]) {
            return Err(Error::Config(format!("`{}` applies to none of the listed detectors", DETECTOR_KEYS[i])));
        }
        Ok(specs)
    }

    /// One validated simulation per listed detector.
    pub fn specs(&self) -> Result<Vec<SimSpec>> {
        let channel = self.channel()?;
        let snr = parse_snr_grid(self.get("snr").unwrap_or("20"))?;
        let mut template = SimSpec::new(channel, DetectorSpec::Dfe, snr);
        if let Some(v) = self.get("symbols") {
            template.symbols_per_point = parse_num::<f64>("symbols", v).and_then(|x| {
                if x >= 0.0 && x.fract() == 0.0 && x < 1e15 {
                    Ok(x as usize)
                } else {
                    Err(Error::Config(format!("symbols: `{v}` is not a count")))
                }
            })?;
        }
        if let Some(v) = self.get("seed") {
            template.master_seed = parse_num("seed", v)?;
        }
        if let Some(v) = self.get("warmup") {
            template.warmup = parse_num("warmup", v)?;
        }
        if let Some(v) = self.get("block_length") {
            template.block_length = parse_num("block_length", v)?;
        }
        if let Some(v) = self.get("paired") {
            template.paired = parse_bool("paired", v)?;
        }
        self.target_ber()?;
        self.detectors()?
            .into_iter()
            .map(|detector| {
                let spec = SimSpec { detector, ..template.clone() };
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }
}
