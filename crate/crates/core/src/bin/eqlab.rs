use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eqlab::channel::{format_complex, sig6, telephone_circuit_raw, ChannelModel, CATALOGUE};
use eqlab::config::Config;
use eqlab::detectors::{DetectorSpec, REGISTRY};
use eqlab::harness::{advantage_db, crossing_snr, ops_report, sweep, write_csv, write_json, OpsRow};
use eqlab::Error;

#[derive(Parser)]
#[command(name = "eqlab", version, about = "16-QAM ISI equalization laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channels with their taps and detectors with their defaults.
    List,
    /// BER sweep of one detector, written as CSV (or JSON for a .json --out).
    Run(Settings),
    /// SNR advantage of the first listed detector over the second.
    Compare(Settings),
    /// Per-symbol operation counts.
    Ops(Settings),
}

#[derive(Args)]
struct Settings {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    channel: Option<String>,
    /// Detector name, or a comma list for compare and ops.
    #[arg(long)]
    detector: Option<String>,
    /// SNR grid in dB: `10,12,14` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Symbols per grid point.
    #[arg(long)]
    symbols: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Perturbation search mode: neighbor, full or exhaustive.
    #[arg(long)]
    mode: Option<String>,
    /// Decision delay (near-MLSE window, or perturbation delay check).
    #[arg(long)]
    delay: Option<String>,
    #[arg(long = "speed-kmh")]
    speed_kmh: Option<String>,
    #[arg(long = "target-ber")]
    target_ber: Option<String>,
    /// Share bits, noise and fading across detectors.
    #[arg(long)]
    paired: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Measurement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotBracketed(_) | Error::BeyondEnd { .. } | Error::NonFinite(_) | Error::DegenerateFir => {
                Failure::Measurement(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl Settings {
    fn config(&self, default_detectors: &str) -> Result<Config, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        if cfg.get("detector").is_none() {
            cfg.set("detector", default_detectors)?;
        }
        let flags = [
            ("channel", &self.channel),
            ("detector", &self.detector),
            ("snr", &self.snr),
            ("symbols", &self.symbols),
            ("seed", &self.seed),
            ("search_mode", &self.mode),
            ("decision_delay", &self.delay),
            ("speed_kmh", &self.speed_kmh),
            ("target_ber", &self.target_ber),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.paired {
            cfg.set("paired", "true")?;
        }
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn wants_json(&self) -> bool {
        self.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json"))
    }
}

fn list() -> Result<(), Failure> {
    let mut out = String::from("channels\n");
    for name in CATALOGUE {
        let model = ChannelModel::by_name(name)?;
        match &model {
            ChannelModel::Telephone(id) => {
                let raw = telephone_circuit_raw(*id)?;
                let norm = eqlab::channel::telephone_circuit(*id)?;
                let _ = writeln!(out, "  {name}  memory {}  max |zero| {}", model.memory(), sig6(norm.max_zero_modulus()));
                let _ = writeln!(out, "    raw        {raw}");
                let _ = writeln!(out, "    normalized {norm}");
            }
            ChannelModel::Mobile(cfg) => {
                let _ = writeln!(
                    out,
                    "  {name}  {} paths, block fading every {} symbols, {} km/h, doppler {} Hz, mean tap power {}",
                    cfg.num_paths,
                    cfg.block_length,
                    sig6(cfg.speed_kmh),
                    sig6(cfg.doppler_hz()),
                    sig6(cfg.mean_energy()? / cfg.num_paths as f64)
                );
            }
            ChannelModel::Ideal { .. } => {
                let _ = writeln!(out, "  {name}  distortion-free, taps {}", format_complex(num_complex::Complex64::new(1.0, 0.0)));
            }
        }
    }
    out.push_str("detectors\n");
    for name in REGISTRY {
        let spec = DetectorSpec::by_name(name, &Default::default())?;
        let params: Vec<String> = spec.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "{}", format!("  {name:<10} {}", params.join(" ")).trim_end());
    }
    print!("{out}");
    Ok(())
}

fn run(s: &Settings) -> Result<(), Failure> {
    let specs = s.config("dfe")?.specs()?;
    if specs.len() != 1 {
        return Err(Failure::Config("run takes exactly one detector".into()));
    }
    let result = sweep(&specs[0])?;
    let text = if s.wants_json() { write_json(&result)? } else { write_csv(&result) };
    s.emit(&text)
}

fn compare(s: &Settings) -> Result<(), Failure> {
    let cfg = s.config("perturb1,dfe")?;
    let specs = cfg.specs()?;
    if specs.len() != 2 {
        return Err(Failure::Config("compare takes exactly two detectors".into()));
    }
    let target = cfg.target_ber()?.unwrap_or(1e-2);
    let a = sweep(&specs[0])?;
    let b = sweep(&specs[1])?;
    let mut out = String::new();
    let _ = writeln!(out, "channel {}  target BER {}", a.channel, sig6(target));
    for r in [&a, &b] {
        let (snr, sd) = crossing_snr(&r.points, target)?;
        let _ = writeln!(out, "  {:<10} reaches target at {} dB (± {})", r.detector, sig6(snr), sig6(sd));
    }
    let adv = advantage_db(&a.points, &b.points, target)?;
    let _ = writeln!(
        out,
        "advantage of {} over {}: {} dB ± {} dB",
        a.detector,
        b.detector,
        sig6(adv.db),
        sig6(adv.stderr_db)
    );
    s.emit(&out)
}

fn ops(s: &Settings) -> Result<(), Failure> {
    let mut cfg = s.config("dfe,perturb1,perturb2,near-mlse")?;
    if cfg.get("symbols").is_none() {
        cfg.set("symbols", "20000")?;
    }
    let rows = ops_report(&cfg.specs()?)?;
    let text = match &s.out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => {
            let mut t = format!("{}\n", OpsRow::CSV_HEADER);
            for r in &rows {
                t.push_str(&r.csv_line());
                t.push('\n');
            }
            t
        }
        _ => OpsRow::table(&rows),
    };
    s.emit(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::List => list(),
        Command::Run(s) => run(s),
        Command::Compare(s) => compare(s),
        Command::Ops(s) => ops(s),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("eqlab: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Measurement(msg)) => {
            eprintln!("eqlab: {msg}");
            ExitCode::from(3)
        }
    }
}
