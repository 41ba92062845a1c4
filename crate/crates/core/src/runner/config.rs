//! Experiment configuration from `key=value` files and command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::output::Format;
use crate::error::{Error, Result};

/// Experiments the runner can reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Equatorial,
    TableRsp,
    QuditMeasure,
    Recycle,
    Eq1Check,
    LowentSim,
    Figure1,
    Filter,
    HolevoBound,
    Horodecki,
    CausalityCheck,
    Teleport,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Equatorial,
        Command::TableRsp,
        Command::QuditMeasure,
        Command::Recycle,
        Command::Eq1Check,
        Command::LowentSim,
        Command::Figure1,
        Command::Filter,
        Command::HolevoBound,
        Command::Horodecki,
        Command::CausalityCheck,
        Command::Teleport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Equatorial => "equatorial",
            Command::TableRsp => "table-rsp",
            Command::QuditMeasure => "qudit-measure",
            Command::Recycle => "recycle",
            Command::Eq1Check => "eq1-check",
            Command::LowentSim => "lowent-sim",
            Command::Figure1 => "figure1",
            Command::Filter => "filter",
            Command::HolevoBound => "holevo-bound",
            Command::Horodecki => "horodecki",
            Command::CausalityCheck => "causality-check",
            Command::Teleport => "teleport",
        }
    }

    /// The capability an experiment reproduces.
    pub fn capability(self) -> &'static str {
        match self {
            Command::Equatorial => "exact RSP of equatorial qubits with one ebit and one bit",
            Command::TableRsp => "success-table RSP and its cost against the closed-form model",
            Command::QuditMeasure => "conjugate-basis measurement succeeding with probability 1/d",
            Command::Recycle => "distillation ledger of the recycling protocol and its cost point",
            Command::Eq1Check => "Bell-diagonal statistics of the failed subblock measurement",
            Command::LowentSim => "rotation-table protocol for low entanglement",
            Command::Figure1 => "entanglement/communication tradeoff curve",
            Command::Filter => "remote preparation of entangled states by local filtering",
            Command::HolevoBound => "Holevo lower bound on communication for state ensembles",
            Command::Horodecki => "average fidelity against the entangled-fraction relation",
            Command::CausalityCheck => "causality bound on protocols with too few bits",
            Command::Teleport => "teleportation as the fallback and reference protocol",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown subcommand {s:?}")))
    }
}

/// Keys accepted in config files and as flags.
pub const KEYS: [&str; 17] = [
    "seed", "samples", "n", "d", "s", "sprime", "theta", "grid", "out", "format", "lambda", "ensemble", "channel",
    "p", "k", "targets", "curve",
];

/// Optional experiment parameters; each experiment supplies its defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub samples: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub s: Option<usize>,
    pub sprime: Option<usize>,
    pub theta: Option<f64>,
    pub grid: Option<usize>,
    pub lambda: Option<Vec<f64>>,
    pub ensemble: Option<String>,
    pub channel: Option<String>,
    pub p: Option<f64>,
    pub k: Option<u32>,
    pub targets: Option<String>,
    pub curve: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub params: Params,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            command,
            seed,
            params: Params::default(),
            out: None,
            format: Format::Csv,
        }
    }

    /// Builds a config from merged settings; `seed` must be present.
    pub fn from_settings(command: Command, settings: &BTreeMap<String, String>) -> Result<Self> {
        let seed = settings
            .get("seed")
            .ok_or_else(|| Error::Config("--seed is required (flag or config file)".into()))?;
        let mut cfg = Self::new(command, parse_num(seed, "seed")?);
        for (key, value) in settings {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "seed" => self.seed = parse_num(value, key)?,
            "samples" => p.samples = Some(parse_num(value, key)?),
            "n" => p.n = Some(parse_num(value, key)?),
            "d" => p.d = Some(parse_num(value, key)?),
            "s" => p.s = Some(parse_num(value, key)?),
            "sprime" => p.sprime = Some(parse_num(value, key)?),
            "theta" => p.theta = Some(parse_angle(value)?),
            "grid" => p.grid = Some(parse_num(value, key)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "lambda" => {
                p.lambda = Some(
                    value
                        .split(',')
                        .map(|x| parse_num(x.trim(), key))
                        .collect::<Result<Vec<f64>>>()?,
                )
            }
            "ensemble" => p.ensemble = Some(value.to_string()),
            "channel" => p.channel = Some(value.to_string()),
            "p" => p.p = Some(parse_num(value, key)?),
            "k" => p.k = Some(parse_num(value, key)?),
            "targets" => p.targets = Some(value.to_string()),
            "curve" => p.curve = Some(value.to_string()),
            other => return Err(Error::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

/// Parses a plain number of radians or a multiple of π: `pi`, `pi/2`,
/// `2pi/3`, `0.5*pi`.
pub fn parse_angle(value: &str) -> Result<f64> {
    let v = value.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || Error::Config(format!("invalid angle {value:?}"));
    let Some(at) = v.find("pi") else {
        return v.parse().map_err(|_| bad());
    };
    let coeff = v[..at].trim().trim_end_matches('*').trim();
    let coeff: f64 = if coeff.is_empty() { 1.0 } else { coeff.parse().map_err(|_| bad())? };
    let rest = v[at + 2..].trim();
    let denom: f64 = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    if denom == 0.0 {
        return Err(bad());
    }
    Ok(coeff * PI / denom)
}

/// Parses flat `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!((parse_angle("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("0.5*pi").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_angle("π/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# comment\nseed = 7\n\nn=8  # inline\n").unwrap();
        assert_eq!(m["seed"], "7");
        assert_eq!(m["n"], "8");
        assert!(parse_config_text("bogus=1").is_err());
        assert!(parse_config_text("seed").is_err());
    }

    #[test]
    fn settings_require_seed() {
        let mut m = BTreeMap::new();
        m.insert("n".to_string(), "4".to_string());
        assert!(matches!(ExperimentConfig::from_settings(Command::TableRsp, &m), Err(Error::Config(_))));
        m.insert("seed".to_string(), "3".to_string());
        m.insert("lambda".to_string(), "0.75, 0.25".to_string());
        let cfg = ExperimentConfig::from_settings(Command::Filter, &m).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.params.n, Some(4));
        assert_eq!(cfg.params.lambda, Some(vec![0.75, 0.25]));
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
            assert!(!c.capability().is_empty());
        }
    }
}
