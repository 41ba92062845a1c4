use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_config_text, Command, ExperimentConfig};
use super::{exit, exit_code, run};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "rsp", version, about = "Remote state preparation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Exact RSP of equatorial qubits with one ebit and one bit.
    Equatorial(Flags),
    /// Success-table RSP of n states against the closed-form cost model.
    TableRsp(Flags),
    /// Conjugate-basis measurement on a maximally entangled qudit pair.
    QuditMeasure(Flags),
    /// Distillation ledger and cost point of the recycling protocol.
    Recycle(Flags),
    /// Bell-diagonal statistics of the failed subblock measurement.
    Eq1Check(Flags),
    /// Rotation-table protocol for low entanglement.
    LowentSim(Flags),
    /// Entanglement/communication tradeoff curve.
    Figure1(Flags),
    /// Remote preparation of an entangled state by local filtering.
    Filter(Flags),
    /// Holevo lower bound for a state ensemble.
    HolevoBound(Flags),
    /// Average fidelity against the entangled-fraction relation.
    Horodecki(Flags),
    /// Causality bound on protocols with too few bits.
    CausalityCheck(Flags),
    /// Teleportation of Haar-random qudits.
    Teleport(Flags),
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// RNG seed (required here or in the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples, trials or runs.
    #[arg(long)]
    pub samples: Option<String>,
    /// Number of states.
    #[arg(long)]
    pub n: Option<String>,
    /// Local dimension.
    #[arg(long)]
    pub d: Option<String>,
    /// Subblock size.
    #[arg(long)]
    pub s: Option<String>,
    /// States per recycling round (s′).
    #[arg(long)]
    pub sprime: Option<String>,
    /// Cap radius or equatorial phase: radians or pi expressions such as 2pi/3.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long)]
    pub format: Option<String>,
    /// Number of θ grid points.
    #[arg(long)]
    pub grid: Option<String>,
    /// Schmidt coefficients, comma separated.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Ensemble name for holevo-bound.
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Channel name for horodecki.
    #[arg(long)]
    pub channel: Option<String>,
    /// Depolarizing probability.
    #[arg(long)]
    pub p: Option<String>,
    /// Message bits for causality-check.
    #[arg(long)]
    pub k: Option<String>,
    /// Target list for lowent-sim: haar or south-pole.
    #[arg(long)]
    pub targets: Option<String>,
    /// Curve kind for figure1: lowent, convex or points.
    #[arg(long)]
    pub curve: Option<String>,
    /// key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Equatorial(f) => (Command::Equatorial, f),
            Sub::TableRsp(f) => (Command::TableRsp, f),
            Sub::QuditMeasure(f) => (Command::QuditMeasure, f),
            Sub::Recycle(f) => (Command::Recycle, f),
            Sub::Eq1Check(f) => (Command::Eq1Check, f),
            Sub::LowentSim(f) => (Command::LowentSim, f),
            Sub::Figure1(f) => (Command::Figure1, f),
            Sub::Filter(f) => (Command::Filter, f),
            Sub::HolevoBound(f) => (Command::HolevoBound, f),
            Sub::Horodecki(f) => (Command::Horodecki, f),
            Sub::CausalityCheck(f) => (Command::CausalityCheck, f),
            Sub::Teleport(f) => (Command::Teleport, f),
        }
    }
}

impl Flags {
    fn settings(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut add = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        add("seed", self.seed.map(|s| s.to_string()));
        add("samples", self.samples.clone());
        add("n", self.n.clone());
        add("d", self.d.clone());
        add("s", self.s.clone());
        add("sprime", self.sprime.clone());
        add("theta", self.theta.clone());
        add("out", self.out.as_ref().map(|p| p.to_string_lossy().into_owned()));
        add("format", self.format.clone());
        add("grid", self.grid.clone());
        add("lambda", self.lambda.clone());
        add("ensemble", self.ensemble.clone());
        add("channel", self.channel.clone());
        add("p", self.p.clone());
        add("k", self.k.clone());
        add("targets", self.targets.clone());
        add("curve", self.curve.clone());
        out
    }
}

/// Merges the config file (if any) with flags; flags win.
pub fn resolve(command: Command, flags: &Flags) -> Result<ExperimentConfig> {
    let mut settings = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => Default::default(),
    };
    for (k, v) in flags.settings() {
        settings.insert(k.to_string(), v);
    }
    ExperimentConfig::from_settings(command, &settings)
}

/// Parses arguments, runs the experiment and returns the exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::SUCCESS };
        }
    };
    let (command, flags) = cli.command.split();
    let result = resolve(command, &flags).and_then(|cfg| {
        let report = run(&cfg)?;
        if cfg.out.is_none() {
            std::io::stdout().write_all(&report.rendered)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("rsp {command}: {e}");
            exit_code(&e)
        }
    }
}
