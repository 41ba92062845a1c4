//! One function per subcommand, each producing a result table.

use std::f64::consts::PI;

use rand::Rng;

use super::config::{Command, ExperimentConfig, Params};
use super::output::{Table, Value};
use crate::bounds::{avg_fidelity, causality_check, entangled_fraction, guess_channel, horodecki_f, weyl_set, GuessSpec};
use crate::entprep::{filter_trials, holevo_lower_bound, schmidt_diagonal_state, EnsembleSpec};
use crate::error::{Error, Result};
use crate::highent::{conjugate_basis_measure, equatorial_rsp, expected_cost_model, table_rsp, teleport_qudit};
use crate::lowent::{
    cap_params, expected_lowent_costs, prerotation_overhead_bits, theta_grid, tradeoff_curve, CostPoint, CostSource,
};
use crate::qmath::{c, haar_state, BellLabel, QuantumChannel, RngStream, StateVector};
use crate::recycle::{
    class_multiplicity, default_s_prime, eq1_value, recycle_accounting, rho0_bell_diagonal_mc, EntropySource,
};
use crate::stats::{binomial_stderr, Estimate, MeanAccumulator};

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    let mut rng = RngStream::new(cfg.seed);
    let p = &cfg.params;
    match cfg.command {
        Command::Equatorial => equatorial(p, &mut rng),
        Command::TableRsp => table(p, &mut rng),
        Command::QuditMeasure => qudit_measure(p, &mut rng),
        Command::Recycle => recycle(p),
        Command::Eq1Check => eq1_check(p, &mut rng),
        Command::LowentSim => lowent_sim(p, &mut rng),
        Command::Figure1 => {
            let kind = p.curve.as_deref().unwrap_or("convex").parse()?;
            emit_curve(kind, &theta_grid(p.grid.unwrap_or(50)))
        }
        Command::Filter => filter(p, &mut rng),
        Command::HolevoBound => holevo(p, &mut rng),
        Command::Horodecki => horodecki(p, &mut rng),
        Command::CausalityCheck => causality(p),
        Command::Teleport => teleport(p, &mut rng),
    }
}

fn positive(v: usize, name: &str) -> Result<usize> {
    if v == 0 {
        return Err(Error::Config(format!("{name} must be positive")));
    }
    Ok(v)
}

fn equatorial(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let samples = positive(p.samples.unwrap_or(1000), "samples")?;
    let (mut bits, mut ebits, mut min_f) = (0.0, 0.0, 1.0f64);
    let mut corrected = MeanAccumulator::default();
    for _ in 0..samples {
        let phi = p.theta.unwrap_or_else(|| 2.0 * PI * rng.random::<f64>());
        let run = equatorial_rsp(phi, rng)?;
        bits += run.transcript.bits_forward;
        ebits += run.transcript.ebits_consumed;
        min_f = min_f.min(run.transcript.output_fidelity);
        corrected.push(run.corrected as u8 as f64);
    }
    let c = corrected.estimate();
    Ok(Table::from_records(vec![vec![
        ("samples", samples.into()),
        ("bits_per_state", (bits / samples as f64).into()),
        ("ebits_per_state", (ebits / samples as f64).into()),
        ("min_fidelity", min_f.into()),
        ("correction_rate", c.mean.into()),
        ("correction_rate_stderr", c.stderr.into()),
    ]]))
}

fn table(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let n = positive(p.n.unwrap_or(4), "n")?;
    let d = p.d.unwrap_or(2);
    let runs = positive(p.samples.unwrap_or(200), "samples")?;
    let model = expected_cost_model(n, d)?;
    let (mut bits, mut fallback) = (MeanAccumulator::default(), MeanAccumulator::default());
    let mut ebits = MeanAccumulator::default();
    let mut min_f = 1.0f64;
    for _ in 0..runs {
        let targets: Vec<StateVector> = (0..n).map(|_| haar_state(d, rng)).collect();
        let run = table_rsp(n, d, &targets, None, rng)?;
        bits.push(run.transcript.bits_forward / n as f64);
        ebits.push(run.transcript.ebits_consumed / n as f64);
        fallback.push(run.transcript.fallback_used as u8 as f64);
        min_f = min_f.min(run.transcript.output_fidelity);
    }
    let (b, f) = (bits.estimate(), fallback.estimate());
    Ok(Table::from_records(vec![vec![
        ("n", n.into()),
        ("d", d.into()),
        ("runs", runs.into()),
        ("columns", model.columns.into()),
        ("bits_per_state", b.mean.into()),
        ("bits_per_state_stderr", b.stderr.into()),
        ("model_bits_per_state", model.bits_per_state.into()),
        ("ebits_per_state", ebits.mean().into()),
        ("model_ebits_per_state", model.ebits_per_state.into()),
        ("fallback_rate", f.mean.into()),
        ("fallback_rate_stderr", binomial_stderr(model.p_fail, runs as u64).into()),
        ("model_p_fail", model.p_fail.into()),
        ("min_fidelity", min_f.into()),
    ]]))
}

fn qudit_measure(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let d = p.d.unwrap_or(3);
    let trials = positive(p.samples.unwrap_or(10_000), "samples")?;
    let mut hits = 0u64;
    for _ in 0..trials {
        let psi = haar_state(d, rng);
        hits += conjugate_basis_measure(d, &psi, rng)?.0 as u64;
    }
    let rate = hits as f64 / trials as f64;
    let expected = 1.0 / d as f64;
    let stderr = binomial_stderr(expected, trials as u64);
    Ok(Table::from_records(vec![vec![
        ("d", d.into()),
        ("trials", trials.into()),
        ("success_rate", rate.into()),
        ("success_rate_stderr", stderr.into()),
        ("expected", expected.into()),
        ("z_score", ((rate - expected).abs() / stderr).into()),
    ]]))
}

fn recycle(p: &Params) -> Result<Table> {
    let s = positive(p.s.unwrap_or(10), "s")?;
    let s_prime = p.sprime.unwrap_or_else(|| default_s_prime(s.min(40)));
    let mut t = Table::new(&[
        "s",
        "s_prime",
        "entropy_source",
        "copies",
        "twirl_entropy",
        "distilled_ebits",
        "e0",
        "bits_forward_per_state",
        "bits_backward",
    ]);
    for source in [EntropySource::Asymptotic, EntropySource::Exact] {
        let l = recycle_accounting(s, s_prime, source)?;
        t.push(vec![
            ("s", s.into()),
            ("s_prime", s_prime.into()),
            ("entropy_source", format!("{source:?}").to_lowercase().into()),
            ("copies", l.copies.into()),
            ("twirl_entropy", l.twirl_entropy.into()),
            ("distilled_ebits", l.distilled.into()),
            ("e0", l.e0.into()),
            ("bits_forward_per_state", l.bits_forward_per_state.into()),
            ("bits_backward", l.bits_backward.map(Value::from).unwrap_or_else(|| "not counted".into())),
        ]);
    }
    Ok(t)
}

fn eq1_check(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let s = positive(p.s.unwrap_or(2), "s")?;
    let samples = positive(p.samples.unwrap_or(20_000), "samples")?;
    let est = rho0_bell_diagonal_mc(s, samples, rng)?;
    let labels: Vec<BellLabel> = BellLabel::all(s).collect();
    let mut t = Table::new(&[
        "s",
        "r",
        "multiplicity",
        "analytic",
        "mc_mean",
        "mc_stderr",
        "abs_error",
        "label_max_z",
        "within_4sigma",
    ]);
    for (r, e) in est.classes.iter().enumerate() {
        let analytic = eq1_value(s, r);
        let members = labels.iter().zip(&est.labels).filter(|(l, _)| l.r() == r);
        let mut max_z = 0.0f64;
        let mut ok = e.within(analytic, 4.0, MACHINE_FLOOR);
        for (_, le) in members {
            max_z = max_z.max(floored_z(le, analytic));
            ok &= le.within(analytic, 4.0, MACHINE_FLOOR);
        }
        t.push(vec![
            ("s", s.into()),
            ("r", r.into()),
            ("multiplicity", class_multiplicity(s, r).into()),
            ("analytic", analytic.into()),
            ("mc_mean", e.mean.into()),
            ("mc_stderr", e.stderr.into()),
            ("abs_error", (e.mean - analytic).abs().into()),
            ("label_max_z", max_z.into()),
            ("within_4sigma", ok.into()),
        ]);
    }
    Ok(t)
}

/// Absolute slack for estimates whose per-sample values are exact up to rounding.
const MACHINE_FLOOR: f64 = 1e-12;

/// z-score with the stderr floored at machine precision.
fn floored_z(e: &Estimate, target: f64) -> f64 {
    (e.mean - target).abs() / e.stderr.max(MACHINE_FLOOR)
}

/// Target lists for the low-entanglement simulation.
fn lowent_targets(kind: &str, n: usize, rng: &mut RngStream) -> Result<Vec<StateVector>> {
    match kind {
        "haar" => Ok((0..n).map(|_| haar_state(2, rng)).collect()),
        "south-pole" => Ok(vec![StateVector::basis(2, 1); n]),
        other => Err(Error::Config(format!("unknown target list {other:?} (haar or south-pole)"))),
    }
}

fn lowent_sim(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let n = positive(p.n.unwrap_or(64), "n")?;
    let s = positive(p.s.unwrap_or(4), "s")?;
    let theta = p.theta.unwrap_or(2.0 * PI / 3.0);
    let runs = positive(p.samples.unwrap_or(50), "samples")?;
    let kind = p.targets.as_deref().unwrap_or("haar");
    let cap = cap_params(theta)?;
    let (mut bits, mut ebits, mut success) =
        (MeanAccumulator::default(), MeanAccumulator::default(), MeanAccumulator::default());
    let mut columns = 0;
    for _ in 0..runs {
        let targets = lowent_targets(kind, n, rng)?;
        let run = crate::lowent::simulate_lowent(n, s, theta, &targets, rng)?;
        bits.push(run.bits_per_state());
        ebits.push(run.ebits_per_state());
        for b in &run.subblocks {
            success.push(b.selected.is_some() as u8 as f64);
            columns = columns.max(b.columns);
        }
    }
    let (model_bits, model_ebits) = if n % s == 0 {
        let (b, e) = expected_lowent_costs(n, s, theta)?;
        (Some(b), Some(e))
    } else {
        (None, None)
    };
    let overhead = prerotation_overhead_bits(s);
    let (b, e, ok) = (bits.estimate(), ebits.estimate(), success.estimate());
    Ok(Table::from_records(vec![vec![
        ("theta", theta.into()),
        ("n", n.into()),
        ("s", s.into()),
        ("runs", runs.into()),
        ("targets", kind.into()),
        ("columns", columns.into()),
        ("bits_per_state", b.mean.into()),
        ("bits_per_state_stderr", b.stderr.into()),
        ("model_bits_per_state", model_bits.into()),
        ("asymptotic_bits_per_state", (cap.s_prime + 2.0 * cap.s + overhead / n as f64).into()),
        ("ebits_per_state", e.mean.into()),
        ("ebits_per_state_stderr", e.stderr.into()),
        ("model_ebits_per_state", model_ebits.into()),
        ("subblock_success_rate", ok.mean.into()),
        ("subblock_success_rate_stderr", ok.stderr.into()),
        ("prerotation_bits", overhead.into()),
    ]]))
}

/// Which part of the tradeoff figure to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Low-entanglement points only.
    LowEnt,
    /// Low-entanglement points, T, R and the time-sharing envelope.
    Convex,
    /// The two protocol points T and R.
    Points,
}

impl std::str::FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowent" => Ok(CurveKind::LowEnt),
            "convex" => Ok(CurveKind::Convex),
            "points" => Ok(CurveKind::Points),
            other => Err(Error::Config(format!("unknown curve kind {other:?} (lowent, convex, points)"))),
        }
    }
}

/// Curve rows sorted by e, with the causality floor b_min = 1.
pub fn emit_curve(kind: CurveKind, grid: &[f64]) -> Result<Table> {
    let mut points = match kind {
        CurveKind::LowEnt => tradeoff_curve(grid, false)?,
        CurveKind::Convex => tradeoff_curve(grid, true)?,
        CurveKind::Points => vec![CostPoint::teleport(), CostPoint::recycling()],
    };
    points.sort_by(|a, b| a.e.total_cmp(&b.e).then(b.b.total_cmp(&a.b)));
    let mut t = Table::new(&["source", "theta", "alpha", "e", "b", "b_min"]);
    for pt in points {
        let (theta, alpha) = match pt.source {
            CostSource::LowEnt { theta } => (Some(theta), None),
            CostSource::Convex { alpha, .. } => (None, Some(alpha)),
            _ => (None, None),
        };
        t.push(vec![
            ("source", pt.source.label().into()),
            ("theta", theta.into()),
            ("alpha", alpha.into()),
            ("e", pt.e.into()),
            ("b", pt.b.into()),
            ("b_min", 1.0.into()),
        ]);
    }
    Ok(t)
}

fn filter(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let trials = positive(p.samples.unwrap_or(10_000), "samples")?;
    let psi = match &p.lambda {
        Some(l) => schmidt_diagonal_state(l)?,
        None => {
            let d = p.d.unwrap_or(2);
            haar_state(d * d, rng).with_dims(vec![d, d])?
        }
    };
    let s = filter_trials(&psi, trials, rng)?;
    Ok(Table::from_records(vec![vec![
        ("d", s.d.into()),
        ("lambda_max", s.lambda_max.into()),
        ("trials", trials.into()),
        ("analytic_prob", s.analytic_prob.into()),
        ("empirical_prob", s.empirical_prob.into()),
        ("attempts_mean", s.attempts.mean.into()),
        ("attempts_stderr", s.attempts.stderr.into()),
        ("bits_mean", s.bits.mean.into()),
        ("bits_stderr", s.bits.stderr.into()),
        ("expected_bits", s.expected_bits.into()),
        ("min_fidelity", s.min_fidelity.into()),
    ]]))
}

fn holevo(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let name = p.ensemble.as_deref().unwrap_or("bb84");
    let h = 1.0 / 2f64.sqrt();
    let states = match name {
        "computational" => vec![StateVector::basis(2, 0), StateVector::basis(2, 1)],
        "singleton" => vec![StateVector::basis(2, 0)],
        "bb84" => vec![
            StateVector::basis(2, 0),
            StateVector::basis(2, 1),
            StateVector::from_amplitudes(&[c(h, 0.0), c(h, 0.0)])?,
            StateVector::from_amplitudes(&[c(h, 0.0), c(-h, 0.0)])?,
        ],
        "haar" => {
            let d = p.d.unwrap_or(2);
            let count = positive(p.n.unwrap_or(4), "n")?;
            (0..count)
                .map(|_| haar_state(d * d, rng).with_dims(vec![d, d]))
                .collect::<Result<_>>()?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown ensemble {other:?} (computational, singleton, bb84, haar)"
            )))
        }
    };
    let count = states.len();
    let dim = *states[0].dims().last().expect("states have at least one factor");
    let bound = holevo_lower_bound(&EnsembleSpec::uniform(states)?)?;
    Ok(Table::from_records(vec![vec![
        ("ensemble", name.into()),
        ("states", count.into()),
        ("bob_dim", dim.into()),
        ("bound_bits", bound.into()),
    ]]))
}

fn horodecki(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let d = p.d.unwrap_or(2);
    let samples = positive(p.samples.unwrap_or(20_000), "samples")?;
    let name = p.channel.as_deref().unwrap_or("depolarizing");
    let prob = p.p.unwrap_or(0.2);
    let channel = match name {
        "identity" => QuantumChannel::identity(d),
        "depolarizing" => QuantumChannel::depolarizing(d, prob)?,
        "fully-depolarizing" => QuantumChannel::fully_depolarizing(d),
        "random" => QuantumChannel::random(d, d, rng),
        "teleport-guess" => guess_channel(&GuessSpec::teleportation(d)?)?,
        other => {
            return Err(Error::Config(format!(
                "unknown channel {other:?} (identity, depolarizing, fully-depolarizing, random, teleport-guess)"
            )))
        }
    };
    let frac = entangled_fraction(&channel)?;
    let f = horodecki_f(frac, d)?;
    let est = avg_fidelity(&channel, samples, rng);
    Ok(Table::from_records(vec![vec![
        ("channel", name.into()),
        ("d", d.into()),
        ("p", (if name == "depolarizing" { Some(prob) } else { None }).into()),
        ("entangled_fraction", frac.into()),
        ("f_horodecki", f.into()),
        ("f_mc", est.mean.into()),
        ("f_mc_stderr", est.stderr.into()),
        ("abs_error", (est.mean - f).abs().into()),
        ("within_4sigma", est.within(f, 4.0, MACHINE_FLOOR).into()),
    ]]))
}

/// Uniform guesses over the Weyl corrections: tiled when 2ᵏ ≥ d², truncated
/// to the first 2ᵏ otherwise.
pub fn weyl_guess(k: u32, d: usize) -> Result<GuessSpec> {
    let base = weyl_set(d);
    let count = 1usize
        .checked_shl(k)
        .filter(|_| k <= crate::bounds::MAX_MESSAGE_BITS)
        .ok_or_else(|| Error::OutOfRange(format!("k = {k} too large")))?;
    if count >= base.len() {
        GuessSpec::repeated(k, &base)
    } else {
        GuessSpec::uniform(k, base[..count].to_vec())
    }
}

fn causality(p: &Params) -> Result<Table> {
    let k = p.k.unwrap_or(2);
    let d = p.d.unwrap_or(2);
    let v = causality_check(k, d, &weyl_guess(k, d)?)?;
    Ok(Table::from_records(vec![vec![
        ("k", k.into()),
        ("d", d.into()),
        ("entangled_fraction", v.entangled_fraction.into()),
        ("f", v.f.into()),
        ("ceiling", v.ceiling.into()),
        ("floor", v.floor.into()),
        ("within_ceiling", v.within_ceiling.into()),
        ("contradiction_predicted", v.contradiction_predicted.into()),
        ("contradiction", v.contradiction.into()),
    ]]))
}

fn teleport(p: &Params, rng: &mut RngStream) -> Result<Table> {
    let d = p.d.unwrap_or(2);
    let samples = positive(p.samples.unwrap_or(1000), "samples")?;
    let (mut bits, mut ebits, mut min_f) = (0.0, 0.0, 1.0f64);
    for _ in 0..samples {
        let run = teleport_qudit(&haar_state(d, rng), rng)?;
        bits += run.transcript.bits_forward;
        ebits += run.transcript.ebits_consumed;
        min_f = min_f.min(run.transcript.output_fidelity);
    }
    Ok(Table::from_records(vec![vec![
        ("d", d.into()),
        ("samples", samples.into()),
        ("bits_per_state", (bits / samples as f64).into()),
        ("ebits_per_state", (ebits / samples as f64).into()),
        ("min_fidelity", min_f.into()),
    ]]))
}
