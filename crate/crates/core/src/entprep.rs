//! Remote preparation of bipartite entangled states by local filtering.
//!
//! For a target ψ = Σ √λᵢ |aᵢ⟩|bᵢ⟩ on d×d, Alice turns a shared |Φ⁺_d⟩ into
//! φ = (1/√d) Σ |aᵢ⟩|bᵢ⟩ with the local unitary U_A = A·Bᵀ and then applies
//! the two-outcome filter
//!
//! ```text
//! Π₁ = (1/Λ) Σ λᵢ |aᵢ⟩⟨aᵢ|,   Π₀ = I − Π₁,   Λ = max λᵢ
//! ```
//!
//! Outcome 1 leaves exactly ψ and occurs with probability 1/(Λd). On outcome
//! 0 the pair is discarded and a fresh one is used.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{
    c, generalized_measure, partial_trace, phi_plus, schmidt, vn_entropy, CMatrix, DensityMatrix, RngStream,
    SchmidtForm, StateVector, UnitaryMatrix, MAX_DIM, TOL_OBJECT,
};
use crate::stats::{Estimate, MeanAccumulator};
use crate::transcript::{Direction, Transcript};

/// Attempts after which [`prepare_entangled`] gives up.
pub const MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct FilterPOVM {
    pub pi1: CMatrix,
    pub pi0: CMatrix,
    pub lambda_max: f64,
    sqrt_pi1: CMatrix,
    sqrt_pi0: CMatrix,
}

impl FilterPOVM {
    /// Measurement operators (√Π₀, √Π₁), indexed by outcome.
    pub fn operators(&self) -> [CMatrix; 2] {
        [self.sqrt_pi0.clone(), self.sqrt_pi1.clone()]
    }

    /// Π₁ = I, so the filter never fails.
    pub fn is_trivial(&self) -> bool {
        let d = self.pi1.nrows();
        (&self.pi1 - CMatrix::identity(d, d)).camax() < TOL_OBJECT
    }
}

pub fn filter_povm(form: &SchmidtForm) -> Result<FilterPOVM> {
    let lambda = form.lambda_max();
    if lambda <= 0.0 {
        return Err(Error::InvalidState("all Schmidt coefficients vanish".into()));
    }
    let d = form.basis_a()[0].dim();
    let mut ops = [CMatrix::zeros(d, d), CMatrix::zeros(d, d), CMatrix::zeros(d, d), CMatrix::zeros(d, d)];
    for (l, a) in form.coefficients().iter().zip(form.basis_a()) {
        let ratio = (l / lambda).clamp(0.0, 1.0);
        let proj = a.amplitudes() * a.amplitudes().adjoint();
        ops[0] += &proj * c(ratio, 0.0);
        ops[1] += &proj * c(1.0 - ratio, 0.0);
        ops[2] += &proj * c(ratio.sqrt(), 0.0);
        ops[3] += &proj * c((1.0 - ratio).sqrt(), 0.0);
    }
    let [pi1, pi0, sqrt_pi1, sqrt_pi0] = ops;
    Ok(FilterPOVM { pi1, pi0, lambda_max: lambda, sqrt_pi1, sqrt_pi0 })
}

/// Embeds a dA×dB state into d×d with d = max(dA, dB); the smaller factor
/// occupies the leading block.
pub fn pad_square(psi: &StateVector) -> Result<StateVector> {
    let dims = psi.dims();
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a bipartite state, got dims {dims:?}")));
    }
    let (da, db) = (dims[0], dims[1]);
    let d = da.max(db);
    if d * d > MAX_DIM {
        return Err(Error::Guard(format!("{d}×{d} exceeds the dense limit")));
    }
    if da == db {
        return Ok(psi.clone());
    }
    let mut amps = crate::qmath::CVector::zeros(d * d);
    for i in 0..da {
        for j in 0..db {
            amps[i * d + j] = psi.amplitudes()[i * db + j];
        }
    }
    StateVector::new(amps, vec![d, d])
}

/// U_A = A·Bᵀ with the Schmidt vectors as columns, so that
/// (U_A ⊗ I)|Φ⁺⟩ = (1/√d) Σ |aᵢ⟩|bᵢ⟩.
pub fn local_unitary(form: &SchmidtForm) -> Result<UnitaryMatrix> {
    let cols = |v: &[StateVector]| {
        let d = v[0].dim();
        CMatrix::from_fn(d, v.len(), |r, k| v[k].amplitudes()[r])
    };
    UnitaryMatrix::new(cols(form.basis_a()) * cols(form.basis_b()).transpose())
}

#[derive(Debug, Clone)]
pub struct EntangledPrep {
    pub transcript: Transcript,
    pub attempts: usize,
    pub state: StateVector,
    /// 1/(Λd)
    pub success_prob: f64,
    pub lambda_max: f64,
    pub d: usize,
}

struct Prepared {
    target: StateVector,
    d: usize,
    filter: FilterPOVM,
    rotated: StateVector,
}

fn prepare(psi: &StateVector) -> Result<Prepared> {
    let target = pad_square(psi)?;
    let d = target.dims()[0];
    let form = schmidt(&target, d, d)?;
    let filter = filter_povm(&form)?;
    let rotated = phi_plus(d).apply_unitary(&local_unitary(&form)?, &[0])?;
    Ok(Prepared { target, d, filter, rotated })
}

/// Repeats unitary-then-filter on fresh pairs until the filter succeeds.
/// Each attempt costs one pair and, unless the filter is trivial, one bit
/// telling Bob whether to keep his half.
pub fn prepare_entangled(psi: &StateVector, rng: &mut RngStream) -> Result<EntangledPrep> {
    let p = prepare(psi)?;
    run_attempts(&p, rng)
}

fn run_attempts(p: &Prepared, rng: &mut RngStream) -> Result<EntangledPrep> {
    let ops = p.filter.operators();
    let trivial = p.filter.is_trivial();
    let mut transcript = Transcript::new();
    for attempt in 1..=MAX_ATTEMPTS {
        transcript.consume_ebits((p.d as f64).log2());
        let out = generalized_measure(&p.rotated, &ops, &[0], rng)?;
        if !trivial {
            transcript.send(Direction::Forward, "filter-outcome", 1, out.index as u64);
        }
        if out.index == 1 {
            transcript.record_fidelity(out.state.overlap(&p.target));
            return Ok(EntangledPrep {
                transcript,
                attempts: attempt,
                state: out.state,
                success_prob: 1.0 / (p.filter.lambda_max * p.d as f64),
                lambda_max: p.filter.lambda_max,
                d: p.d,
            });
        }
    }
    Err(Error::Guard(format!("filter did not succeed within {MAX_ATTEMPTS} attempts")))
}

/// Summary of repeated preparations of one target.
#[derive(Debug, Clone, Serialize)]
pub struct FilterStats {
    pub lambda_max: f64,
    pub d: usize,
    pub analytic_prob: f64,
    /// Successes over attempts across all trials.
    pub empirical_prob: f64,
    pub attempts: Estimate,
    pub bits: Estimate,
    pub min_fidelity: f64,
    /// log₂(Λd)
    pub expected_bits: f64,
}

/// Runs `trials` independent preparations in parallel.
pub fn filter_trials(psi: &StateVector, trials: usize, rng: &mut RngStream) -> Result<FilterStats> {
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let p = prepare(psi)?;
    let base = RngStream::new(rng.random());
    let runs: Vec<Result<EntangledPrep>> = (0..trials)
        .into_par_iter()
        .map(|t| run_attempts(&p, &mut base.substream(t as u64)))
        .collect();
    let mut attempts = MeanAccumulator::default();
    let mut bits = MeanAccumulator::default();
    let mut min_fidelity = 1.0f64;
    let mut total_attempts = 0usize;
    for r in runs {
        let r = r?;
        attempts.push(r.attempts as f64);
        bits.push(r.transcript.bits_forward);
        min_fidelity = min_fidelity.min(r.transcript.output_fidelity);
        total_attempts += r.attempts;
    }
    let analytic = 1.0 / (p.filter.lambda_max * p.d as f64);
    Ok(FilterStats {
        lambda_max: p.filter.lambda_max,
        d: p.d,
        analytic_prob: analytic,
        empirical_prob: trials as f64 / total_attempts as f64,
        attempts: attempts.estimate(),
        bits: bits.estimate(),
        min_fidelity,
        expected_bits: (p.filter.lambda_max * p.d as f64).log2().max(0.0),
    })
}

/// Σⱼ log₂(Λⱼ d), each term floored at 0.
pub fn expected_bits(states: &[StateVector]) -> Result<f64> {
    states
        .iter()
        .map(|psi| {
            let t = pad_square(psi)?;
            let d = t.dims()[0];
            let form = schmidt(&t, d, d)?;
            Ok((form.lambda_max() * d as f64).log2().max(0.0))
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    states: Vec<StateVector>,
    weights: Vec<f64>,
}

impl EnsembleSpec {
    pub fn new(states: Vec<StateVector>, weights: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} states with {} weights",
                states.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidState("negative ensemble weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("ensemble weights sum to {total}")));
        }
        let dims = states[0].dims();
        if states.iter().any(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch("ensemble states differ in dims".into()));
        }
        Ok(Self { states, weights })
    }

    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let w = vec![1.0 / states.len().max(1) as f64; states.len()];
        Self::new(states, w)
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Bob's reduced state: tr_A for bipartite states, the state itself for a
/// single factor.
fn bob_marginal(psi: &StateVector) -> Result<DensityMatrix> {
    match psi.dims().len() {
        1 => Ok(psi.to_density()),
        2 => partial_trace(&psi.to_density(), &[1]),
        _ => Err(Error::DimensionMismatch(format!("expected one or two factors, got {:?}", psi.dims()))),
    }
}

/// S(ρ̄) − Σ wᵢ S(ρᵢ) on Bob's side, floored at 0.
pub fn holevo_lower_bound(ensemble: &EnsembleSpec) -> Result<f64> {
    let marginals = ensemble.states.iter().map(bob_marginal).collect::<Result<Vec<_>>>()?;
    let average = DensityMatrix::mixture(&ensemble.weights, &marginals)?;
    let own: f64 = ensemble
        .weights
        .iter()
        .zip(&marginals)
        .map(|(w, rho)| w * vn_entropy(rho))
        .sum();
    Ok((vn_entropy(&average) - own).max(0.0))
}

/// √λ₀|00⟩ + √λ₁|11⟩ + … on d×d.
pub fn schmidt_diagonal_state(lambdas: &[f64]) -> Result<StateVector> {
    let d = lambdas.len();
    let mut amps = crate::qmath::CVector::zeros(d * d);
    for (i, l) in lambdas.iter().enumerate() {
        if *l < 0.0 {
            return Err(Error::InvalidState("negative Schmidt coefficient".into()));
        }
        amps[i * d + i] = c(l.sqrt(), 0.0);
    }
    StateVector::new(amps, vec![d, d])
}
