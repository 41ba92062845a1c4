use rand::Rng;

use super::state::apply_on_factors;
use super::{identity_deviation, CMatrix, CVector, RngStream, StateVector, TOL_OBJECT};
use crate::error::{Error, Result};

/// Result of a measurement: which outcome occurred, its Born probability and
/// the normalized post-measurement state.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    pub state: StateVector,
}

pub(crate) fn sample_index(probs: &[f64], rng: &mut RngStream) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

fn branches(state: &StateVector, ops: &[CMatrix], on: &[usize]) -> Result<(Vec<CVector>, Vec<f64>)> {
    let vecs: Vec<CVector> = ops
        .iter()
        .map(|m| apply_on_factors(state.amplitudes(), state.dims(), m, on))
        .collect::<Result<_>>()?;
    let probs = vecs.iter().map(|v| v.norm_squared()).collect();
    Ok((vecs, probs))
}

fn pick(state: &StateVector, vecs: Vec<CVector>, probs: Vec<f64>, rng: &mut RngStream) -> Result<Outcome> {
    let index = sample_index(&probs, rng);
    let probability = probs[index];
    let amps = vecs.into_iter().nth(index).expect("index in range");
    Ok(Outcome {
        index,
        probability,
        state: StateVector::from_unnormalized(amps, state.dims().to_vec())?,
    })
}

/// Projective measurement with projectors acting on the factors `on`.
///
/// Outcome k occurs with probability ⟨ψ|Πₖ|ψ⟩ and leaves Πₖ|ψ⟩ renormalized.
pub fn projective_measure(
    state: &StateVector,
    projectors: &[CMatrix],
    on: &[usize],
    rng: &mut RngStream,
) -> Result<Outcome> {
    let first = projectors
        .first()
        .ok_or(Error::IncompleteMeasurement(1.0))?;
    let mut sum = CMatrix::zeros(first.nrows(), first.ncols());
    for p in projectors {
        if p.shape() != first.shape() {
            return Err(Error::DimensionMismatch("projectors differ in shape".into()));
        }
        let idem = (p * p - p).camax();
        if idem > TOL_OBJECT {
            return Err(Error::InvalidState(format!("operator is not a projector (deviation {idem:.3e})")));
        }
        sum += p;
    }
    let dev = identity_deviation(&sum);
    if dev > TOL_OBJECT {
        return Err(Error::IncompleteMeasurement(dev));
    }
    let (vecs, probs) = branches(state, projectors, on)?;
    pick(state, vecs, probs, rng)
}

/// Generalized measurement with measurement operators Mₖ (Σ Mₖ†Mₖ = I) on
/// the factors `on`. Outcome k leaves Mₖ|ψ⟩ renormalized.
pub fn generalized_measure(
    state: &StateVector,
    operators: &[CMatrix],
    on: &[usize],
    rng: &mut RngStream,
) -> Result<Outcome> {
    let first = operators
        .first()
        .ok_or(Error::IncompleteMeasurement(1.0))?;
    let mut sum = CMatrix::zeros(first.ncols(), first.ncols());
    for m in operators {
        sum += m.adjoint() * m;
    }
    let dev = identity_deviation(&sum);
    if dev > TOL_OBJECT {
        return Err(Error::IncompleteMeasurement(dev));
    }
    let (vecs, probs) = branches(state, operators, on)?;
    pick(state, vecs, probs, rng)
}

/// Measures the factors `on` in an orthonormal basis and discards them,
/// returning the outcome index, its probability and the normalized state of
/// the remaining factors.
pub fn measure_in_basis(
    state: &StateVector,
    basis: &[StateVector],
    on: &[usize],
    rng: &mut RngStream,
) -> Result<(usize, f64, StateVector)> {
    let mut gram_dev = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i..] {
            let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((a.inner(b).norm() - target).abs());
        }
    }
    let rest: Vec<(CVector, Vec<usize>)> = basis
        .iter()
        .map(|b| state.contract_raw(b.amplitudes(), on))
        .collect::<Result<_>>()?;
    let local_dim = basis.first().map(|b| b.dim()).unwrap_or(0);
    if basis.len() != local_dim || gram_dev > TOL_OBJECT {
        return Err(Error::IncompleteMeasurement(gram_dev.max(1.0 - basis.len() as f64 / local_dim.max(1) as f64)));
    }
    let probs: Vec<f64> = rest.iter().map(|(v, _)| v.norm_squared()).collect();
    let index = sample_index(&probs, rng);
    let (amps, dims) = rest.into_iter().nth(index).expect("index in range");
    Ok((index, probs[index], StateVector::from_unnormalized(amps, dims)?))
}
