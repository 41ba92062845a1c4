//! Fidelity bounds for restricted RSP protocols.
//!
//! If Bob could prepare a state from fewer than 2·log₂d bits without waiting
//! for Alice, he could guess the message instead: with probability pᵢ he
//! applies the correction Uᵢ of message i. The resulting guessing channel 𝒮
//! has average fidelity f(𝒮) = (F·d + 1)/(d + 1), where F is its entangled
//! fraction, and causality requires f ≤ 1/d.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{c, haar_state, phi_plus, weyl_operator, CMatrix, RngStream, TOL_OBJECT};
use crate::stats::{Estimate, MeanAccumulator};

pub use crate::qmath::QuantumChannel;

/// Largest message length for an enumerable guess table.
pub const MAX_MESSAGE_BITS: u32 = 10;

/// Bob's coin: with probability pᵢ apply Uᵢ. Entry 0 is the correct guess.
#[derive(Debug, Clone)]
pub struct GuessSpec {
    probs: Vec<f64>,
    unitaries: Vec<CMatrix>,
    k: u32,
}

impl GuessSpec {
    pub fn new(k: u32, probs: Vec<f64>, unitaries: Vec<CMatrix>) -> Result<Self> {
        if k > MAX_MESSAGE_BITS {
            return Err(Error::OutOfRange(format!("k = {k} exceeds {MAX_MESSAGE_BITS}")));
        }
        let count = 1usize << k;
        if probs.len() != count || unitaries.len() != count {
            return Err(Error::DimensionMismatch(format!(
                "k = {k} needs {count} entries, got {} probabilities and {} unitaries",
                probs.len(),
                unitaries.len()
            )));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidState("guess probability outside [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("guess probabilities sum to {total}")));
        }
        let d = unitaries[0].nrows();
        for u in &unitaries {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::DimensionMismatch("guess unitaries differ in dimension".into()));
            }
            let dev = (u.adjoint() * u - CMatrix::identity(d, d)).camax();
            if dev > TOL_OBJECT {
                return Err(Error::NotUnitary(dev));
            }
        }
        if (&unitaries[0] - CMatrix::identity(d, d)).camax() > TOL_OBJECT {
            return Err(Error::InvalidState("the first guess must be the identity".into()));
        }
        Ok(Self { probs, unitaries, k })
    }

    /// Equal weights over the given unitaries.
    pub fn uniform(k: u32, unitaries: Vec<CMatrix>) -> Result<Self> {
        let n = unitaries.len().max(1);
        Self::new(k, vec![1.0 / n as f64; unitaries.len()], unitaries)
    }

    /// Uniform over 2ᵏ messages, each base unitary repeated equally often.
    pub fn repeated(k: u32, base: &[CMatrix]) -> Result<Self> {
        let count = 1usize << k.min(MAX_MESSAGE_BITS + 1);
        if base.is_empty() || !count.is_multiple_of(base.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{} base unitaries do not tile {count} messages",
                base.len()
            )));
        }
        let reps = count / base.len();
        let unitaries = base.iter().flat_map(|u| std::iter::repeat_n(u.clone(), reps)).collect();
        Self::uniform(k, unitaries)
    }

    /// Teleportation corrections XᵃZᵇ for d = 2^(k/2), uniformly weighted.
    pub fn teleportation(d: usize) -> Result<Self> {
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::OutOfRange(format!("teleportation guess needs d = 2^q, got {d}")));
        }
        let k = 2 * d.trailing_zeros();
        Self::uniform(k, weyl_set(d))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    /// Σpᵢ², the chance two independent draws agree.
    pub fn collision_probability(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }
}

/// All d² operators XᵃZᵇ, identity first.
pub fn weyl_set(d: usize) -> Vec<CMatrix> {
    (0..d * d).map(|ab| weyl_operator(d, ab / d, ab % d)).collect()
}

/// Kraus set {√pᵢ·Uᵢ}, dropping zero-weight entries.
pub fn guess_channel(spec: &GuessSpec) -> Result<QuantumChannel> {
    let floor = 2f64.powi(-(spec.k as i32));
    let collision = spec.collision_probability();
    if collision < floor - 1e-12 {
        return Err(Error::InvalidState(format!("Σp² = {collision} below 2^-k = {floor}")));
    }
    let kraus = spec
        .probs
        .iter()
        .zip(&spec.unitaries)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, u)| u * c(p.sqrt(), 0.0))
        .collect();
    QuantumChannel::new(kraus)
}

const FIDELITY_CHUNK: usize = 4096;

/// Haar Monte Carlo of ∫dψ ⟨ψ|𝒮(ψ)|ψ⟩ = Σ_K |⟨ψ|K|ψ⟩|².
pub fn avg_fidelity(channel: &QuantumChannel, n_samples: usize, rng: &mut RngStream) -> Estimate {
    let d = channel.dim();
    let base = RngStream::new(rng.random());
    let chunks = n_samples.div_ceil(FIDELITY_CHUNK);
    let parts: Vec<MeanAccumulator> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sub = base.substream(chunk as u64);
            let mut acc = MeanAccumulator::default();
            for _ in 0..FIDELITY_CHUNK.min(n_samples - chunk * FIDELITY_CHUNK) {
                let psi = haar_state(d, &mut sub);
                let v = psi.amplitudes();
                let f: f64 = channel.kraus().iter().map(|k| v.dotc(&(k * v)).norm_sqr()).sum();
                acc.push(f);
            }
            acc
        })
        .collect();
    let mut total = MeanAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    total.estimate()
}

/// ⟨Φ⁺|(I ⊗ 𝒮)(|Φ⁺⟩⟨Φ⁺|)|Φ⁺⟩, from each Kraus operator acting on the second
/// half of |Φ⁺_d⟩.
pub fn entangled_fraction(channel: &QuantumChannel) -> Result<f64> {
    let phi = phi_plus(channel.dim());
    let mut total = 0.0;
    for k in channel.kraus() {
        let raw = crate::qmath::apply_to_factor(&phi, k, 1)?;
        total += phi.amplitudes().dotc(&raw).norm_sqr();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// f = (F·d + 1)/(d + 1)
pub fn horodecki_f(entangled_fraction: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&entangled_fraction) {
        return Err(Error::OutOfRange(format!("entangled fraction {entangled_fraction} outside [0, 1]")));
    }
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} below 2")));
    }
    let d = d as f64;
    Ok((entangled_fraction * d + 1.0) / (d + 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct CausalityVerdict {
    pub k: u32,
    pub d: usize,
    pub entangled_fraction: f64,
    /// Average fidelity of the guessing channel.
    pub f: f64,
    /// Causality ceiling 1/d.
    pub ceiling: f64,
    /// (2⁻ᵏd + 1)/(d + 1), the fidelity guaranteed by the correct-guess branch.
    pub floor: f64,
    pub within_ceiling: bool,
    /// k < 2·log₂d, where a contradiction is predicted.
    pub contradiction_predicted: bool,
    /// f exceeds 1/d: the protocol would signal faster than light.
    pub contradiction: bool,
}

/// Evaluates the guessing channel of `spec` against f ≤ 1/d.
pub fn causality_check(k: u32, d: usize, spec: &GuessSpec) -> Result<CausalityVerdict> {
    if spec.k() != k || spec.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "spec has k = {}, d = {}; asked for k = {k}, d = {d}",
            spec.k(),
            spec.dim()
        )));
    }
    let p_max = spec.probs.iter().cloned().fold(0.0, f64::max);
    if spec.probs[0] < p_max - 1e-12 {
        return Err(Error::InvalidState("the correct guess must have the largest probability".into()));
    }
    let channel = guess_channel(spec)?;
    let frac = entangled_fraction(&channel)?;
    let f = horodecki_f(frac, d)?;
    let ceiling = 1.0 / d as f64;
    let floor = horodecki_f(2f64.powi(-(k as i32)).min(1.0), d)?;
    let tol = 1e-12;
    Ok(CausalityVerdict {
        k,
        d,
        entangled_fraction: frac,
        f,
        ceiling,
        floor,
        within_ceiling: f <= ceiling + tol,
        contradiction_predicted: (k as f64) < 2.0 * (d as f64).log2(),
        contradiction: f > ceiling + tol,
    })
}
