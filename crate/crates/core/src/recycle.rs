//! Entanglement recycling for the high-entanglement protocol.
//!
//! Within a subblock of s states Alice replaces s separate measurements by a
//! two-outcome measurement {Π₀, Π₁} with Π₁ the projector onto ⊗ⱼψⱼ*. The
//! failure branch ρ₀ stays highly entangled; after twirling it is Bell
//! diagonal with
//!
//! ```text
//! ⟨B|ρ₀|B⟩ = (2ˢ−2)/(2ˢ−1)·δ_{r,s} + (1/3)^{s−r} / (2ˢ(2ˢ−1))
//! ```
//!
//! for a Bell product B with r factors Φ⁺. Distillation by hashing is not
//! executed: its yield c(s − S) is ledger arithmetic.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{
    bell_basis_matrix, bell_state, haar_state, outer, projective_measure, Bell, BellLabel, CMatrix, CVector,
    DensityMatrix, RngStream, StateVector,
};
use crate::stats::{Estimate, MeanAccumulator};

/// Largest subblock simulated with dense vectors.
pub const MAX_DENSE_PAIRS: usize = 3;
/// Largest subblock for the combinatorial entropy.
pub const MAX_ENTROPY_PAIRS: usize = 40;

fn check_pairs(s: usize, max: usize) -> Result<()> {
    if s == 0 || s > max {
        return Err(Error::OutOfRange(format!("subblock size {s} outside 1..={max}")));
    }
    Ok(())
}

fn alice_factors(s: usize) -> Vec<usize> {
    (0..s).map(|j| 2 * j).collect()
}

/// |Φ⁺⟩^⊗s, pair-ordered.
pub fn shared_pairs(s: usize) -> StateVector {
    bell_state(&BellLabel::new(vec![Bell::PhiPlus; s]))
}

/// Π₁ = |⊗ψⱼ*⟩⟨⊗ψⱼ*| on Alice's s qubits.
fn success_projector(targets: &[StateVector]) -> CMatrix {
    let mut v = CVector::from_element(1, num_complex::Complex64::new(1.0, 0.0));
    for t in targets {
        v = v.kronecker(&t.conjugate().amplitudes().clone());
    }
    outer(&v)
}

fn check_targets(s: usize, targets: &[StateVector]) -> Result<()> {
    check_pairs(s, MAX_DENSE_PAIRS)?;
    if targets.len() != s || targets.iter().any(|t| t.dim() != 2) {
        return Err(Error::DimensionMismatch(format!("need {s} qubit targets")));
    }
    Ok(())
}

/// Probability of outcome 1 and the normalized post-measurement state for
/// the requested outcome, computed without sampling.
pub fn measurement_branch(targets: &[StateVector], outcome: u8) -> Result<(f64, StateVector)> {
    let s = targets.len();
    check_targets(s, targets)?;
    let shared = shared_pairs(s);
    let pi1 = success_projector(targets);
    let success = shared.apply_local(&pi1, &alice_factors(s))?;
    // Π₁|Φ⟩ = |success⟩⟨success|Φ⟩, so its squared norm is the overlap
    let p_one = shared.inner(&success).norm_sqr();
    let state = match outcome {
        1 => success,
        0 => {
            let raw = shared.amplitudes() - success.amplitudes() * shared.inner(&success).conj();
            StateVector::from_unnormalized(raw, shared.dims().to_vec())?
        }
        _ => return Err(Error::OutOfRange(format!("outcome {outcome} is not 0 or 1"))),
    };
    Ok((p_one, state))
}

#[derive(Debug, Clone)]
pub struct IncompleteOutcome {
    /// 1 when every Bob qubit holds its target.
    pub outcome: u8,
    pub state: StateVector,
    /// Born probability of outcome 1 for these targets.
    pub p_one: f64,
}

/// Two-outcome measurement {Π₀ = I − Π₁, Π₁} on Alice's halves of |Φ⁺⟩^⊗s.
pub fn incomplete_measure(s: usize, targets: &[StateVector], rng: &mut RngStream) -> Result<IncompleteOutcome> {
    check_targets(s, targets)?;
    let pi1 = success_projector(targets);
    let dim = pi1.nrows();
    let pi0 = CMatrix::identity(dim, dim) - &pi1;
    let shared = shared_pairs(s);
    let out = projective_measure(&shared, &[pi0, pi1], &alice_factors(s), rng)?;
    let p_one = if out.index == 1 { out.probability } else { 1.0 - out.probability };
    Ok(IncompleteOutcome {
        outcome: out.index as u8,
        state: out.state,
        p_one,
    })
}

/// Diagonal element of the averaged failure-branch state for a Bell product
/// with r factors Φ⁺ out of s.
pub fn eq1_value(s: usize, r: usize) -> f64 {
    assert!(r <= s, "r = {r} exceeds s = {s}");
    let two_s = 2f64.powi(s as i32);
    let delta = if r == s { (two_s - 2.0) / (two_s - 1.0) } else { 0.0 };
    delta + (1.0f64 / 3.0).powi((s - r) as i32) / (two_s * (two_s - 1.0))
}

/// Number of Bell products with exactly r factors Φ⁺: C(s, r)·3^{s−r}.
pub fn class_multiplicity(s: usize, r: usize) -> f64 {
    binomial(s, r) * 3f64.powi((s - r) as i32)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bell-diagonal distribution stored per r-class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellDiagonalDist {
    pub s: usize,
    /// Probability of each individual label in class r, for r = 0..=s.
    pub class_probs: Vec<f64>,
}

impl BellDiagonalDist {
    /// The closed-form distribution of the twirled failure branch.
    pub fn failure_branch(s: usize) -> Self {
        Self {
            s,
            class_probs: (0..=s).map(|r| eq1_value(s, r)).collect(),
        }
    }

    pub fn label_prob(&self, label: &BellLabel) -> f64 {
        self.class_probs[label.r()]
    }

    pub fn total(&self) -> f64 {
        self.class_probs
            .iter()
            .enumerate()
            .map(|(r, p)| class_multiplicity(self.s, r) * p)
            .sum()
    }

    /// −Σ p log₂ p over all 4ˢ labels, by class.
    pub fn entropy(&self) -> f64 {
        self.class_probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(r, p)| -class_multiplicity(self.s, r) * p * p.log2())
            .sum()
    }
}

/// Monte Carlo estimate of the Bell-basis diagonal of the failure branch.
#[derive(Debug, Clone, Serialize)]
pub struct Rho0Estimate {
    pub s: usize,
    /// Per label, in [`BellLabel::from_index`] order.
    pub labels: Vec<Estimate>,
    /// Per r-class: per-sample average over the labels of the class.
    pub classes: Vec<Estimate>,
    /// Per-sample sum over all labels (1 up to rounding).
    pub totals: Estimate,
    /// Largest per-sample deviation of the all-Φ⁺ element from 1 − 2⁻ˢ.
    pub max_phi_plus_deviation: f64,
}

impl Rho0Estimate {
    pub fn to_dist(&self) -> BellDiagonalDist {
        BellDiagonalDist {
            s: self.s,
            class_probs: self.classes.iter().map(|e| e.mean).collect(),
        }
    }
}

#[derive(Clone)]
struct Rho0Acc {
    labels: Vec<MeanAccumulator>,
    classes: Vec<MeanAccumulator>,
    totals: MeanAccumulator,
    max_dev: f64,
}

impl Rho0Acc {
    fn new(s: usize) -> Self {
        Self {
            labels: vec![MeanAccumulator::default(); 4usize.pow(s as u32)],
            classes: vec![MeanAccumulator::default(); s + 1],
            totals: MeanAccumulator::default(),
            max_dev: 0.0,
        }
    }

    fn merge(&mut self, other: &Rho0Acc) {
        self.labels.iter_mut().zip(&other.labels).for_each(|(a, b)| a.merge(b));
        self.classes.iter_mut().zip(&other.classes).for_each(|(a, b)| a.merge(b));
        self.totals.merge(&other.totals);
        self.max_dev = self.max_dev.max(other.max_dev);
    }
}

const MC_CHUNK: usize = 2048;

/// Draws Haar targets, takes the outcome-0 branch of the two-outcome
/// measurement and averages |⟨B|χ₀⟩|² over samples for every Bell product B.
pub fn rho0_bell_diagonal_mc(s: usize, n_samples: usize, rng: &mut RngStream) -> Result<Rho0Estimate> {
    check_pairs(s, MAX_DENSE_PAIRS)?;
    let bell = bell_basis_matrix(s).adjoint();
    let class_of: Vec<usize> = BellLabel::all(s).map(|l| l.r()).collect();
    let class_size: Vec<f64> = (0..=s).map(|r| class_multiplicity(s, r)).collect();
    let top = 1.0 - 2f64.powi(-(s as i32));
    let all_phi_plus = 0;
    let base = RngStream::new(rng.random());
    let chunks = n_samples.div_ceil(MC_CHUNK);

    let partials: Vec<Result<Rho0Acc>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sub = base.substream(chunk as u64);
            let mut acc = Rho0Acc::new(s);
            let count = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
            let mut class_sum = vec![0.0; s + 1];
            for _ in 0..count {
                let targets: Vec<StateVector> = (0..s).map(|_| haar_state(2, &mut sub)).collect();
                let (_, chi) = measurement_branch(&targets, 0)?;
                let amps = &bell * chi.amplitudes();
                class_sum.iter_mut().for_each(|x| *x = 0.0);
                let mut total = 0.0;
                for (k, a) in amps.iter().enumerate() {
                    let p = a.norm_sqr();
                    acc.labels[k].push(p);
                    class_sum[class_of[k]] += p;
                    total += p;
                }
                for r in 0..=s {
                    acc.classes[r].push(class_sum[r] / class_size[r]);
                }
                acc.totals.push(total);
                acc.max_dev = acc.max_dev.max((amps[all_phi_plus].norm_sqr() - top).abs());
            }
            Ok(acc)
        })
        .collect();

    let mut acc = Rho0Acc::new(s);
    for p in partials {
        acc.merge(&p?);
    }
    Ok(Rho0Estimate {
        s,
        labels: acc.labels.iter().map(|a| a.estimate()).collect(),
        classes: acc.classes.iter().map(|a| a.estimate()).collect(),
        totals: acc.totals.estimate(),
        max_phi_plus_deviation: acc.max_dev,
    })
}

/// Zeroes the off-diagonal Bell-basis entries of a pair-ordered 2s-qubit state.
pub fn twirl_bell_diagonal(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let qubits = rho.dims().len();
    if qubits == 0 || !qubits.is_multiple_of(2) || rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch(format!(
            "twirl needs an even number of qubits, got dims {:?}",
            rho.dims()
        )));
    }
    let s = qubits / 2;
    if s > 4 {
        return Err(Error::Guard(format!("twirl of {s} pairs exceeds the dense limit of 4")));
    }
    let b = bell_basis_matrix(s);
    let in_bell = b.adjoint() * rho.matrix() * &b;
    let diag = CMatrix::from_diagonal(&in_bell.diagonal().map(|z| num_complex::Complex64::new(z.re, 0.0)));
    DensityMatrix::new(&b * diag * b.adjoint(), rho.dims().to_vec())
}

/// Exact entropy (bits) of the twirled failure branch, by r-class.
pub fn twirled_entropy_exact(s: usize) -> Result<f64> {
    check_pairs(s, MAX_ENTROPY_PAIRS)?;
    let two_s = 2f64.powi(s as i32);
    // log₂ of the off-class probability, kept in log space to stay accurate at s = 40
    let log_base = -(s as f64) - (two_s - 1.0).log2();
    let log3 = 3f64.log2();
    let mut h = 0.0;
    for r in 0..s {
        let log_p = log_base - (s - r) as f64 * log3;
        let p = log_p.exp2();
        h -= class_multiplicity(s, r) * p * log_p;
    }
    let top = eq1_value(s, s);
    h -= top * top.log2();
    Ok(h)
}

/// s·2⁻ˢ·(2 + ½log₂3)
pub fn entropy_asymptotic(s: usize) -> f64 {
    assert!(s >= 1, "subblock size must be positive");
    s as f64 * 2f64.powi(-(s as i32)) * (2.0 + 0.5 * 3f64.log2())
}

/// e₀ = 3 + ½log₂3, the ebits per state at the recycling point.
pub fn recycling_e0() -> f64 {
    3.0 + 0.5 * 3f64.log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntropySource {
    Asymptotic,
    Exact,
}

/// Distillation bookkeeping for s′ states sent in subblocks of s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecycleLedger {
    pub s: usize,
    pub s_prime: usize,
    /// Copies of the failure branch collected, s′·2ˢ/s (treated as exact).
    pub copies: f64,
    pub entropy_source: EntropySource,
    /// Entropy per copy after twirling.
    pub twirl_entropy: f64,
    /// Ebits recovered by hashing, c(s − S).
    pub distilled: f64,
    /// Net ebits per state, 1 + cS/s′.
    pub e0: f64,
    /// Forward bits per state.
    pub bits_forward_per_state: f64,
    /// Back-communication for hashing is free in this accounting.
    pub bits_backward: Option<f64>,
}

impl RecycleLedger {
    /// (e, b) coordinates of the resulting cost point.
    pub fn cost(&self) -> (f64, f64) {
        (self.e0, self.bits_forward_per_state)
    }
}

/// s′ = s·2ˢ, the smallest value giving at least 2ˢ copies.
pub fn default_s_prime(s: usize) -> usize {
    s << s
}

pub fn recycle_accounting(s: usize, s_prime: usize, source: EntropySource) -> Result<RecycleLedger> {
    if s == 0 {
        return Err(Error::OutOfRange("subblock size must be positive".into()));
    }
    if s_prime < s {
        return Err(Error::OutOfRange(format!("s′ = {s_prime} must be at least s = {s}")));
    }
    let copies = s_prime as f64 * 2f64.powi(s as i32) / s as f64;
    let twirl_entropy = match source {
        EntropySource::Asymptotic => entropy_asymptotic(s),
        EntropySource::Exact => twirled_entropy_exact(s)?,
    };
    Ok(RecycleLedger {
        s,
        s_prime,
        copies,
        entropy_source: source,
        twirl_entropy,
        distilled: copies * (s as f64 - twirl_entropy),
        e0: 1.0 + copies * twirl_entropy / s_prime as f64,
        bits_forward_per_state: 1.0,
        bits_backward: None,
    })
}
