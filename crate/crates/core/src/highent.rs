//! High-entanglement remote state preparation.
//!
//! * [`equatorial_rsp`]: one singlet and one classical bit prepare any
//!   equatorial qubit exactly.
//! * [`table_rsp`]: Alice measures rows of maximally entangled pairs in bases
//!   containing ψⱼ*, records successes in an n×m table and sends the index of
//!   the first all-ones column. Falls back to teleportation if no column
//!   succeeds, so every run is exact.
//! * [`teleport`] and [`teleport_qudit`]: Bell measurement plus Weyl
//!   correction, used as the fallback and as the cost baseline.
//!
//! Entanglement is counted in maximally entangled pairs of the protocol's
//! local dimension (ebits when d = 2).

use std::f64::consts::FRAC_1_SQRT_2;

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{
    bell_state, c, complete_basis, measure_in_basis, phi_plus, weyl_operator, Bell, BellLabel, CMatrix,
    RngStream, StateVector, UnitaryMatrix, C64, TOL_OBJECT,
};
use crate::transcript::{Direction, Transcript};

/// Upper limit on m·n table cells simulated in one run.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;

/// Bit-packed n×m table of measurement successes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessTable {
    rows: Vec<Vec<u64>>,
    m: usize,
}

impl SuccessTable {
    pub fn zeros(n: usize, m: usize) -> Self {
        assert!(n > 0 && m > 0, "table dimensions must be positive");
        Self {
            rows: vec![vec![0; m.div_ceil(64)]; n],
            m,
        }
    }

    /// Row `j` filled with independent Bernoulli(p) entries.
    fn sample_row(m: usize, p: f64, rng: &mut RngStream) -> Vec<u64> {
        let bern = Bernoulli::new(p.clamp(0.0, 1.0)).expect("probability clamped into range");
        let mut words = vec![0u64; m.div_ceil(64)];
        for k in 0..m {
            if bern.sample(rng) {
                words[k / 64] |= 1 << (k % 64);
            }
        }
        words
    }

    /// Table whose row j has success probability `probs[j]`, each row drawn
    /// from its own substream of `rng`.
    pub fn sample(probs: &[f64], m: usize, rng: &RngStream) -> Self {
        assert!(!probs.is_empty() && m > 0, "table dimensions must be positive");
        let rows = probs
            .par_iter()
            .enumerate()
            .map(|(j, &p)| Self::sample_row(m, p, &mut rng.substream(j as u64)))
            .collect();
        Self { rows, m }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, j: usize, k: usize) -> bool {
        assert!(k < self.m);
        self.rows[j][k / 64] >> (k % 64) & 1 == 1
    }

    pub fn set(&mut self, j: usize, k: usize, value: bool) {
        assert!(k < self.m);
        let mask = 1u64 << (k % 64);
        if value {
            self.rows[j][k / 64] |= mask;
        } else {
            self.rows[j][k / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|w| w.count_ones() as u64)
            .sum()
    }

    /// Lowest-index column whose entries are all ones.
    pub fn first_all_ones_column(&self) -> Option<usize> {
        let words = self.m.div_ceil(64);
        for w in 0..words {
            let mut acc = u64::MAX;
            for row in &self.rows {
                acc &= row[w];
            }
            if w == words - 1 && !self.m.is_multiple_of(64) {
                acc &= (1u64 << (self.m % 64)) - 1;
            }
            if acc != 0 {
                return Some(w * 64 + acc.trailing_zeros() as usize);
            }
        }
        None
    }
}

/// ⌈log₂ m⌉, the width of a field that indexes m columns.
pub fn index_width(m: usize) -> u32 {
    assert!(m > 0);
    usize::BITS - (m - 1).leading_zeros()
}

/// Default column count ⌈n·dⁿ⌉ (n·2ⁿ for qubits).
pub fn default_columns(n: usize, d: usize) -> Result<usize> {
    let pow = (d as u64)
        .checked_pow(n as u32)
        .and_then(|p| p.checked_mul(n as u64))
        .ok_or_else(|| Error::Guard(format!("n·dⁿ overflows for n = {n}, d = {d}")))?;
    usize::try_from(pow).map_err(|_| Error::Guard("column count exceeds address space".into()))
}

/// |0⟩ + e^{iφ}|1⟩, normalized.
pub fn equatorial_state(phi: f64) -> StateVector {
    StateVector::from_bloch_angles(std::f64::consts::FRAC_PI_2, phi)
}

#[derive(Debug, Clone)]
pub struct EquatorialRun {
    pub transcript: Transcript,
    pub bob_state: StateVector,
    /// Whether Bob had to apply σ_z.
    pub corrected: bool,
}

/// Exact RSP of |0⟩ + e^{iφ}|1⟩ with one singlet and one forward bit.
pub fn equatorial_rsp(phi: f64, rng: &mut RngStream) -> Result<EquatorialRun> {
    let target = equatorial_state(phi);
    let antipode = StateVector::from_amplitudes(&[c(FRAC_1_SQRT_2, 0.0), -C64::from_polar(FRAC_1_SQRT_2, phi)])?;
    let singlet = bell_state(&BellLabel::new(vec![Bell::PsiMinus]));

    let mut transcript = Transcript::new();
    transcript.consume_ebits(1.0);
    let (outcome, _, bob) = measure_in_basis(&singlet, &[target.clone(), antipode], &[0], rng)?;
    transcript.send(Direction::Forward, "outcome", 1, outcome as u64);

    // Outcome ψ leaves Bob with ψ⊥, which σ_z maps back onto ψ for equatorial states.
    let corrected = outcome == 0;
    let bob_state = if corrected {
        let sz = UnitaryMatrix::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ])))?;
        sz.apply(&bob)?
    } else {
        bob
    };
    transcript.record_fidelity(bob_state.overlap(&target));
    Ok(EquatorialRun {
        transcript,
        bob_state,
        corrected,
    })
}

/// Alice measures her half of a fresh |Φ⁺_d⟩ in a basis whose first element
/// is ψ*. Returns whether that outcome occurred and Bob's resulting state.
pub fn conjugate_basis_measure(d: usize, psi: &StateVector, rng: &mut RngStream) -> Result<(bool, StateVector)> {
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(format!("target of dim {} for d = {d}", psi.dim())));
    }
    let basis = complete_basis(&psi.conjugate().with_dims(vec![d])?);
    let (k, _, bob) = measure_in_basis(&phi_plus(d), &basis, &[0], rng)?;
    Ok((k == 0, bob))
}

#[derive(Debug, Clone)]
pub struct TableRun {
    pub transcript: Transcript,
    pub bob_states: Vec<StateVector>,
    /// Column Bob keeps, or `None` when the run fell back to teleportation.
    pub selected_column: Option<usize>,
    pub columns: usize,
}

/// Options for [`table_rsp_with`].
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub columns: Option<usize>,
    /// Largest allowed m·n.
    pub cell_cap: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            columns: None,
            cell_cap: DEFAULT_TABLE_CAP,
        }
    }
}

/// Success-table RSP of n states in dimension d with the default cell cap.
pub fn table_rsp(
    n: usize,
    d: usize,
    targets: &[StateVector],
    m_override: Option<usize>,
    rng: &mut RngStream,
) -> Result<TableRun> {
    table_rsp_with(
        n,
        d,
        targets,
        TableOptions {
            columns: m_override,
            ..TableOptions::default()
        },
        rng,
    )
}

pub fn table_rsp_with(
    n: usize,
    d: usize,
    targets: &[StateVector],
    options: TableOptions,
    rng: &mut RngStream,
) -> Result<TableRun> {
    if n == 0 || d < 2 {
        return Err(Error::OutOfRange(format!("need n ≥ 1 and d ≥ 2, got n = {n}, d = {d}")));
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch(format!("{} targets for n = {n}", targets.len())));
    }
    if let Some(bad) = targets.iter().find(|t| t.dim() != d) {
        return Err(Error::DimensionMismatch(format!("target of dim {} for d = {d}", bad.dim())));
    }
    let m = match options.columns {
        Some(m) if m > 0 => m,
        Some(_) => return Err(Error::OutOfRange("column count must be positive".into())),
        None => default_columns(n, d)?,
    };
    if (m as u64).saturating_mul(n as u64) > options.cell_cap {
        return Err(Error::Guard(format!(
            "table of {n}×{m} cells exceeds the cap of {}",
            options.cell_cap
        )));
    }

    // Conditional state of Bob's half when Alice's outcome is ψⱼ*, and the
    // probability of that outcome, read off the shared pair.
    let shared = phi_plus(d);
    let mut success_branch = Vec::with_capacity(n);
    let mut probs = Vec::with_capacity(n);
    for t in targets {
        let bra = t.conjugate().with_dims(vec![d])?;
        let (raw, dims) = shared.contract_raw(bra.amplitudes(), &[0])?;
        probs.push(raw.norm_squared());
        success_branch.push(StateVector::from_unnormalized(raw, dims)?);
    }

    let base = RngStream::new(rng.random());
    let table = SuccessTable::sample(&probs, m, &base.substream(0));

    let mut transcript = Transcript::new();
    transcript.consume_ebits((m * n) as f64);
    let width = index_width(m);
    let selected_column = table.first_all_ones_column();
    let bob_states = match selected_column {
        Some(k) => {
            transcript.send(Direction::Forward, "column-index", width, k as u64);
            success_branch
        }
        None => {
            transcript.send_flag(Direction::Forward, "no-column", width);
            transcript.mark_fallback();
            let mut fb = base.substream(1);
            let mut out = Vec::with_capacity(n);
            for t in targets {
                let run = teleport_qudit(t, &mut fb)?;
                transcript.absorb(run.transcript);
                out.push(run.bob_state);
            }
            out
        }
    };
    for (b, t) in bob_states.iter().zip(targets) {
        transcript.record_fidelity(b.overlap(t));
    }
    Ok(TableRun {
        transcript,
        bob_states,
        selected_column,
        columns: m,
    })
}

/// Closed-form expected costs of [`table_rsp`] with the default column count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub columns: usize,
    pub p_fail: f64,
    pub bits_per_state: f64,
    pub ebits_per_state: f64,
}

pub fn expected_cost_model(n: usize, d: usize) -> Result<CostModel> {
    if n == 0 || d < 2 {
        return Err(Error::OutOfRange(format!("need n ≥ 1 and d ≥ 2, got n = {n}, d = {d}")));
    }
    let m = default_columns(n, d)?;
    let q = (d as f64).powi(-(n as i32));
    let p_fail = (m as f64 * (-q).ln_1p()).exp();
    let fallback_bits = 2.0 * n as f64 * (d as f64).log2();
    Ok(CostModel {
        columns: m,
        p_fail,
        bits_per_state: (index_width(m) as f64 + p_fail * fallback_bits) / n as f64,
        ebits_per_state: m as f64 + p_fail,
    })
}

#[derive(Debug, Clone)]
pub struct TeleportRun {
    pub transcript: Transcript,
    pub bob_state: StateVector,
    /// Generalized Bell outcome per teleported factor, a·d + b for XᵃZᵇ.
    pub outcomes: Vec<usize>,
}

/// Generalized Bell basis (I ⊗ XᵃZᵇ)|Φ⁺_d⟩, indexed a·d + b.
fn bell_basis(d: usize) -> Vec<StateVector> {
    let shared = phi_plus(d);
    (0..d * d)
        .map(|ab| {
            shared
                .apply_local(&weyl_operator(d, ab / d, ab % d), &[1])
                .expect("Weyl operator preserves the norm")
        })
        .collect()
}

/// Teleports factor 0 of `state`; the received factor is appended last.
fn teleport_leading_factor(state: &StateVector, rng: &mut RngStream) -> Result<(usize, StateVector)> {
    let d = state.dims()[0];
    let joint = state.tensor(&phi_plus(d));
    let alice_half = joint.dims().len() - 2;
    let (k, _, rest) = measure_in_basis(&joint, &bell_basis(d), &[0, alice_half], rng)?;
    // Bob holds conj(XᵃZᵇ)ψ; undo it with the transpose.
    let correction = UnitaryMatrix::new(weyl_operator(d, k / d, k % d).transpose())?;
    let last = rest.dims().len() - 1;
    Ok((k, rest.apply_unitary(&correction, &[last])?))
}

/// Teleports a single d-level state with one |Φ⁺_d⟩ and a d²-valued message.
pub fn teleport_qudit(psi: &StateVector, rng: &mut RngStream) -> Result<TeleportRun> {
    let d = psi.dim();
    if d < 2 {
        return Err(Error::OutOfRange("teleportation needs d ≥ 2".into()));
    }
    let single = psi.with_dims(vec![d])?;
    let mut transcript = Transcript::new();
    transcript.consume_ebits(1.0);
    let (k, bob) = teleport_leading_factor(&single, rng)?;
    transcript.send_symbol(Direction::Forward, "bell-outcome", (d * d) as u64, k as u64);
    transcript.record_fidelity(bob.overlap(&single));
    Ok(TeleportRun {
        transcript,
        bob_state: bob,
        outcomes: vec![k],
    })
}

/// Teleports a q-qubit state qubit by qubit: 2q bits, q ebits.
pub fn teleport(psi: &StateVector, rng: &mut RngStream) -> Result<TeleportRun> {
    let dim = psi.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::OutOfRange(format!("teleport needs dimension 2^q, got {dim}")));
    }
    let q = dim.trailing_zeros() as usize;
    if q + 2 > 14 {
        return Err(Error::Guard(format!("{q} qubits exceed the dense teleportation limit")));
    }
    let mut state = psi.with_dims(vec![2; q])?;
    let mut transcript = Transcript::new();
    let mut outcomes = Vec::with_capacity(q);
    for _ in 0..q {
        transcript.consume_ebits(1.0);
        let (k, next) = teleport_leading_factor(&state, rng)?;
        transcript.send(Direction::Forward, "bell-outcome", 2, k as u64);
        outcomes.push(k);
        state = next;
    }
    let bob_state = state.with_dims(psi.dims().to_vec())?;
    let f = bob_state.overlap(psi);
    debug_assert!(f > 1.0 - TOL_OBJECT);
    transcript.record_fidelity(f);
    Ok(TeleportRun {
        transcript,
        bob_state,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::haar_state;
    use crate::stats::{binomial_stderr, MeanAccumulator};

    #[test]
    fn index_widths() {
        assert_eq!(index_width(1), 0);
        assert_eq!(index_width(2), 1);
        assert_eq!(index_width(64), 6);
        assert_eq!(index_width(65), 7);
        assert_eq!(index_width(49152), 16);
    }

    #[test]
    fn equatorial_plus_state_is_exact() {
        let mut rng = RngStream::new(1);
        let mut seen = [false; 2];
        for _ in 0..1000 {
            let run = equatorial_rsp(0.0, &mut rng).unwrap();
            assert!(run.transcript.output_fidelity > 1.0 - 1e-9);
            assert_eq!(run.transcript.bits_forward, 1.0);
            assert_eq!(run.transcript.ebits_consumed, 1.0);
            seen[run.corrected as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn equatorial_correction_rate_is_half() {
        let mut rng = RngStream::new(2);
        let trials = 4000;
        let corrected = (0..trials)
            .filter(|_| equatorial_rsp(std::f64::consts::FRAC_PI_2, &mut rng).unwrap().corrected)
            .count();
        let f = corrected as f64 / trials as f64;
        assert!((f - 0.5).abs() < 3.0 * binomial_stderr(0.5, trials as u64));
    }

    #[test]
    fn conjugate_basis_success_prepares_target() {
        let mut rng = RngStream::new(3);
        for d in 2..=5 {
            let mut hits = 0;
            while hits < 100 {
                let psi = haar_state(d, &mut rng);
                let (ok, bob) = conjugate_basis_measure(d, &psi, &mut rng).unwrap();
                if ok {
                    hits += 1;
                    assert!((bob.overlap(&psi) - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn conjugate_basis_rates() {
        for (d, seed) in [(2, 10u64), (3, 11)] {
            let mut rng = RngStream::new(seed);
            let psi = haar_state(d, &mut rng);
            let trials = 10_000u64;
            let wins = (0..trials)
                .filter(|_| conjugate_basis_measure(d, &psi, &mut rng).unwrap().0)
                .count();
            let p = 1.0 / d as f64;
            assert!((wins as f64 / trials as f64 - p).abs() < 3.0 * binomial_stderr(p, trials));
        }
    }

    #[test]
    fn first_column_rule() {
        let mut t = SuccessTable::zeros(2, 130);
        assert_eq!(t.first_all_ones_column(), None);
        t.set(0, 129, true);
        t.set(1, 129, true);
        t.set(0, 70, true);
        assert_eq!(t.first_all_ones_column(), Some(129));
        t.set(1, 70, true);
        assert_eq!(t.first_all_ones_column(), Some(70));
        assert!(t.get(1, 70));
        assert_eq!(t.count_ones(), 4);
    }

    #[test]
    fn single_state_fallback_rate() {
        let mut rng = RngStream::new(4);
        let trials = 10_000u64;
        let mut fallbacks = 0;
        for _ in 0..trials {
            let psi = haar_state(2, &mut rng);
            let run = table_rsp(1, 2, &[psi], None, &mut rng).unwrap();
            assert_eq!(run.columns, 2);
            assert!(run.transcript.output_fidelity > 1.0 - 1e-9);
            fallbacks += run.transcript.fallback_used as u64;
        }
        let f = fallbacks as f64 / trials as f64;
        assert!((f - 0.25).abs() < 3.0 * binomial_stderr(0.25, trials), "fallback rate {f}");
    }

    #[test]
    fn table_runs_replay_and_respect_causality() {
        for seed in 0..20 {
            let mut rng = RngStream::new(seed);
            let targets: Vec<_> = (0..3).map(|_| haar_state(3, &mut rng)).collect();
            let a = table_rsp(3, 3, &targets, None, &mut RngStream::new(seed + 100)).unwrap();
            let b = table_rsp(3, 3, &targets, None, &mut RngStream::new(seed + 100)).unwrap();
            assert_eq!(a.transcript, b.transcript);
            assert!(a.transcript.bits_forward / 3.0 >= 3f64.log2() * (1.0 - 1e-9));
            assert!(a.transcript.output_fidelity > 1.0 - 1e-9);
            assert_eq!(a.transcript.audit().0, a.transcript.bits_forward);
        }
    }

    #[test]
    fn table_entries_are_fair_coins() {
        // Pool 2×10⁵ cells and compare with Bernoulli(1/2) by chi-square on
        // the counts of ones and zeros.
        let probs = vec![0.5; 4];
        let table = SuccessTable::sample(&probs, 50_000, &RngStream::new(5));
        let cells = 200_000.0;
        let ones = table.count_ones() as f64;
        let chi2 = (ones - cells / 2.0).powi(2) / (cells / 2.0) * 2.0;
        // one degree of freedom: 4σ ⇔ χ² < 16
        assert!(chi2 < 16.0, "chi2 = {chi2}");
    }

    #[test]
    fn guard_rejects_large_tables() {
        let mut rng = RngStream::new(6);
        let targets: Vec<_> = (0..17).map(|_| haar_state(2, &mut rng)).collect();
        assert!(matches!(table_rsp(17, 2, &targets, None, &mut rng), Err(Error::Guard(_))));
        let targets: Vec<_> = (0..16).map(|_| haar_state(2, &mut rng)).collect();
        assert!(default_columns(16, 2).unwrap() * 16 <= DEFAULT_TABLE_CAP as usize);
        assert!(table_rsp(2, 2, &targets[..1], None, &mut rng).is_err());
    }

    #[test]
    fn cost_model_values() {
        let m4 = expected_cost_model(4, 2).unwrap();
        assert_eq!(m4.columns, 64);
        assert!((m4.p_fail - (15.0f64 / 16.0).powi(64)).abs() < 1e-12);
        assert!((m4.p_fail - 0.016075).abs() < 1e-6);
        let m1 = expected_cost_model(1, 2).unwrap();
        assert!((m1.bits_per_state - 1.5).abs() < 1e-12);
        let b: Vec<f64> = [4, 8, 12]
            .iter()
            .map(|&n| expected_cost_model(n, 2).unwrap().bits_per_state)
            .collect();
        assert!(b[0] > b[1] && b[1] > b[2]);
        for (&n, &bits) in [4usize, 8, 12].iter().zip(&b) {
            let lead = 1.0 + (n as f64).log2() / n as f64;
            assert!(bits >= lead && bits - lead < 1.0 / n as f64 + 1e-3);
        }
    }

    #[test]
    fn teleport_examples() {
        let mut rng = RngStream::new(7);
        let run = teleport(&StateVector::basis(2, 0), &mut rng).unwrap();
        assert_eq!(run.transcript.bits_forward, 2.0);
        assert_eq!(run.transcript.ebits_consumed, 1.0);
        assert!(run.transcript.output_fidelity > 1.0 - 1e-12);
        let mut counts = [0u64; 4];
        let trials = 4000u64;
        for _ in 0..trials {
            let psi = haar_state(2, &mut rng);
            let run = teleport(&psi, &mut rng).unwrap();
            assert!(run.transcript.output_fidelity > 1.0 - 1e-9);
            counts[run.outcomes[0]] += 1;
        }
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.25).abs() < 3.0 * binomial_stderr(0.25, trials));
        }
    }

    #[test]
    fn multi_qubit_and_qudit_teleport() {
        let mut rng = RngStream::new(8);
        for q in 1..=4 {
            let psi = haar_state(1 << q, &mut rng);
            let run = teleport(&psi, &mut rng).unwrap();
            assert_eq!(run.transcript.bits_forward, 2.0 * q as f64);
            assert_eq!(run.transcript.ebits_consumed, q as f64);
            assert!(run.transcript.output_fidelity > 1.0 - 1e-9);
        }
        let mut fid = MeanAccumulator::default();
        for d in [3, 5] {
            for _ in 0..50 {
                let psi = haar_state(d, &mut rng);
                let run = teleport_qudit(&psi, &mut rng).unwrap();
                fid.push(run.transcript.output_fidelity);
                assert!((run.transcript.bits_forward - 2.0 * (d as f64).log2()).abs() < 1e-12);
            }
        }
        assert!(fid.estimate().mean > 1.0 - 1e-9);
        assert!(teleport(&haar_state(3, &mut rng), &mut rng).is_err());
    }
}
