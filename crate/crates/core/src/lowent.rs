//! Low-entanglement RSP.
//!
//! Alice and Bob share a table of random rotations. For each subblock of s
//! qubit states Alice looks for a column whose rotations move every state of
//! the subblock into the spherical cap C_θ around |0⟩, sends its index and
//! then transfers the rotated states by compressed teleportation. The
//! ensemble of cap states has entropy S(θ), so the asymptotic costs per state
//! are e = S(θ) ebits and b = S′(θ) + 2S(θ) bits with S′ = log₂(4π/A).
//!
//! Compression is resource accounting here: a successful subblock is charged
//! 2S bits and S ebits per state, and Bob's state is produced directly.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::highent::{index_width, teleport_qudit};
use crate::qmath::{binary_entropy, haar_unitary, DensityMatrix, RngStream, StateVector, UnitaryMatrix};
use crate::recycle::recycling_e0;
use crate::transcript::{Direction, Transcript};

/// Bits per prerotation parameter.
pub const PREROTATION_PRECISION_BITS: u32 = 32;
/// Parameters describing one single-qubit rotation.
pub const PREROTATION_PARAMS: u32 = 3;
/// Largest subblock simulated.
pub const MAX_SUBBLOCK: usize = 8;
/// Largest column count per subblock.
pub const MAX_COLUMNS: f64 = 1e6;
/// Slack on the cap boundary.
pub const CAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapParams {
    pub theta: f64,
    /// Solid angle 2π(1 − cos θ).
    pub area: f64,
    /// Entropy of the uniform cap ensemble, H₂((1 − cos θ)/4).
    pub s: f64,
    /// Index cost log₂(4π/A).
    pub s_prime: f64,
}

impl CapParams {
    /// Fraction of the sphere covered, A/4π.
    pub fn coverage(&self) -> f64 {
        self.area / (4.0 * PI)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::OutOfRange(format!("cap radius {theta} outside (0, π]")));
    }
    Ok(())
}

pub fn cap_params(theta: f64) -> Result<CapParams> {
    check_theta(theta)?;
    let cos = theta.cos();
    let area = 2.0 * PI * (1.0 - cos);
    Ok(CapParams {
        theta,
        area,
        s: binary_entropy(((1.0 - cos) / 4.0).clamp(0.0, 1.0))?,
        s_prime: (4.0 * PI / area).log2().max(0.0),
    })
}

/// Which protocol a cost point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSource {
    Teleport,
    Recycling,
    LowEnt { theta: f64 },
    Convex { alpha: f64, p1: (f64, f64), p2: (f64, f64) },
}

impl CostSource {
    /// Short label used in emitted tables.
    pub fn label(&self) -> String {
        match self {
            CostSource::Teleport => "T".into(),
            CostSource::Recycling => "R".into(),
            CostSource::LowEnt { theta } => format!("lowent({theta:.6})"),
            CostSource::Convex { alpha, p1, p2 } => format!(
                "convex({alpha:.4},({:.6},{:.6}),({:.6},{:.6}))",
                p1.0, p1.1, p2.0, p2.1
            ),
        }
    }
}

/// Ebits (e) and forward bits (b) per state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub e: f64,
    pub b: f64,
    pub source: CostSource,
}

impl CostPoint {
    pub fn teleport() -> Self {
        Self { e: 1.0, b: 2.0, source: CostSource::Teleport }
    }

    pub fn recycling() -> Self {
        Self { e: recycling_e0(), b: 1.0, source: CostSource::Recycling }
    }

    pub fn coords(&self) -> (f64, f64) {
        (self.e, self.b)
    }
}

pub fn cost_point(theta: f64) -> Result<CostPoint> {
    let p = cap_params(theta)?;
    Ok(CostPoint {
        e: p.s,
        b: p.s_prime + 2.0 * p.s,
        source: CostSource::LowEnt { theta },
    })
}

/// Time sharing: fraction α of the states use p2, the rest p1.
pub fn convex_combination(alpha: f64, p1: &CostPoint, p2: &CostPoint) -> CostPoint {
    CostPoint {
        e: (1.0 - alpha) * p1.e + alpha * p2.e,
        b: (1.0 - alpha) * p1.b + alpha * p2.b,
        source: CostSource::Convex { alpha, p1: p1.coords(), p2: p2.coords() },
    }
}

/// Vertices of the lower convex hull, sorted by e.
pub fn lower_envelope(points: &[CostPoint]) -> Vec<CostPoint> {
    let mut sorted = points.to_vec();
    // on ties keep the named protocol points
    let rank = |p: &CostPoint| !matches!(p.source, CostSource::Teleport | CostSource::Recycling);
    sorted.sort_by(|a, b| a.e.total_cmp(&b.e).then(a.b.total_cmp(&b.b)).then(rank(a).cmp(&rank(b))));
    sorted.dedup_by(|a, b| a.e == b.e);
    let mut hull: Vec<CostPoint> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.e - o.e) * (p.b - o.b) - (a.b - o.b) * (p.e - o.e);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Intermediate points emitted on each envelope edge.
pub const CONVEX_STEPS: usize = 4;

/// Low-entanglement points for every θ in the grid; with `include_convex`
/// also T, R and time-sharing points along the lower convex envelope.
pub fn tradeoff_curve(theta_grid: &[f64], include_convex: bool) -> Result<Vec<CostPoint>> {
    let mut points = theta_grid.iter().map(|&t| cost_point(t)).collect::<Result<Vec<_>>>()?;
    if !include_convex {
        return Ok(points);
    }
    let mut anchors = points.clone();
    anchors.push(CostPoint::teleport());
    anchors.push(CostPoint::recycling());
    let hull = lower_envelope(&anchors);
    points.push(CostPoint::teleport());
    points.push(CostPoint::recycling());
    for edge in hull.windows(2) {
        for k in 1..CONVEX_STEPS {
            points.push(convex_combination(k as f64 / CONVEX_STEPS as f64, &edge[0], &edge[1]));
        }
    }
    Ok(points)
}

/// Uniform θ grid on (0, π] with `points` entries ending at π.
pub fn theta_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|k| PI * (k as f64 / points as f64)).collect()
}

/// Uniform state on the cap: cos of the polar angle uniform on [cos θ, 1].
pub fn sample_cap(theta: f64, rng: &mut RngStream) -> Result<StateVector> {
    check_theta(theta)?;
    let lo = theta.cos();
    let z: f64 = lo + (1.0 - lo) * rng.random::<f64>();
    let azimuth = 2.0 * PI * rng.random::<f64>();
    Ok(StateVector::from_bloch_angles(z.clamp(-1.0, 1.0).acos(), azimuth))
}

/// Polar angle of a qubit's Bloch vector.
pub fn polar_angle(psi: &StateVector) -> f64 {
    psi.bloch_vector()[2].clamp(-1.0, 1.0).acos()
}

pub fn in_cap(psi: &StateVector, theta: f64) -> bool {
    polar_angle(psi) <= theta + CAP_TOLERANCE
}

/// ½(I + z̄σ_z) with z̄ = (1 + cos θ)/2, the average of the cap ensemble.
pub fn cap_ensemble_density(theta: f64) -> Result<DensityMatrix> {
    check_theta(theta)?;
    let cos = theta.cos();
    DensityMatrix::diagonal(&[(3.0 + cos) / 4.0, (1.0 - cos) / 4.0])
}

/// m = ⌈(4π/A)ˢ⌉, guarded.
pub fn subblock_columns(s: usize, theta: f64) -> Result<usize> {
    let p = cap_params(theta)?;
    let raw = (1.0 / p.coverage()).powi(s as i32);
    if raw > MAX_COLUMNS {
        return Err(Error::Guard(format!("(4π/A)^s = {raw:.3e} columns exceeds {MAX_COLUMNS:e}")));
    }
    // absorb rounding in exact powers such as 2^s
    Ok(((raw - 1e-9).ceil() as usize).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubblockStats {
    pub index: usize,
    pub size: usize,
    pub columns: usize,
    /// Columns inspected before stopping.
    pub columns_tried: usize,
    pub selected: Option<usize>,
    pub bits: f64,
    pub ebits: f64,
}

#[derive(Debug, Clone)]
pub struct LowEntRun {
    pub transcript: Transcript,
    pub bob_states: Vec<StateVector>,
    pub subblocks: Vec<SubblockStats>,
    pub prerotation_bits: f64,
    pub cap: CapParams,
}

impl LowEntRun {
    pub fn bits_per_state(&self) -> f64 {
        self.transcript.bits_forward / self.bob_states.len() as f64
    }

    pub fn ebits_per_state(&self) -> f64 {
        self.transcript.ebits_consumed / self.bob_states.len() as f64
    }

    pub fn success_rate(&self) -> f64 {
        let ok = self.subblocks.iter().filter(|b| b.selected.is_some()).count();
        ok as f64 / self.subblocks.len() as f64
    }
}

pub fn prerotation_overhead_bits(s: usize) -> f64 {
    (s as u32 * PREROTATION_PARAMS * PREROTATION_PRECISION_BITS) as f64
}

fn check_lowent(n: usize, s: usize, targets: &[StateVector]) -> Result<()> {
    if s == 0 || s > MAX_SUBBLOCK {
        return Err(Error::Guard(format!("subblock size {s} outside 1..={MAX_SUBBLOCK}")));
    }
    if n == 0 || targets.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} targets, got {}", targets.len())));
    }
    if targets.iter().any(|t| t.dim() != 2) {
        return Err(Error::DimensionMismatch("low-entanglement RSP sends qubits".into()));
    }
    Ok(())
}

fn run_subblock(
    index: usize,
    targets: &[StateVector],
    prerotations: &[UnitaryMatrix],
    cap: &CapParams,
    rng: &mut RngStream,
) -> Result<(Transcript, Vec<StateVector>, SubblockStats)> {
    let size = targets.len();
    let columns = subblock_columns(size, cap.theta)?;
    let width = index_width(columns);
    let randomized: Vec<StateVector> = targets
        .iter()
        .zip(prerotations)
        .map(|(t, r)| r.apply(t))
        .collect::<Result<_>>()?;

    let mut selected = None;
    let mut tried = 0;
    let mut rotations = Vec::with_capacity(size);
    while tried < columns {
        tried += 1;
        rotations.clear();
        let mut ok = true;
        // draw the whole column so the stream position does not depend on where it fails
        for psi in &randomized {
            let rot = haar_unitary(2, rng);
            ok &= in_cap(&rot.apply(psi)?, cap.theta);
            rotations.push(rot);
        }
        if ok {
            selected = Some(tried - 1);
            break;
        }
    }

    let mut transcript = Transcript::new();
    let mut bob = Vec::with_capacity(size);
    match selected {
        Some(j) => {
            transcript.send(Direction::Forward, "column", width, j as u64);
            transcript.send_modeled(Direction::Forward, "compressed-teleport", 2.0 * cap.s * size as f64);
            transcript.consume_ebits(cap.s * size as f64);
            for ((t, r), rot) in targets.iter().zip(prerotations).zip(&rotations) {
                let total = rot.compose(r);
                // Bob receives the cap state and undoes both rotations.
                let received = total.apply(t)?;
                let out = total.adjoint().apply(&received)?;
                transcript.record_fidelity(out.overlap(t));
                bob.push(out);
            }
        }
        None => {
            transcript.send_flag(Direction::Forward, "no-column", width);
            transcript.mark_fallback();
            for t in targets {
                let run = teleport_qudit(t, rng)?;
                bob.push(run.bob_state);
                transcript.absorb(run.transcript);
            }
        }
    }
    let stats = SubblockStats {
        index,
        size,
        columns,
        columns_tried: tried,
        selected,
        bits: transcript.bits_forward,
        ebits: transcript.ebits_consumed,
    };
    Ok((transcript, bob, stats))
}

/// Runs the rotation-table protocol on n qubit targets in subblocks of s.
/// The prerotation r_{i mod s} is applied to state i; its description is
/// charged once.
pub fn simulate_lowent(
    n: usize,
    s: usize,
    theta: f64,
    targets: &[StateVector],
    rng: &mut RngStream,
) -> Result<LowEntRun> {
    check_lowent(n, s, targets)?;
    let cap = cap_params(theta)?;
    subblock_columns(s, theta)?;
    let base = RngStream::new(rng.random());
    let mut pre_rng = base.substream(0);
    let prerotations: Vec<UnitaryMatrix> = (0..s).map(|_| haar_unitary(2, &mut pre_rng)).collect();

    let blocks: Vec<Result<(Transcript, Vec<StateVector>, SubblockStats)>> = targets
        .par_chunks(s)
        .enumerate()
        .map(|(k, chunk)| {
            let mut sub = base.substream(k as u64 + 1);
            run_subblock(k, chunk, &prerotations[..chunk.len()], &cap, &mut sub)
        })
        .collect();

    let prerotation_bits = prerotation_overhead_bits(s);
    let mut transcript = Transcript::new();
    transcript.send_modeled(Direction::Forward, "prerotations", prerotation_bits);
    let mut bob_states = Vec::with_capacity(n);
    let mut subblocks = Vec::with_capacity(blocks.len());
    for b in blocks {
        let (t, states, stats) = b?;
        transcript.absorb(t);
        bob_states.extend(states);
        subblocks.push(stats);
    }
    Ok(LowEntRun {
        transcript,
        bob_states,
        subblocks,
        prerotation_bits,
        cap,
    })
}

/// Probability that all s randomized states land in the cap under one column.
pub fn column_success_probability(s: usize, theta: f64) -> Result<f64> {
    Ok(cap_params(theta)?.coverage().powi(s as i32))
}

/// Expected forward bits and ebits per state of [`simulate_lowent`] when n is
/// a multiple of s.
pub fn expected_lowent_costs(n: usize, s: usize, theta: f64) -> Result<(f64, f64)> {
    let cap = cap_params(theta)?;
    let m = subblock_columns(s, theta)?;
    let q = column_success_probability(s, theta)?;
    let p_ok = 1.0 - (1.0 - q).powi(m as i32);
    let per_state_bits = index_width(m) as f64 / s as f64 + p_ok * 2.0 * cap.s + (1.0 - p_ok) * 2.0;
    let per_state_ebits = p_ok * cap.s + (1.0 - p_ok);
    Ok((per_state_bits + prerotation_overhead_bits(s) / n as f64, per_state_ebits))
}
