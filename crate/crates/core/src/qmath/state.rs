use super::{c, identity_deviation, outer, CMatrix, CVector, C64, MAX_DIM, TOL_OBJECT};
use crate::error::{Error, Result};
use crate::qmath::entropy::hermitian_eigen;

/// Normalized pure state on a (possibly multipartite) space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    dims: Vec<usize>,
}

/// Trace-one positive Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    mat: CMatrix,
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidState(format!("bad factor dimensions {dims:?}")));
    }
    let product: usize = dims.iter().product();
    if product != len {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} multiply to {product}, data has length {len}"
        )));
    }
    if len > MAX_DIM {
        return Err(Error::Guard(format!("dimension {len} exceeds dense ceiling {MAX_DIM}")));
    }
    Ok(())
}

/// Index bookkeeping for an operator acting on a subset of factors.
///
/// Every full basis index splits uniquely as `rest_bases[r] + local_offsets[l]`
/// where `l` enumerates the chosen factors (in the order given, first factor
/// most significant) and `r` enumerates the remaining factors in ascending
/// order.
pub(crate) struct FactorLayout {
    pub local_offsets: Vec<usize>,
    pub rest_bases: Vec<usize>,
    pub rest_dims: Vec<usize>,
}

impl FactorLayout {
    pub fn new(dims: &[usize], on: &[usize]) -> Result<Self> {
        if on.is_empty() {
            return Err(Error::BadIndexSet("empty factor set".into()));
        }
        let mut seen = vec![false; dims.len()];
        for &f in on {
            if f >= dims.len() {
                return Err(Error::BadIndexSet(format!(
                    "factor {f} out of range for {} factors",
                    dims.len()
                )));
            }
            if seen[f] {
                return Err(Error::BadIndexSet(format!("factor {f} listed twice")));
            }
            seen[f] = true;
        }
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let rest: Vec<usize> = (0..dims.len()).filter(|f| !seen[*f]).collect();
        let offsets = |factors: &[usize]| -> Vec<usize> {
            let mut out = vec![0usize];
            for &f in factors {
                let mut next = Vec::with_capacity(out.len() * dims[f]);
                for &base in &out {
                    for digit in 0..dims[f] {
                        next.push(base + digit * strides[f]);
                    }
                }
                out = next;
            }
            out
        };
        Ok(Self {
            local_offsets: offsets(on),
            rest_bases: offsets(&rest),
            rest_dims: rest.iter().map(|&f| dims[f]).collect(),
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_offsets.len()
    }
}

/// Applies `op` to the factors `on` of the amplitude vector `amps`.
pub(crate) fn apply_on_factors(amps: &CVector, dims: &[usize], op: &CMatrix, on: &[usize]) -> Result<CVector> {
    let layout = FactorLayout::new(dims, on)?;
    let ld = layout.local_dim();
    if op.nrows() != ld || op.ncols() != ld {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, factors {on:?} span {ld}",
            op.nrows(),
            op.ncols()
        )));
    }
    let mut out = CVector::zeros(amps.len());
    let mut local = vec![C64::default(); ld];
    for &base in &layout.rest_bases {
        for (l, &off) in layout.local_offsets.iter().enumerate() {
            local[l] = amps[base + off];
        }
        for (i, &off_i) in layout.local_offsets.iter().enumerate() {
            let mut acc = C64::default();
            for (j, amp) in local.iter().enumerate() {
                acc += op[(i, j)] * amp;
            }
            out[base + off_i] = acc;
        }
    }
    Ok(out)
}

impl StateVector {
    /// Builds a state, checking normalization and that `dims` factor the length.
    pub fn new(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if (norm * norm - 1.0).abs() > TOL_OBJECT {
            return Err(Error::InvalidState(format!("norm² = {} ≠ 1", norm * norm)));
        }
        Ok(Self { amps, dims })
    }

    /// Normalizes `amps` first. Fails on the zero vector.
    pub fn from_unnormalized(amps: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        let norm = amps.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self { amps: amps / c(norm, 0.0), dims })
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::from_unnormalized(CVector::from_column_slice(amps), vec![amps.len()])
    }

    /// Computational basis state |index⟩ of a single d-level factor.
    pub fn basis(d: usize, index: usize) -> Self {
        assert!(index < d, "basis index {index} out of range for d = {d}");
        let mut amps = CVector::zeros(d);
        amps[index] = c(1.0, 0.0);
        Self { amps, dims: vec![d] }
    }

    /// Single qubit with Bloch angles: cos(β/2)|0⟩ + e^{iφ} sin(β/2)|1⟩.
    pub fn from_bloch_angles(polar: f64, azimuth: f64) -> Self {
        let amps = CVector::from_vec(vec![
            c((polar / 2.0).cos(), 0.0),
            C64::from_polar((polar / 2.0).sin(), azimuth),
        ]);
        Self { amps, dims: vec![2] }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Same amplitudes regrouped into different factors.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.amps.len())?;
        Ok(Self { amps: self.amps.clone(), dims })
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector {
            amps: self.amps.kronecker(&other.amps),
            dims,
        }
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> StateVector {
        StateVector {
            amps: self.amps.map(|z| z.conj()),
            dims: self.dims.clone(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: outer(&self.amps),
            dims: self.dims.clone(),
        }
    }

    /// Bloch vector (x, y, z) of a single-qubit state.
    pub fn bloch_vector(&self) -> [f64; 3] {
        assert_eq!(self.dim(), 2, "Bloch vector needs a qubit");
        let (a, b) = (self.amps[0], self.amps[1]);
        let cross = a.conj() * b;
        [2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()]
    }

    /// Applies `op` to the listed factors. The result is renormalized, so
    /// `op` may be a non-unitary measurement operator with nonzero action.
    pub fn apply_local(&self, op: &CMatrix, on: &[usize]) -> Result<StateVector> {
        let amps = apply_on_factors(&self.amps, &self.dims, op, on)?;
        StateVector::from_unnormalized(amps, self.dims.clone())
    }

    /// Unitary on the listed factors.
    pub fn apply_unitary(&self, u: &UnitaryMatrix, on: &[usize]) -> Result<StateVector> {
        let amps = apply_on_factors(&self.amps, &self.dims, &u.mat, on)?;
        Ok(StateVector { amps, dims: self.dims.clone() })
    }

    /// Contracts the factors `on` with ⟨bra|, returning the unnormalized
    /// vector on the remaining factors together with their dimensions.
    pub(crate) fn contract_raw(&self, bra: &CVector, on: &[usize]) -> Result<(CVector, Vec<usize>)> {
        let layout = FactorLayout::new(&self.dims, on)?;
        if bra.len() != layout.local_dim() {
            return Err(Error::DimensionMismatch(format!(
                "bra has length {}, factors {on:?} span {}",
                bra.len(),
                layout.local_dim()
            )));
        }
        if layout.rest_dims.is_empty() {
            return Err(Error::BadIndexSet("contraction would leave no factors".into()));
        }
        let mut out = CVector::zeros(layout.rest_bases.len());
        for (r, &base) in layout.rest_bases.iter().enumerate() {
            let mut acc = C64::default();
            for (l, &off) in layout.local_offsets.iter().enumerate() {
                acc += bra[l].conj() * self.amps[base + off];
            }
            out[r] = acc;
        }
        Ok((out, layout.rest_dims))
    }

    /// (⟨bra| ⊗ I)|self⟩ renormalized: the state left on the other factors
    /// after the factors `on` are found in `bra`.
    pub fn contract(&self, bra: &StateVector, on: &[usize]) -> Result<StateVector> {
        let (v, dims) = self.contract_raw(&bra.amps, on)?;
        StateVector::from_unnormalized(v, dims)
    }

    pub(crate) fn from_raw(amps: CVector, dims: Vec<usize>) -> Self {
        debug_assert_eq!(amps.len(), dims.iter().product::<usize>());
        Self { amps, dims }
    }
}

impl DensityMatrix {
    /// Builds a density matrix, checking Hermiticity, unit trace and positivity.
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        check_dims(&dims, mat.nrows())?;
        let herm = (&mat - mat.adjoint()).camax();
        if herm > TOL_OBJECT {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr - c(1.0, 0.0)).norm() > TOL_OBJECT {
            return Err(Error::InvalidState(format!("trace {tr} ≠ 1")));
        }
        let (vals, _) = hermitian_eigen(&mat);
        if let Some(min) = vals.iter().copied().reduce(f64::min) {
            if min < -TOL_OBJECT {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { mat, dims })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: CMatrix::identity(d, d) / c(d as f64, 0.0),
            dims: vec![d],
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = c(p, 0.0);
        }
        Self::new(mat, vec![d])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.mat).0
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            mat: self.mat.kronecker(&other.mat),
            dims,
        }
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(Self { mat: self.mat.clone(), dims })
    }

    /// Convex mixture Σ wᵢ ρᵢ. All inputs must share dimensions.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch("weights and states differ in length".into()));
        }
        let mut mat = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in weights.iter().zip(states) {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch(format!(
                    "mixture components have dims {:?} and {:?}",
                    first.dims, rho.dims
                )));
            }
            mat += &rho.mat * c(*w, 0.0);
        }
        Self::new(mat, first.dims.clone())
    }

    /// Skips validation. For results of maps already known to preserve the
    /// density-matrix invariants.
    pub(crate) fn from_raw(mat: CMatrix, dims: Vec<usize>) -> Self {
        Self { mat, dims }
    }
}

impl UnitaryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let dev = identity_deviation(&(mat.adjoint() * &mat));
        if dev > TOL_OBJECT {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { mat })
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: CMatrix::identity(d, d) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        Self { mat: self.mat.adjoint() }
    }

    /// `self · other`
    pub fn compose(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        Self { mat: &self.mat * &other.mat }
    }

    /// U|ψ⟩ for a state whose total dimension matches.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary of dim {} applied to state of dim {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(StateVector {
            amps: &self.mat * &psi.amps,
            dims: psi.dims.clone(),
        })
    }

    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        Self { mat }
    }
}

/// Kronecker product for states of the same kind.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

impl Kron for DensityMatrix {
    fn kron(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

pub fn tensor<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

/// Reduced state on the factors in `keep`, returned in ascending factor order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let layout = FactorLayout::new(&rho.dims, &keep)?;
    let ld = layout.local_dim();
    let mut out = CMatrix::zeros(ld, ld);
    for &base in &layout.rest_bases {
        for (i, &oi) in layout.local_offsets.iter().enumerate() {
            for (j, &oj) in layout.local_offsets.iter().enumerate() {
                out[(i, j)] += rho.mat[(base + oi, base + oj)];
            }
        }
    }
    let dims = keep.iter().map(|&f| rho.dims[f]).collect();
    Ok(DensityMatrix::from_raw(out, dims))
}

/// ⟨ψ|ρ|ψ⟩, clamped into [0, 1].
pub fn fidelity(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} vs density matrix of dim {}",
            psi.dim(),
            rho.dim()
        )));
    }
    let value = psi.amps.dotc(&(&rho.mat * &psi.amps));
    Ok(value.re.clamp(0.0, 1.0))
}
