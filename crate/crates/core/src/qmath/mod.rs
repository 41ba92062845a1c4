//! Dense complex linear algebra and the quantum primitives shared by every
//! protocol module.
//!
//! States are stored normalized. Multipartite objects carry a list of factor
//! dimensions; factor 0 is the most significant digit of the basis index, so
//! `a.tensor(&b)` is the ordinary Kronecker product.

mod bell;
mod channel;
mod entropy;
mod haar;
mod measure;
mod rng;
mod schmidt;
mod state;

pub use bell::{bell_basis_matrix, bell_state, phi_plus, weyl_operator, Bell, BellLabel};
pub use channel::{apply_channel, QuantumChannel};
pub use entropy::{binary_entropy, hermitian_eigen, vn_entropy};
pub use haar::{complete_basis, haar_state, haar_unitary};
pub use measure::{generalized_measure, measure_in_basis, projective_measure, Outcome};
pub use rng::RngStream;
pub use schmidt::{schmidt, SchmidtForm};
pub use state::{fidelity, partial_trace, tensor, DensityMatrix, Kron, StateVector, UnitaryMatrix};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for arithmetic identities.
pub const TOL_ARITH: f64 = 1e-12;
/// Tolerance for invariants of constructed objects (norm, trace, unitarity).
pub const TOL_OBJECT: f64 = 1e-9;
/// Tolerance for decomposition round trips.
pub const TOL_DECOMP: f64 = 1e-8;

/// Largest state-vector length the dense simulator accepts.
pub const MAX_DIM: usize = 1 << 14;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// op applied to one factor of ψ without renormalizing.
pub(crate) fn apply_to_factor(psi: &StateVector, op: &CMatrix, factor: usize) -> crate::Result<CVector> {
    state::apply_on_factors(psi.amplitudes(), psi.dims(), op, &[factor])
}

/// Deviation of `m` from the identity, max-abs entrywise.
pub(crate) fn identity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

/// |v⟩⟨v|
pub(crate) fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
