use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, RngStream, StateVector, UnitaryMatrix, C64};

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: a normalized standard complex Gaussian vector.
pub fn haar_state(d: usize, rng: &mut RngStream) -> StateVector {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let v = CVector::from_fn(d, |_, _| gaussian(rng));
        if let Ok(s) = StateVector::from_unnormalized(v, vec![d]) {
            return s;
        }
    }
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> UnitaryMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_raw(q)
}

/// Orthonormal basis whose first element is `v`, completed by Gram-Schmidt
/// over the computational basis in index order.
pub fn complete_basis(v: &StateVector) -> Vec<StateVector> {
    let d = v.dim();
    let mut basis: Vec<CVector> = vec![v.amplitudes().clone()];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut w = CVector::zeros(d);
        w[k] = c(1.0, 0.0);
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        // a second pass keeps the set orthonormal to working precision
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let n = w.norm();
        if n > 1e-8 {
            basis.push(w / c(n, 0.0));
        }
    }
    basis
        .into_iter()
        .map(|amps| StateVector::from_raw(amps, vec![d]))
        .collect()
}
