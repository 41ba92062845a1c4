use nalgebra::SymmetricEigen;

use super::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order
/// with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

fn plogp(p: f64) -> f64 {
    if p <= 1e-15 {
        0.0
    } else {
        p * p.log2()
    }
}

/// H₂(x) in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(-(plogp(x) + plogp(1.0 - x)))
}

/// Von Neumann entropy in bits. Eigenvalues at or below 1e-15 contribute 0.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    let h: f64 = rho.eigenvalues().into_iter().map(|p| -plogp(p)).sum();
    h.max(0.0)
}
