use super::{c, CMatrix, CVector, StateVector, TOL_DECOMP, TOL_OBJECT};
use crate::error::{Error, Result};

/// Schmidt decomposition Σᵢ √λᵢ |aᵢ⟩⊗|bᵢ⟩ with λ in descending order.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
    basis_a: Vec<StateVector>,
    basis_b: Vec<StateVector>,
}

impl SchmidtForm {
    /// Builds a form from coefficients and local bases, checking the
    /// invariants. Coefficients are sorted descending along with the bases.
    pub fn new(coefficients: Vec<f64>, basis_a: Vec<StateVector>, basis_b: Vec<StateVector>) -> Result<Self> {
        if coefficients.len() != basis_a.len() || coefficients.len() != basis_b.len() {
            return Err(Error::DimensionMismatch("coefficient and basis counts differ".into()));
        }
        if coefficients.iter().any(|&l| l < -TOL_OBJECT) {
            return Err(Error::InvalidState("negative Schmidt coefficient".into()));
        }
        let total: f64 = coefficients.iter().sum();
        if (total - 1.0).abs() > TOL_OBJECT {
            return Err(Error::InvalidState(format!("Schmidt coefficients sum to {total}")));
        }
        for basis in [&basis_a, &basis_b] {
            for (i, x) in basis.iter().enumerate() {
                for (j, y) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    if (x.inner(y) - c(target, 0.0)).norm() > TOL_OBJECT {
                        return Err(Error::InvalidState("Schmidt basis is not orthonormal".into()));
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..coefficients.len()).collect();
        order.sort_by(|&i, &j| coefficients[j].total_cmp(&coefficients[i]).then(i.cmp(&j)));
        Ok(Self {
            coefficients: order.iter().map(|&i| coefficients[i].max(0.0)).collect(),
            basis_a: order.iter().map(|&i| basis_a[i].clone()).collect(),
            basis_b: order.iter().map(|&i| basis_b[i].clone()).collect(),
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis_a(&self) -> &[StateVector] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[StateVector] {
        &self.basis_b
    }

    /// Λ = max λᵢ
    pub fn lambda_max(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > tol).count()
    }

    /// Σ √λᵢ |aᵢ⟩⊗|bᵢ⟩
    pub fn reconstruct(&self) -> StateVector {
        let da = self.basis_a.first().map(|v| v.dim()).unwrap_or(1);
        let db = self.basis_b.first().map(|v| v.dim()).unwrap_or(1);
        let mut amps = CVector::zeros(da * db);
        for ((l, a), b) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            amps += a.amplitudes().kronecker(b.amplitudes()) * c(l.sqrt(), 0.0);
        }
        StateVector::from_raw(amps, vec![da, db])
    }
}

/// Schmidt decomposition of a bipartite state of dimension dA·dB, via the
/// singular value decomposition of its dA×dB coefficient matrix.
pub fn schmidt(psi: &StateVector, da: usize, db: usize) -> Result<SchmidtForm> {
    if psi.dim() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} is not {da}×{db}",
            psi.dim()
        )));
    }
    let m = CMatrix::from_row_slice(da, db, psi.amplitudes().as_slice());
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V†");
    let k = svd.singular_values.len();
    let coefficients: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    let basis_a = (0..k)
        .map(|i| StateVector::from_raw(u.column(i).into_owned(), vec![da]))
        .collect();
    let basis_b = (0..k)
        .map(|i| StateVector::from_raw(v_t.row(i).transpose(), vec![db]))
        .collect();
    let form = SchmidtForm::new(coefficients, basis_a, basis_b)?;
    let err = (form.reconstruct().amplitudes() - psi.amplitudes()).camax();
    if err > TOL_DECOMP {
        return Err(Error::InvalidState(format!("Schmidt reconstruction error {err:.3e}")));
    }
    Ok(form)
}
