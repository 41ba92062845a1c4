use super::{c, haar_unitary, identity_deviation, weyl_operator, CMatrix, DensityMatrix, RngStream, TOL_OBJECT};
use crate::error::{Error, Result};

/// Completely positive trace-preserving map in operator-sum form.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    d: usize,
}

impl QuantumChannel {
    /// Checks Σ K†K = I.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let d = kraus
            .first()
            .ok_or(Error::NotTracePreserving(1.0))?
            .ncols();
        let mut sum = CMatrix::zeros(d, d);
        for k in &kraus {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {d}x{d}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            sum += k.adjoint() * k;
        }
        let dev = identity_deviation(&sum);
        if dev > TOL_OBJECT {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { kraus, d })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(d, d)],
            d,
        }
    }

    /// ρ ↦ (1−p)ρ + p·I/d, written with the d² Weyl operators.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("depolarizing strength {p} outside [0, 1]")));
        }
        let n = (d * d) as f64;
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let w = if a == 0 && b == 0 { 1.0 - p + p / n } else { p / n };
                if w > 0.0 {
                    kraus.push(weyl_operator(d, a, b) * c(w.sqrt(), 0.0));
                }
            }
        }
        Self::new(kraus)
    }

    pub fn fully_depolarizing(d: usize) -> Self {
        Self::depolarizing(d, 1.0).expect("p = 1 is in range")
    }

    /// Applies unitary Uᵢ with probability pᵢ.
    pub fn mixed_unitary(probs: &[f64], unitaries: &[CMatrix]) -> Result<Self> {
        if probs.len() != unitaries.len() {
            return Err(Error::DimensionMismatch("probabilities and unitaries differ in length".into()));
        }
        let kraus = probs
            .iter()
            .zip(unitaries)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, u)| u * c(p.sqrt(), 0.0))
            .collect();
        Self::new(kraus)
    }

    /// Random channel from a Haar unitary on system ⊗ environment with the
    /// environment starting in |0⟩ and traced out afterwards.
    pub fn random(d: usize, env_dim: usize, rng: &mut RngStream) -> Self {
        let u = haar_unitary(d * env_dim, rng);
        let u = u.matrix();
        let kraus = (0..env_dim)
            .map(|e| CMatrix::from_fn(d, d, |i, j| u[(i * env_dim + e, j * env_dim)]))
            .collect();
        Self { kraus, d }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// Σ K ρ K†
pub fn apply_channel(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != channel.d {
        return Err(Error::DimensionMismatch(format!(
            "channel on dim {} applied to state of dim {}",
            channel.d,
            rho.dim()
        )));
    }
    let mut out = CMatrix::zeros(channel.d, channel.d);
    for k in &channel.kraus {
        out += k * rho.matrix() * k.adjoint();
    }
    Ok(DensityMatrix::from_raw(out, rho.dims().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{haar_state, StateVector};

    #[test]
    fn identity_fixes_state() {
        let mut rng = RngStream::new(1);
        let rho = haar_state(3, &mut rng).to_density();
        let out = apply_channel(&QuantumChannel::identity(3), &rho).unwrap();
        assert!((out.matrix() - rho.matrix()).camax() < 1e-15);
    }

    #[test]
    fn fully_depolarizing_gives_maximally_mixed() {
        let mut rng = RngStream::new(2);
        for _ in 0..10 {
            let rho = haar_state(2, &mut rng).to_density();
            let out = apply_channel(&QuantumChannel::fully_depolarizing(2), &rho).unwrap();
            assert!((out.matrix() - DensityMatrix::maximally_mixed(2).matrix()).camax() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_on_zero() {
        let out = apply_channel(
            &QuantumChannel::depolarizing(2, 0.4).unwrap(),
            &StateVector::basis(2, 0).to_density(),
        )
        .unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.8).abs() < 1e-12);
        assert!((out.matrix()[(1, 1)].re - 0.2).abs() < 1e-12);
        assert!(out.matrix()[(0, 1)].norm() < 1e-12);
        assert!(DensityMatrix::new(out.matrix().clone(), vec![2]).is_ok());
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let k = vec![CMatrix::identity(2, 2) * c(0.9, 0.0)];
        assert!(matches!(QuantumChannel::new(k), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn random_channels_are_trace_preserving() {
        let mut rng = RngStream::new(3);
        for d in 2..4 {
            let ch = QuantumChannel::random(d, 3, &mut rng);
            assert!(QuantumChannel::new(ch.kraus().to_vec()).is_ok());
        }
    }
}
