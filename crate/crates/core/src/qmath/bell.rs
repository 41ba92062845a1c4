use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use super::{c, CMatrix, CVector, StateVector};

/// The four two-qubit Bell states, in the fixed order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Amplitudes over |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        }
    }
}

impl fmt::Display for Bell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bell::PhiPlus => "Φ+",
            Bell::PhiMinus => "Φ-",
            Bell::PsiPlus => "Ψ+",
            Bell::PsiMinus => "Ψ-",
        })
    }
}

/// A tensor product of Bell states over `s` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellLabel {
    symbols: Vec<Bell>,
}

impl BellLabel {
    pub fn new(symbols: Vec<Bell>) -> Self {
        Self { symbols }
    }

    /// Label number `index` of the 4ˢ labels, first pair most significant.
    pub fn from_index(s: usize, mut index: usize) -> Self {
        let mut symbols = vec![Bell::PhiPlus; s];
        for slot in symbols.iter_mut().rev() {
            *slot = Bell::ALL[index % 4];
            index /= 4;
        }
        Self { symbols }
    }

    /// All 4ˢ labels in index order.
    pub fn all(s: usize) -> impl Iterator<Item = BellLabel> {
        (0..4usize.pow(s as u32)).map(move |i| BellLabel::from_index(s, i))
    }

    pub fn symbols(&self) -> &[Bell] {
        &self.symbols
    }

    pub fn pairs(&self) -> usize {
        self.symbols.len()
    }

    /// Number of Φ⁺ factors.
    pub fn r(&self) -> usize {
        self.symbols.iter().filter(|b| **b == Bell::PhiPlus).count()
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.symbols {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Tensor product of Bell pairs, pair-ordered (A₁, B₁, A₂, B₂, …).
pub fn bell_state(label: &BellLabel) -> StateVector {
    let mut amps = CVector::from_element(1, c(1.0, 0.0));
    for b in label.symbols() {
        let pair = CVector::from_iterator(4, b.amplitudes().iter().map(|&x| c(x, 0.0)));
        amps = amps.kronecker(&pair);
    }
    StateVector::from_raw(amps, vec![2; 2 * label.pairs()])
}

/// Unitary whose columns are the 4ˢ Bell-product vectors in label-index order.
pub fn bell_basis_matrix(s: usize) -> CMatrix {
    let cols: Vec<CVector> = BellLabel::all(s).map(|l| bell_state(&l).amplitudes().clone()).collect();
    CMatrix::from_columns(&cols)
}

/// |Φ⁺_d⟩ = (1/√d) Σᵢ |ii⟩ with dims (d, d).
pub fn phi_plus(d: usize) -> StateVector {
    let mut amps = CVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[i * d + i] = c(a, 0.0);
    }
    StateVector::from_raw(amps, vec![d, d])
}

/// Heisenberg-Weyl operator XᵃZᵇ on a d-level system, with
/// X|j⟩ = |j+1 mod d⟩ and Z|j⟩ = ωʲ|j⟩.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let phase = 2.0 * PI * ((b * j) % d) as f64 / d as f64;
        m[((j + a) % d, j)] = num_complex::Complex64::from_polar(1.0, phase);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::identity_deviation;

    #[test]
    fn phi_plus_label() {
        let v = bell_state(&BellLabel::new(vec![Bell::PhiPlus]));
        assert!((v.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.amplitudes() - phi_plus(2).amplitudes()).camax() < 1e-15);
    }

    #[test]
    fn single_pair_labels_orthogonal() {
        for a in Bell::ALL {
            for b in Bell::ALL {
                let ov = bell_state(&BellLabel::new(vec![a])).inner(&bell_state(&BellLabel::new(vec![b])));
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ov - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn two_pair_gram_matrix_is_identity() {
        let b = bell_basis_matrix(2);
        assert_eq!(b.ncols(), 16);
        assert!(identity_deviation(&(b.adjoint() * &b)) < 1e-12);
    }

    #[test]
    fn label_indexing_round_trip() {
        for (i, l) in BellLabel::all(3).enumerate() {
            let idx = l.symbols().iter().fold(0, |acc, b| acc * 4 + b.index());
            assert_eq!(idx, i);
            assert!(l.r() <= 3);
        }
        assert_eq!(BellLabel::from_index(2, 0).r(), 2);
        assert_eq!(BellLabel::from_index(2, 5).to_string(), "Φ-Φ-");
    }

    #[test]
    fn weyl_qubit_operators_are_paulis() {
        let x = weyl_operator(2, 1, 0);
        let z = weyl_operator(2, 0, 1);
        assert!((x[(0, 1)].re - 1.0).abs() < 1e-15 && x[(0, 0)].norm() < 1e-15);
        assert!((z[(1, 1)].re + 1.0).abs() < 1e-15);
        for d in 2..5 {
            for a in 0..d {
                for b in 0..d {
                    let w = weyl_operator(d, a, b);
                    assert!(identity_deviation(&(w.adjoint() * &w)) < 1e-12);
                }
            }
        }
    }
}
