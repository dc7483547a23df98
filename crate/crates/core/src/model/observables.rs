use serde::{Deserialize, Serialize};

use super::operators::{sigma_x, sigma_y, sigma_z};
use crate::error::{Error, Result};
use crate::linalg::{trace_product, DensityMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochState { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `|⟨σ_x⟩ + i⟨σ_y⟩|`
    pub fn coherence(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm().powi(2))
    }

    pub fn max_abs_diff(&self, other: &BlochState) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs()).max((self.z - other.z).abs())
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        use num_complex::Complex64 as C64;
        let m = (crate::linalg::CMatrix::identity(2, 2)
            + sigma_x() * C64::new(self.x, 0.0)
            + sigma_y() * C64::new(self.y, 0.0)
            + sigma_z() * C64::new(self.z, 0.0))
            * C64::new(0.5, 0.0);
        DensityMatrix::from_matrix(m)
    }
}

/// Sum of absolute off-diagonal elements. The target Hamiltonians used here are
/// diagonal in the computational basis, so that basis is the energy eigenbasis.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = m.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochState> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit);
    }
    let m = rho.matrix();
    Ok(BlochState {
        x: trace_product(&sigma_x(), m).re,
        y: trace_product(&sigma_y(), m).re,
        z: trace_product(&sigma_z(), m).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HilbertDims;
    use nalgebra::DVector;
    use num_complex::Complex64 as C64;

    #[test]
    fn coherence_examples() {
        let diag = DensityMatrix::basis(HilbertDims::single(3).unwrap(), 1).unwrap();
        assert_eq!(l1_coherence(&diag), 0.0);
        let plus = DensityMatrix::pure(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])).unwrap();
        assert!((l1_coherence(&plus) - 1.0).abs() < 1e-15);
        let r = BlochState::new(0.6, 0.8, 0.0).to_density().unwrap();
        assert!((l1_coherence(&r) - 1.0).abs() < 1e-15);
        let b = bloch_vector(&r).unwrap();
        assert!((b.coherence() - l1_coherence(&r)).abs() < 1e-15);
    }

    #[test]
    fn purity_examples() {
        let mixed = DensityMatrix::maximally_mixed(HilbertDims::single(2).unwrap());
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);
        let r = BlochState::new(0.115088, 0.213127, -0.918621);
        assert!((purity(&r.to_density().unwrap()) - 0.951266).abs() < 1e-6);
    }

    #[test]
    fn excited_state_has_positive_inversion() {
        let e = DensityMatrix::basis(HilbertDims::single(2).unwrap(), 0).unwrap();
        assert_eq!(bloch_vector(&e).unwrap(), BlochState::new(0.0, 0.0, 1.0));
        let big = DensityMatrix::maximally_mixed(HilbertDims::single(3).unwrap());
        assert_eq!(bloch_vector(&big), Err(Error::NotQubit));
    }
}
