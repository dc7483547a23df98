use serde::{Deserialize, Serialize};

use super::operators::{collective_lowering, unit_hamiltonian};
use super::{ScenarioConfig, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{thermal_diagonal, trace_product, CMatrix, MAX_DENSE_DIM};

/// Second moments of the collective lowering operator `A` in the cluster
/// thermal state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathMoments {
    /// `⟨A A†⟩`
    pub m_lower: f64,
    /// `⟨A† A⟩`
    pub m_raise: f64,
    /// `⟨{A, A†}⟩`
    pub anticomm: f64,
    /// `⟨[A, A†]⟩`
    pub comm: f64,
}

impl BathMoments {
    pub fn from_second_moments(m_lower: f64, m_raise: f64) -> Self {
        BathMoments { m_lower, m_raise, anticomm: m_lower + m_raise, comm: m_lower - m_raise }
    }

    /// Absolute gap between two moment sets, over all four entries.
    pub fn max_abs_diff(&self, other: &BathMoments) -> f64 {
        [
            self.m_lower - other.m_lower,
            self.m_raise - other.m_raise,
            self.anticomm - other.anticomm,
            self.comm - other.comm,
        ]
        .iter()
        .fold(0.0f64, |a, d| a.max(d.abs()))
    }
}

/// Closed-form moments of `S_-` (two-level units) or `B` (oscillator units) for
/// `N` uncorrelated thermal units. Oscillator units are treated untruncated.
pub fn bath_moments(cfg: &ScenarioConfig) -> Result<BathMoments> {
    let beta = cfg.beta()?;
    let n = cfg.cluster.n_units as f64;
    let w = cfg.bath_unit.frequency;
    Ok(match cfg.bath_unit.kind {
        SystemKind::Tls => {
            let nf = beta.fermi(w);
            BathMoments::from_second_moments(n * (1.0 - nf), n * nf)
        }
        SystemKind::Lho => {
            let nt = beta.bose(w);
            BathMoments::from_second_moments(n * (nt + 1.0), n * nt)
        }
    })
}

/// Moments from an explicit tensor-product construction of the collective
/// operators and the product thermal state.
pub fn bath_moments_bruteforce(cfg: &ScenarioConfig) -> Result<BathMoments> {
    let unit = cfg.bath_unit.dim()?;
    let total = cfg.cluster_dim()?;
    if total > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow { dim: total, limit: MAX_DENSE_DIM });
    }
    let n = cfg.cluster.n_units;
    let beta = cfg.beta()?;
    let h = unit_hamiltonian(cfg.bath_unit.kind, cfg.bath_unit.frequency, unit);
    let energies: Vec<f64> = (0..unit).map(|k| h[(k, k)].re).collect();
    let p_unit = thermal_diagonal(&energies, beta);
    // product state, diagonal in the computational basis
    let mut p = vec![1.0f64; total];
    for (idx, pk) in p.iter_mut().enumerate() {
        let mut rem = idx;
        for _ in 0..n {
            *pk *= p_unit[rem % unit];
            rem /= unit;
        }
    }
    let rho = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        total,
        p.iter().map(|&x| num_complex::Complex64::new(x, 0.0)),
    ));
    let a = collective_lowering(cfg.bath_unit.kind, unit, n);
    let ad = a.adjoint();
    let m_lower = trace_product(&(&a * &ad), &rho).re;
    let m_raise = trace_product(&(&ad * &a), &rho).re;
    Ok(BathMoments::from_second_moments(m_lower, m_raise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BathUnitSpec, ClusterMode, CouplingForm};

    fn cfg(bath: BathUnitSpec, n: usize) -> ScenarioConfig {
        ScenarioConfig::qubit(1.0, bath, n, 0.1, 0.1, CouplingForm::Rwa)
    }

    #[test]
    fn qubit_units_closed_form() {
        let m = bath_moments(&cfg(BathUnitSpec::qubit(1.0, 0.37), 3)).unwrap();
        assert!((m.anticomm - 3.0).abs() < 1e-14);
        let m = bath_moments(&cfg(BathUnitSpec::qubit(1.0, 0.2), 1)).unwrap();
        assert!((m.comm - 2.5f64.tanh()).abs() < 1e-14);
        assert!((m.comm - 0.98661).abs() < 1e-5);
    }

    #[test]
    fn oscillator_units_closed_form() {
        let m = bath_moments(&cfg(BathUnitSpec::oscillator(1.0, 1.0), 2)).unwrap();
        assert!((m.anticomm - 2.0 / 0.5f64.tanh()).abs() < 1e-13);
        assert!((m.anticomm - 4.327907).abs() < 1e-6);
        assert!((m.comm - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bruteforce_matches_closed_form_for_qubit_units() {
        for n in 1..=4 {
            for t in [0.0, 0.1, 0.5, 1.0, 3.0] {
                let c = cfg(BathUnitSpec::qubit(1.3, t), n);
                let exact = bath_moments(&c).unwrap();
                let brute = bath_moments_bruteforce(&c).unwrap();
                assert!(exact.max_abs_diff(&brute) < 1e-12, "n={n} t={t}");
            }
        }
        let ground = bath_moments_bruteforce(&cfg(BathUnitSpec::qubit(1.0, 0.0), 1)).unwrap();
        assert_eq!((ground.m_lower, ground.m_raise), (1.0, 0.0));
    }

    #[test]
    fn truncated_oscillator_commutator() {
        let c = cfg(BathUnitSpec::oscillator(1.0, 1.0).with_truncation(40), 1);
        let brute = bath_moments_bruteforce(&c).unwrap();
        assert!((brute.comm - 1.0).abs() < 1e-10);
        let auto = cfg(BathUnitSpec::oscillator(1.0, 1.0), 2);
        let brute = bath_moments_bruteforce(&auto).unwrap();
        let exact = bath_moments(&auto).unwrap();
        assert!(exact.max_abs_diff(&brute) < 1e-8);
    }

    #[test]
    fn bruteforce_refuses_oversized_clusters() {
        let c = cfg(BathUnitSpec::qubit(1.0, 0.2), 13).with_mode(ClusterMode::AnalyticMoment);
        assert!(matches!(bath_moments_bruteforce(&c), Err(Error::DimensionOverflow { .. })));
    }
}
