use num_complex::Complex64 as C64;

use super::{CouplingForm, ScenarioConfig, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HilbertDims, Operator, MAX_DENSE_DIM};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

// Qubit operators in the {e, g} ordering: index 0 is the excited state.

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// `|e⟩⟨g|`
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
}

pub fn sigma_minus() -> CMatrix {
    sigma_plus().transpose()
}

pub fn sigma_x() -> CMatrix {
    sigma_plus() + sigma_minus()
}

pub fn sigma_y() -> CMatrix {
    (sigma_plus() - sigma_minus()) * C64::new(0.0, -1.0)
}

/// Truncated bosonic annihilation operator on `d` Fock levels.
pub fn annihilation(d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

pub fn number(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == j { c(i as f64) } else { c(0.0) })
}

/// `X = a + a†`
pub fn quadrature(d: usize) -> CMatrix {
    let a = annihilation(d);
    &a + a.adjoint()
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `site` among `n_sites` copies of a `d`-dimensional unit.
pub fn embed(op: &CMatrix, site: usize, n_sites: usize) -> CMatrix {
    let d = op.nrows();
    let left = d.pow(site as u32);
    let right = d.pow((n_sites - site - 1) as u32);
    CMatrix::identity(left, left)
        .kronecker(op)
        .kronecker(&CMatrix::identity(right, right))
}

/// Free Hamiltonian of a single bath unit: `ω_B σ_z/2` or `ω_B b†b`.
pub fn unit_hamiltonian(kind: SystemKind, frequency: f64, d: usize) -> CMatrix {
    match kind {
        SystemKind::Tls => sigma_z() * c(0.5 * frequency),
        SystemKind::Lho => number(d) * c(frequency),
    }
}

/// Lowering operator of a single bath unit: `σ_-` or `b`.
pub fn unit_lowering(kind: SystemKind, d: usize) -> CMatrix {
    match kind {
        SystemKind::Tls => sigma_minus(),
        SystemKind::Lho => annihilation(d),
    }
}

/// Collective lowering operator `S_- = Σ σ_-^{(j)}` or `B = Σ b_j` on the full cluster.
pub fn collective_lowering(kind: SystemKind, d: usize, n_units: usize) -> CMatrix {
    let low = unit_lowering(kind, d);
    let total = d.pow(n_units as u32);
    (0..n_units).fold(CMatrix::zeros(total, total), |acc, j| acc + embed(&low, j, n_units))
}

fn target_hamiltonian(cfg: &ScenarioConfig) -> Result<CMatrix> {
    let d = cfg.target.dim()?;
    Ok(match cfg.target.kind {
        SystemKind::Tls => sigma_z() * c(0.5 * cfg.target.frequency),
        SystemKind::Lho => number(d) * c(cfg.target.frequency),
    })
}

fn exact_cluster_dims(cfg: &ScenarioConfig) -> Result<(usize, HilbertDims)> {
    let unit = cfg.bath_unit.dim()?;
    let total = cfg.cluster_dim()?;
    if total > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow { dim: total, limit: MAX_DENSE_DIM });
    }
    Ok((unit, HilbertDims::new(vec![unit; cfg.cluster.n_units])?))
}

/// `(H_S, H_B)`, with `H_B` the sum of unit Hamiltonians on the whole cluster.
pub fn build_free_hamiltonians(cfg: &ScenarioConfig) -> Result<(Operator, Operator)> {
    cfg.validate()?;
    let hs = Operator::from_matrix(target_hamiltonian(cfg)?)?;
    let (unit, dims) = exact_cluster_dims(cfg)?;
    let n = cfg.cluster.n_units;
    let h_unit = unit_hamiltonian(cfg.bath_unit.kind, cfg.bath_unit.frequency, unit);
    let total = dims.total();
    let hb = (0..n).fold(CMatrix::zeros(total, total), |acc, j| acc + embed(&h_unit, j, n));
    Ok((hs, Operator::new(dims, hb)?))
}

/// System-side jump operator `s` of `V = s†⊗A + s⊗A†`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coupling {
    /// `s = f1 σ_z + f2 σ_-` or `s = f1 a†a + f2 a`; two dissipators.
    Rwa { s: CMatrix },
    /// `s = s†`; a single dissipator weighted by the anticommutator moment.
    Hermitian { s: CMatrix },
}

impl Coupling {
    pub fn operator(&self) -> &CMatrix {
        match self {
            Coupling::Rwa { s } | Coupling::Hermitian { s } => s,
        }
    }
}

/// Target-side operator of the interaction for every supported combination.
pub fn lindblad_coupling(cfg: &ScenarioConfig) -> Result<Coupling> {
    cfg.validate()?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let d = cfg.target.dim()?;
    let form = cfg.interaction.form;
    Ok(match (cfg.target.kind, form) {
        (SystemKind::Tls, CouplingForm::Rwa) => Coupling::Rwa { s: sigma_z() * c(f1) + sigma_minus() * c(f2) },
        (SystemKind::Tls, CouplingForm::CounterRotating) => {
            Coupling::Hermitian { s: sigma_z() * c(f1) + sigma_x() * c(f2) }
        }
        (SystemKind::Lho, CouplingForm::CounterRotating) => {
            Coupling::Hermitian { s: number(d) * c(f1) + quadrature(d) * c(f2) }
        }
        (SystemKind::Lho, CouplingForm::Rwa) => {
            // validate() already rejects the two-level-bath variant
            debug_assert_eq!(cfg.bath_unit.kind, SystemKind::Lho);
            Coupling::Rwa { s: number(d) * c(f1) + annihilation(d) * c(f2) }
        }
    })
}

/// Interaction `V = s†⊗A + s⊗A†` on target ⊗ cluster, unscaled.
/// The cluster is always built explicitly here, whatever the cluster mode.
pub fn build_interaction(cfg: &ScenarioConfig) -> Result<Operator> {
    let coupling = lindblad_coupling(cfg)?;
    let s = coupling.operator();
    let (unit, cdims) = exact_cluster_dims(cfg)?;
    let a = collective_lowering(cfg.bath_unit.kind, unit, cfg.cluster.n_units);
    let joint_dim = s.nrows() * a.nrows();
    if joint_dim > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow { dim: joint_dim, limit: MAX_DENSE_DIM });
    }
    let v = s.adjoint().kronecker(&a) + s.kronecker(&a.adjoint());
    let dims = HilbertDims::single(s.nrows())?.concat(&cdims);
    Operator::new(dims, v)
}
