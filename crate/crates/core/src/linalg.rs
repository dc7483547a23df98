//! Dense complex linear algebra on tensor-product Hilbert spaces.
//!
//! Everything here is dense: `Operator` wraps an `nalgebra::DMatrix<C64>` together
//! with the factor dimensions of the space it acts on, so partial traces can be
//! taken without the caller tracking layouts by hand.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

/// Largest total dimension we are willing to build densely.
pub const MAX_DENSE_DIM: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-10;
const STATE_HERMITIAN_TOL: f64 = 1e-12;
const STATE_TRACE_TOL: f64 = 1e-10;
const STATE_EIG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertDims(Vec<usize>);

impl HilbertDims {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDims("no factors".into()));
        }
        if let Some(pos) = factors.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDims(format!("factor {pos} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &factors {
            total = total
                .checked_mul(d)
                .ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: MAX_DENSE_DIM })?;
        }
        Ok(HilbertDims(factors))
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn concat(&self, other: &HilbertDims) -> HilbertDims {
        let mut f = self.0.clone();
        f.extend_from_slice(&other.0);
        HilbertDims(f)
    }

    /// Product of the factors at `indices` (which must already be validated).
    fn sub_total(&self, indices: &[usize]) -> usize {
        indices.iter().map(|&i| self.0[i]).product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: HilbertDims,
    data: CMatrix,
}

impl Operator {
    pub fn new(dims: HilbertDims, data: CMatrix) -> Result<Self> {
        let d = dims.total();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if data.nrows() != d { data.nrows() } else { data.ncols() },
            });
        }
        Ok(Operator { dims, data })
    }

    /// Wraps a square matrix as an operator on a single factor.
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.nrows(), found: data.ncols() });
        }
        let dims = HilbertDims::single(data.nrows())?;
        Ok(Operator { dims, data })
    }

    pub fn identity(dims: HilbertDims) -> Self {
        let d = dims.total();
        Operator { dims, data: CMatrix::identity(d, d) }
    }

    pub fn zeros(dims: HilbertDims) -> Self {
        let d = dims.total();
        Operator { dims, data: CMatrix::zeros(d, d) }
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn adjoint(&self) -> Operator {
        Operator { dims: self.dims.clone(), data: self.data.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Largest entry of `A - A†`.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.data)
    }

    pub fn scale(&self, s: C64) -> Operator {
        Operator { dims: self.dims.clone(), data: &self.data * s }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { dims: self.dims.clone(), data: &self.data + &other.data })
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator { dims: self.dims.clone(), data: &self.data * &other.data })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_same(other)?;
        Ok(Operator {
            dims: self.dims.clone(),
            data: &self.data * &other.data - &other.data * &self.data,
        })
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn require_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    let deviation = hermitian_deviation(m);
    let scale = 1.0f64.max(m.iter().fold(0.0f64, |a, z| a.max(z.norm())));
    if deviation > tol * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Symmetrises a numerically Hermitian matrix in place: `(A + A†)/2`.
pub(crate) fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let dev = op.hermitian_deviation();
        if dev > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("Hermitian deviation {dev:.3e}")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_eig = op.data.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -STATE_EIG_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix(op))
    }

    /// Skips validation. Used internally for states produced by trace-preserving maps
    /// whose numerical drift is monitored separately.
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        DensityMatrix(op)
    }

    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        Self::new(Operator::from_matrix(data)?)
    }

    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Self::from_matrix(&v * v.adjoint())
    }

    /// Projector onto the `k`-th computational basis vector.
    pub fn basis(dims: HilbertDims, k: usize) -> Result<Self> {
        let d = dims.total();
        if k >= d {
            return Err(Error::DimensionMismatch { expected: d, found: k });
        }
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(DensityMatrix(Operator { dims, data: m }))
    }

    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let d = dims.total();
        let m = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        DensityMatrix(Operator { dims, data: m })
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0.data
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.0.dims
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.0.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * trace_norm_hermitian(&(self.matrix() - other.matrix()))
    }
}

/// Inverse temperature, with `T = 0` represented exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    pub fn from_temperature(t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::config("temperature", format!("must be finite and >= 0, got {t}")));
        }
        Ok(if t == 0.0 { Beta::Infinite } else { Beta::Finite(1.0 / t) })
    }

    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }

    /// `tanh(βω/2)`
    pub fn tanh_half(self, omega: f64) -> f64 {
        match self {
            Beta::Finite(b) => (0.5 * b * omega).tanh(),
            Beta::Infinite => omega.signum(),
        }
    }

    /// Fermi occupation `1/(e^{βω}+1)`
    pub fn fermi(self, omega: f64) -> f64 {
        match self {
            Beta::Finite(b) => {
                let x = b * omega;
                if x >= 0.0 {
                    let e = (-x).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + x.exp())
                }
            }
            Beta::Infinite => 0.0,
        }
    }

    /// Bose occupation `1/(e^{βω}-1)`; infinite at `β = 0`.
    pub fn bose(self, omega: f64) -> f64 {
        match self {
            Beta::Finite(b) => (b * omega).exp_m1().recip(),
            Beta::Infinite => 0.0,
        }
    }
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator { dims: a.dims.concat(&b.dims), data: a.data.kronecker(&b.data) }
}

pub fn kron_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix(kron(&a.0, &b.0))
}

fn validate_keep(dims: &HilbertDims, keep: &[usize]) -> Result<()> {
    let bad = keep.is_empty()
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&k| k >= dims.len());
    if bad {
        return Err(Error::InvalidIndexSet { indices: keep.to_vec(), factors: dims.len() });
    }
    Ok(())
}

/// Traces out every factor not listed in `keep` (strictly increasing indices).
pub fn partial_trace(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let dims = &op.dims;
    validate_keep(dims, keep)?;
    let f = dims.factors();
    let n = f.len();
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let d_keep = dims.sub_total(keep);
    let d_trace = dims.sub_total(&traced);

    // Row-major strides of the full index.
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * f[i + 1];
    }
    // Full index for every (kept, traced) pair.
    let compose = |kept: usize, tr: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept;
        for &k in keep.iter().rev() {
            idx += (rem % f[k]) * stride[k];
            rem /= f[k];
        }
        let mut rem = tr;
        for &t in traced.iter().rev() {
            idx += (rem % f[t]) * stride[t];
            rem /= f[t];
        }
        idx
    };
    let table: Vec<Vec<usize>> = (0..d_trace)
        .map(|t| (0..d_keep).map(|k| compose(k, t)).collect())
        .collect();

    let mut out = CMatrix::zeros(d_keep, d_keep);
    for row in &table {
        for (a, &ia) in row.iter().enumerate() {
            for (b, &ib) in row.iter().enumerate() {
                out[(a, b)] += op.data[(ia, ib)];
            }
        }
    }
    let kept_dims = HilbertDims(keep.iter().map(|&k| f[k]).collect());
    Ok(Operator { dims: kept_dims, data: out })
}

pub fn partial_trace_state(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix(partial_trace(&rho.0, keep)?))
}

/// `exp(-i H t)` for Hermitian `H`, via its eigendecomposition.
pub fn herm_expm(h: &Operator, t: f64) -> Result<Operator> {
    require_hermitian(&h.data, HERMITIAN_TOL)?;
    let mut m = h.data.clone();
    hermitize(&mut m);
    let eig = m.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)),
    );
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(Operator { dims: h.dims.clone(), data: vd * v.adjoint() })
}

/// Gibbs state `e^{-βH}/Z`. At `β = ∞` this is the uniform mixture over the
/// ground manifold.
pub fn thermal_state(h: &Operator, beta: Beta) -> Result<DensityMatrix> {
    if let Beta::Finite(b) = beta {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::config("beta", format!("must be finite and >= 0, got {b}")));
        }
    }
    require_hermitian(&h.data, HERMITIAN_TOL)?;
    let mut m = h.data.clone();
    hermitize(&mut m);
    let eig = m.symmetric_eigen();
    let lam = &eig.eigenvalues;
    let lmin = lam.min();
    let weights: Vec<f64> = lam
        .iter()
        .map(|&l| match beta {
            Beta::Finite(b) => (-b * (l - lmin)).exp(),
            Beta::Infinite => {
                if l - lmin <= 1e-9 * 1.0f64.max(lmin.abs()) {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let v = &eig.eigenvectors;
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= C64::new(weights[j] / z, 0.0);
    }
    let mut rho = vd * v.adjoint();
    hermitize(&mut rho);
    Ok(DensityMatrix(Operator { dims: h.dims.clone(), data: rho }))
}

/// Thermal state of a diagonal Hamiltonian with the given energies.
pub(crate) fn thermal_diagonal(energies: &[f64], beta: Beta) -> Vec<f64> {
    let lmin = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies
        .iter()
        .map(|&l| match beta {
            Beta::Finite(b) => (-b * (l - lmin)).exp(),
            Beta::Infinite => {
                if l - lmin <= 1e-9 * 1.0f64.max(lmin.abs()) {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// `tr(O ρ)`
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: op.dim() });
    }
    Ok(trace_product(&op.data, rho.matrix()))
}

/// `tr(A B)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    let mut h = m.clone();
    hermitize(&mut h);
    h.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum()
}
