//! The exact discrete collision map
//!
//! ```text
//! ρ_{n+1} = tr_B{ U (ρ_n ⊗ ρ_B) U† },   U = exp(-iτ(H_S + H_B + V/√τ))
//! ```
//!
//! with a fresh thermal cluster `ρ_B` for every collision. The couplings stored in
//! the scenario are the ones that appear in the coarse-grained generator; the
//! `1/√τ` rescaling happens here.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_expm, hermitize, kron, partial_trace, thermal_diagonal, CMatrix, DensityMatrix, HilbertDims, Operator,
    MAX_DENSE_DIM,
};
use crate::mastereq::sample_of;
use crate::model::{build_free_hamiltonians, build_interaction, BlochState, ClusterMode, ScenarioConfig};

/// Observables recorded at one point of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub coherence: f64,
    pub purity: f64,
    /// Present for qubit targets.
    pub bloch: Option<BlochState>,
    /// Trace-norm distance to the previous sample (zero for the first one).
    pub change: f64,
}

/// Uniformly spaced samples `t_k = k·spacing`, with full states kept every
/// `state_stride` samples and the final state always kept.
#[derive(Clone, Debug)]
pub struct Trajectory {
    spacing: f64,
    samples: Vec<Sample>,
    state_stride: usize,
    states: Vec<DensityMatrix>,
    final_state: DensityMatrix,
}

impl Trajectory {
    pub(crate) fn new(spacing: f64, state_stride: usize, initial: DensityMatrix) -> Self {
        Trajectory { spacing, samples: Vec::new(), state_stride: state_stride.max(1), states: Vec::new(), final_state: initial }
    }

    pub(crate) fn push(&mut self, sample: Sample, state: Option<DensityMatrix>) {
        if let Some(s) = state {
            debug_assert_eq!(self.samples.len() % self.state_stride, 0);
            self.states.push(s);
        }
        self.samples.push(sample);
    }

    pub(crate) fn set_final(&mut self, state: DensityMatrix) {
        self.final_state = state;
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.spacing
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|k| self.time(k)).collect()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn coherences(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.coherence).collect()
    }

    pub fn state_stride(&self) -> usize {
        self.state_stride
    }

    /// Stored states, `states()[j]` being the state at sample `j·state_stride`.
    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn state_at(&self, k: usize) -> Option<&DensityMatrix> {
        if k + 1 == self.samples.len() {
            return Some(&self.final_state);
        }
        if k.is_multiple_of(self.state_stride) {
            self.states.get(k / self.state_stride)
        } else {
            None
        }
    }

    pub fn final_state(&self) -> &DensityMatrix {
        &self.final_state
    }
}

/// Precompiled single-collision channel.
#[derive(Clone, Debug)]
pub struct CollisionChannel {
    tau: f64,
    target_dims: HilbertDims,
    joint_dims: HilbertDims,
    unitary: CMatrix,
    /// Diagonal of the product thermal state of the cluster.
    bath_probs: Vec<f64>,
    /// Vectorised channel: `vec(ρ') = T vec(ρ)` (row-major).
    transfer: CMatrix,
}

impl CollisionChannel {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.cluster.mode == ClusterMode::AnalyticMoment {
            return Err(Error::AnalyticModeRejected);
        }
        let tau = cfg.collision.tau;
        let (hs, hb) = build_free_hamiltonians(cfg)?;
        let v = build_interaction(cfg)?;
        let joint_dims = v.dims().clone();
        let ds = hs.dim();
        let db = hb.dim();
        if ds * db > MAX_DENSE_DIM {
            return Err(Error::DimensionOverflow { dim: ds * db, limit: MAX_DENSE_DIM });
        }
        let free = kron(&hs, &Operator::identity(hb.dims().clone()))
            .add(&kron(&Operator::identity(hs.dims().clone()), &hb))?;
        let total = Operator::new(joint_dims.clone(), free.matrix() + v.matrix() * C64::new(1.0 / tau.sqrt(), 0.0))?;
        let unitary = herm_expm(&total, tau)?.into_matrix();

        // The free cluster Hamiltonian is diagonal, so its Gibbs state is too.
        let energies: Vec<f64> = (0..db).map(|k| hb.matrix()[(k, k)].re).collect();
        let bath_probs = thermal_diagonal(&energies, cfg.beta()?);

        // T = Σ_{k,l} p_k K_lk ⊗ conj(K_lk),  K_lk[a, b] = U[(a, l), (b, k)]
        let mut transfer = CMatrix::zeros(ds * ds, ds * ds);
        for (k, &pk) in bath_probs.iter().enumerate() {
            if pk == 0.0 {
                continue;
            }
            for l in 0..db {
                let kraus = CMatrix::from_fn(ds, ds, |a, b| unitary[(a * db + l, b * db + k)]);
                transfer += kraus.kronecker(&kraus.conjugate()) * C64::new(pk, 0.0);
            }
        }
        Ok(CollisionChannel { tau, target_dims: hs.dims().clone(), joint_dims, unitary, bath_probs, transfer })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn bath_state(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.bath_probs.len(),
            self.bath_probs.iter().map(|&p| C64::new(p, 0.0)),
        ))
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.target_dims.total() {
            return Err(Error::DimensionMismatch { expected: self.target_dims.total(), found: rho.dim() });
        }
        Ok(())
    }

    /// One collision through the precompiled transfer matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check(rho)?;
        let d = rho.dim();
        let mut v = nalgebra::DVector::from_iterator(d * d, (0..d * d).map(|idx| rho.matrix()[(idx / d, idx % d)]));
        v = &self.transfer * v;
        let mut m = CMatrix::from_fn(d, d, |i, k| v[i * d + k]);
        hermitize(&mut m);
        Ok(DensityMatrix::new_unchecked(Operator::new(self.target_dims.clone(), m)?))
    }

    /// One collision by explicit joint evolution and partial trace.
    pub fn apply_tensor(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check(rho)?;
        let joint = rho.matrix().kronecker(&self.bath_state());
        let evolved = &self.unitary * joint * self.unitary.adjoint();
        let op = Operator::new(self.joint_dims.clone(), evolved)?;
        let mut reduced = partial_trace(&op, &[0])?.into_matrix();
        hermitize(&mut reduced);
        Ok(DensityMatrix::new_unchecked(Operator::new(self.target_dims.clone(), reduced)?))
    }
}

/// A single collision with a fresh thermal cluster.
pub fn collide_once(rho: &DensityMatrix, cfg: &ScenarioConfig) -> Result<DensityMatrix> {
    CollisionChannel::new(cfg)?.apply_tensor(rho)
}

/// `n` successive collisions; every state is kept.
pub fn run_collisions(rho0: &DensityMatrix, cfg: &ScenarioConfig, n: usize) -> Result<Trajectory> {
    run_collisions_strided(rho0, cfg, n, 1)
}

/// `n` successive collisions; observables after every collision, full states every
/// `state_stride` collisions.
pub fn run_collisions_strided(
    rho0: &DensityMatrix,
    cfg: &ScenarioConfig,
    n: usize,
    state_stride: usize,
) -> Result<Trajectory> {
    let channel = CollisionChannel::new(cfg)?;
    channel.check(rho0)?;
    let mut traj = Trajectory::new(channel.tau, state_stride, rho0.clone());
    traj.push(sample_of(rho0, None), Some(rho0.clone()));
    let mut rho = rho0.clone();
    for k in 1..=n {
        let next = channel.apply(&rho)?;
        let sample = sample_of(&next, Some(&rho));
        let keep = k % traj.state_stride() == 0;
        traj.push(sample, keep.then(|| next.clone()));
        rho = next;
    }
    traj.set_final(rho);
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct SteadyReport {
    pub converged: bool,
    /// First step `k` such that the changes `ρ_{k+1} - ρ_k, …, ρ_{k+50} - ρ_{k+49}`
    /// all stayed below threshold.
    pub index: Option<usize>,
    pub time: Option<f64>,
    pub final_state: DensityMatrix,
    /// Change at the last sample, per unit time.
    pub final_rate: f64,
}

pub const STEADY_WINDOW: usize = 50;

/// Steady state reached once the per-sample change stays below `tol·spacing`
/// for `STEADY_WINDOW` consecutive samples.
pub fn detect_steady(traj: &Trajectory, tol: f64) -> SteadyReport {
    let threshold = tol * traj.spacing();
    let samples = traj.samples();
    let mut run = 0usize;
    let mut index = None;
    for (k, s) in samples.iter().enumerate().skip(1) {
        if s.change < threshold {
            run += 1;
            if run == STEADY_WINDOW {
                index = Some(k - STEADY_WINDOW);
                break;
            }
        } else {
            run = 0;
        }
    }
    let final_rate = samples.last().map(|s| s.change / traj.spacing()).unwrap_or(0.0);
    SteadyReport {
        converged: index.is_some(),
        index,
        time: index.map(|k| traj.time(k)),
        final_state: traj.final_state().clone(),
        final_rate,
    }
}

/// Largest Bloch-vector gap between the collision map and the coarse-grained
/// generator over `[0, t_end]`, compared at every collision instant. The
/// generator is integrated on a grid that splits each collision into equal
/// RK4 steps within the step bound.
pub fn bloch_gap_vs_me(rho0: &DensityMatrix, cfg: &ScenarioConfig, t_end: f64) -> Result<f64> {
    if rho0.dim() != 2 {
        return Err(Error::NotQubit);
    }
    let tau = cfg.collision.tau;
    let n = (t_end / tau).round() as usize;
    let coll = run_collisions_strided(rho0, cfg, n, n.max(1))?;
    let gen = crate::mastereq::make_generator(cfg)?;
    let sub = (tau / gen.max_step()).ceil().max(1.0) as usize;
    let me = crate::mastereq::evolve_me_sampled(rho0, &gen, n as f64 * tau, tau / sub as f64, sub, usize::MAX)?;
    let mut gap = 0.0f64;
    for (a, b) in coll.samples().iter().zip(me.samples()) {
        let (a, b) = (a.bloch.ok_or(Error::NotQubit)?, b.bloch.ok_or(Error::NotQubit)?);
        gap = gap.max(a.max_abs_diff(&b));
    }
    Ok(gap)
}
