//! Coarse-grained Lindblad dynamics in the limit of short collisions.
//!
//! ```text
//! dρ/dt = -i[H_S, ρ] + ⟨AA†⟩ L[s]ρ + ⟨A†A⟩ L[s†]ρ,    L[x]ρ = xρx† - ½{x†x, ρ}
//! ```
//!
//! For Hermitian `s` the two dissipators merge into one weighted by `⟨{A, A†}⟩`.

mod bloch;
mod closed_form;
mod liouvillian;

pub use bloch::{bloch_steady, bloch_steady_linear, bloch_steady_rwa, bloch_steady_rwa_from, bloch_system, BlochRates};
pub use closed_form::{
    c0, osc_target_steady, purity_closed_form, purity_large_n, ssc_closed_form, ssc_large_n, sz_large_n,
    OscSteady,
};
pub use liouvillian::Liouvillian;

use num_complex::Complex64 as C64;

use crate::collision::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix, DensityMatrix, Operator};
use crate::model::{bath_moments, bloch_vector, l1_coherence, lindblad_coupling, Coupling, ScenarioConfig, SystemKind};

/// Steps are capped at `STEP_FRACTION / characteristic_rate`.
pub const STEP_FRACTION: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    hamiltonian: Operator,
    dissipators: Vec<(Operator, f64)>,
    characteristic_rate: f64,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: Operator, dissipators: Vec<(Operator, f64)>) -> Result<Self> {
        let dev = hamiltonian.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        for (j, rate) in &dissipators {
            if j.dims() != hamiltonian.dims() {
                return Err(Error::DimensionMismatch { expected: hamiltonian.dim(), found: j.dim() });
            }
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(Error::config("dissipator rate", format!("must be finite and >= 0, got {rate}")));
            }
        }
        // Default scale: spectral width of H plus the total dissipative strength.
        let eig = hamiltonian.matrix().clone().symmetric_eigen().eigenvalues;
        let width = eig.max() - eig.min();
        let diss: f64 = dissipators
            .iter()
            .map(|(j, r)| r * j.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        Ok(LindbladGenerator { hamiltonian, dissipators, characteristic_rate: width.max(diss).max(f64::MIN_POSITIVE) })
    }

    pub fn with_characteristic_rate(mut self, rate: f64) -> Self {
        self.characteristic_rate = rate;
        self
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn dissipators(&self) -> &[(Operator, f64)] {
        &self.dissipators
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn characteristic_rate(&self) -> f64 {
        self.characteristic_rate
    }

    /// Largest admissible fixed step.
    pub fn max_step(&self) -> f64 {
        STEP_FRACTION / self.characteristic_rate
    }

    /// Dense evaluation of the generator on an arbitrary matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.matrix();
        let i = C64::new(0.0, 1.0);
        let mut out = (h * rho - rho * h) * (-i);
        for (j, rate) in &self.dissipators {
            let j = j.matrix();
            let jd = j.adjoint();
            let jdj = &jd * j;
            out += (j * rho * &jd - (&jdj * rho + rho * &jdj) * C64::new(0.5, 0.0)) * C64::new(*rate, 0.0);
        }
        out
    }

    pub fn liouvillian(&self) -> Liouvillian {
        Liouvillian::from_generator(self)
    }
}

/// Generator for the configured target/bath/interaction combination.
pub fn make_generator(cfg: &ScenarioConfig) -> Result<LindbladGenerator> {
    cfg.validate()?;
    let moments = bath_moments(cfg)?;
    let d = cfg.target.dim()?;
    let hs = match cfg.target.kind {
        SystemKind::Tls => crate::model::sigma_z() * C64::new(0.5 * cfg.target.frequency, 0.0),
        SystemKind::Lho => crate::model::number(d) * C64::new(cfg.target.frequency, 0.0),
    };
    let h = Operator::from_matrix(hs)?;
    let coupling = lindblad_coupling(cfg)?;
    let dissipators = match &coupling {
        Coupling::Rwa { s } => vec![
            (Operator::from_matrix(s.clone())?, moments.m_lower),
            (Operator::from_matrix(s.adjoint())?, moments.m_raise),
        ],
        Coupling::Hermitian { s } => {
            debug_assert!(hermitian_deviation(s) < 1e-14);
            vec![(Operator::from_matrix(s.clone())?, moments.anticomm)]
        }
    };
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let gamma_eff = 2.0 * (f1 * f1 + f2 * f2) * moments.anticomm;
    let rate = cfg.target.frequency.max(gamma_eff);
    Ok(LindbladGenerator::new(h, dissipators)?.with_characteristic_rate(rate))
}

fn check_step(gen: &LindbladGenerator, dt: f64) -> Result<()> {
    let bound = gen.max_step();
    if !(dt > 0.0 && dt.is_finite()) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, bound });
    }
    Ok(())
}

pub(crate) fn sample_of(rho: &DensityMatrix, prev: Option<&DensityMatrix>) -> Sample {
    Sample {
        coherence: l1_coherence(rho),
        purity: rho.purity(),
        bloch: bloch_vector(rho).ok(),
        change: prev.map(|p| rho.trace_distance(p) * 2.0).unwrap_or(0.0),
    }
}

/// Fixed-step RK4 integration, recording every step.
pub fn evolve_me(rho0: &DensityMatrix, gen: &LindbladGenerator, t_end: f64, dt: f64) -> Result<Trajectory> {
    evolve_me_sampled(rho0, gen, t_end, dt, 1, 1)
}

/// Fixed-step RK4 integration over `round(t_end/dt)` steps. Observables are sampled
/// every `record_every` steps; full states every `state_every` samples.
pub fn evolve_me_sampled(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    t_end: f64,
    dt: f64,
    record_every: usize,
    state_every: usize,
) -> Result<Trajectory> {
    check_step(gen, dt)?;
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), found: rho0.dim() });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::config("t_end", "must be finite and >= 0"));
    }
    let record_every = record_every.max(1);
    let state_every = state_every.max(1);
    let n_steps = (t_end / dt).round() as usize;
    let lv = gen.liouvillian();
    let dims = rho0.dims().clone();
    let mut v = Liouvillian::vectorize(rho0.matrix());
    let mut work = lv.workspace();

    let mut traj = Trajectory::new(dt * record_every as f64, state_every, rho0.clone());
    traj.push(sample_of(rho0, None), Some(rho0.clone()));
    let mut last = rho0.clone();
    for step in 1..=n_steps {
        lv.rk4_step(&mut v, dt, &mut work);
        if step % record_every == 0 {
            let rho = Liouvillian::state_from(&v, dims.clone());
            let sample = sample_of(&rho, Some(&last));
            let keep = traj.len().is_multiple_of(state_every);
            traj.push(sample, keep.then(|| rho.clone()));
            last = rho;
        }
    }
    traj.set_final(Liouvillian::state_from(&v, dims));
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct SteadyStateMe {
    pub state: DensityMatrix,
    /// Frobenius norm of the generator applied to `state`.
    pub residual: f64,
    pub time: f64,
    pub converged: bool,
}

/// Integrates until `‖L(ρ)‖_F < tol` or `t_max` is reached.
pub fn steady_state_me(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    dt: f64,
    tol: f64,
    t_max: f64,
) -> Result<SteadyStateMe> {
    check_step(gen, dt)?;
    let lv = gen.liouvillian();
    let dims = rho0.dims().clone();
    let mut v = Liouvillian::vectorize(rho0.matrix());
    let mut work = lv.workspace();
    let mut deriv = vec![C64::new(0.0, 0.0); v.len()];
    let check_every = 100usize;
    let n_max = (t_max / dt).ceil() as usize;
    let mut step = 0usize;
    loop {
        lv.apply_into(&v, &mut deriv);
        let residual = deriv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if residual < tol || step >= n_max {
            return Ok(SteadyStateMe {
                state: Liouvillian::state_from(&v, dims),
                residual,
                time: step as f64 * dt,
                converged: residual < tol,
            });
        }
        for _ in 0..check_every {
            lv.rk4_step(&mut v, dt, &mut work);
        }
        step += check_every;
    }
}
