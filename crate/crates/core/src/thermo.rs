//! Energy bookkeeping for the target.
//!
//! All currents are evaluated over `ρ ⊗ ρ_B` with a fresh thermal cluster:
//!
//! ```text
//! Q̇     =  ½⟨[V,[V,H_B]]⟩
//! Ẇ     = -½⟨[V,[V,H_S + H_B]]⟩
//! dE/dt = -½⟨[V,[V,H_S]]⟩
//! ```
//!
//! Heat and work are positive when injected into the target.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::collision::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{thermal_diagonal, trace_product, CMatrix, DensityMatrix};
use crate::mastereq::ssc_closed_form;
use crate::model::{build_free_hamiltonians, build_interaction, CouplingForm, ScenarioConfig, SystemKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoRecord {
    pub t: f64,
    pub q_dot: f64,
    pub w_dot: f64,
    pub de_dt: f64,
}

impl ThermoRecord {
    pub fn first_law_residual(&self) -> f64 {
        (self.de_dt - self.q_dot - self.w_dot).abs()
    }
}

/// Double commutators reduced onto the target: `tr ρ K` equals the joint
/// expectation over `ρ ⊗ ρ_B`.
#[derive(Clone, Debug)]
pub struct ThermoProbe {
    heat: CMatrix,
    work: CMatrix,
    energy: CMatrix,
}

fn double_commutator(v: &CMatrix, h: &CMatrix) -> CMatrix {
    let inner = v * h - h * v;
    v * &inner - inner * v
}

impl ThermoProbe {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let (hs, hb) = build_free_hamiltonians(cfg)?;
        let v = build_interaction(cfg)?;
        let ds = hs.dim();
        let db = hb.dim();
        let hs_joint = hs.matrix().kronecker(&CMatrix::identity(db, db));
        let hb_joint = CMatrix::identity(ds, ds).kronecker(hb.matrix());
        let energies: Vec<f64> = (0..db).map(|k| hb.matrix()[(k, k)].re).collect();
        let p = thermal_diagonal(&energies, cfg.beta()?);

        let reduce = |k: &CMatrix| -> CMatrix {
            CMatrix::from_fn(ds, ds, |a, b| {
                p.iter()
                    .enumerate()
                    .filter(|(_, &pk)| pk != 0.0)
                    .map(|(kk, &pk)| k[(a * db + kk, b * db + kk)] * pk)
                    .sum::<C64>()
            })
        };
        let v = v.matrix();
        let ks = double_commutator(v, &hs_joint);
        let kb = double_commutator(v, &hb_joint);
        let half = C64::new(0.5, 0.0);
        let heat = reduce(&kb) * half;
        let energy = reduce(&ks) * (-half);
        let work = -(&heat) + &energy;
        Ok(ThermoProbe { heat, work, energy })
    }

    pub fn record(&self, rho: &DensityMatrix, t: f64) -> Result<ThermoRecord> {
        if rho.dim() != self.heat.nrows() {
            return Err(Error::DimensionMismatch { expected: self.heat.nrows(), found: rho.dim() });
        }
        let m = rho.matrix();
        Ok(ThermoRecord {
            t,
            q_dot: trace_product(&self.heat, m).re,
            w_dot: trace_product(&self.work, m).re,
            de_dt: trace_product(&self.energy, m).re,
        })
    }
}

/// Currents by explicit operator algebra on the joint space.
pub fn currents_generic(rho: &DensityMatrix, cfg: &ScenarioConfig) -> Result<ThermoRecord> {
    ThermoProbe::new(cfg)?.record(rho, 0.0)
}

struct QubitMoments {
    excited: f64,
    sx: f64,
}

fn qubit_moments(rho: &DensityMatrix) -> Result<QubitMoments> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit);
    }
    let m = rho.matrix();
    Ok(QubitMoments { excited: m[(0, 0)].re, sx: 2.0 * m[(0, 1)].re })
}

fn require_single_unit_rwa(cfg: &ScenarioConfig, bath: SystemKind) -> Result<()> {
    cfg.validate()?;
    if cfg.target.kind != SystemKind::Tls {
        return Err(Error::NotQubit);
    }
    if cfg.bath_unit.kind != bath {
        return Err(Error::Unsupported(format!("these closed forms are for {bath:?} bath units")));
    }
    if cfg.interaction.form != CouplingForm::Rwa {
        return Err(Error::Unsupported("these closed forms are for the rotating coupling form".into()));
    }
    if cfg.cluster.n_units != 1 {
        return Err(Error::Unsupported("closed-form currents are written for a single bath unit; use currents_generic".into()));
    }
    Ok(())
}

/// Closed-form currents for a qubit coupled to single two-level bath units.
pub fn currents_tls(rho: &DensityMatrix, cfg: &ScenarioConfig) -> Result<ThermoRecord> {
    require_single_unit_rwa(cfg, SystemKind::Tls)?;
    let q = qubit_moments(rho)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let (w, wb) = (cfg.target.frequency, cfg.bath_unit.frequency);
    let nf = cfg.beta()?.fermi(wb);
    let pop = nf - q.excited;
    Ok(ThermoRecord {
        t: 0.0,
        q_dot: f2 * f2 * wb * pop + f1 * f2 * wb * q.sx + f1 * f1 * wb * (2.0 * nf - 1.0),
        w_dot: (w - wb) * f2 * f2 * pop + (w - 2.0 * wb) * f1 * f2 * q.sx / 2.0 - f1 * f1 * wb * (2.0 * nf - 1.0),
        de_dt: f2 * f2 * w * pop + 0.5 * f1 * f2 * w * q.sx,
    })
}

/// Closed-form currents for a qubit coupled to single oscillator bath units.
pub fn currents_lho(rho: &DensityMatrix, cfg: &ScenarioConfig) -> Result<ThermoRecord> {
    require_single_unit_rwa(cfg, SystemKind::Lho)?;
    let q = qubit_moments(rho)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let (w, wb) = (cfg.target.frequency, cfg.bath_unit.frequency);
    let nt = cfg.beta()?.bose(wb);
    let g = 2.0 * nt + 1.0;
    let pop = nt - g * q.excited;
    Ok(ThermoRecord {
        t: 0.0,
        q_dot: f2 * f2 * wb * pop + f1 * f2 * wb * g * q.sx - f1 * f1 * wb,
        w_dot: (w - wb) * f2 * f2 * pop + (w - 2.0 * wb) * f1 * f2 * g * q.sx / 2.0 + f1 * f1 * wb,
        de_dt: f2 * f2 * w * pop + 0.5 * f1 * f2 * w * g * q.sx,
    })
}

/// Steady power input at resonance for a single two-level bath unit.
///
/// Rotating form: proportional to the steady coherence,
/// `Ẇ = |f1|ω(2ω² + 4f1⁴ + f1²f2²) / (|f2|√(4ω² + (4f1² + f2²)²)) · C_ss`.
/// Counter-rotating form: `Ẇ = ω(f1² + f2²) tanh(βω/2)`.
pub fn wdot_ss_relation(cfg: &ScenarioConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.target.kind != SystemKind::Tls {
        return Err(Error::NotQubit);
    }
    if cfg.bath_unit.kind != SystemKind::Tls {
        return Err(Error::Unsupported("power-coherence relation is for two-level bath units".into()));
    }
    if cfg.cluster.n_units != 1 {
        return Err(Error::Unsupported("power-coherence relation is for a single bath unit".into()));
    }
    let (w, wb) = (cfg.target.frequency, cfg.bath_unit.frequency);
    if (w - wb).abs() > 1e-12 * w {
        return Err(Error::Unsupported(format!("power-coherence relation needs resonance, got ω = {w}, ω_B = {wb}")));
    }
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    match cfg.interaction.form {
        CouplingForm::CounterRotating => Ok(w * (f1 * f1 + f2 * f2) * cfg.beta()?.tanh_half(w)),
        CouplingForm::Rwa => {
            let c = ssc_closed_form(cfg)?;
            if c == 0.0 {
                return Ok(0.0);
            }
            let num = f1.abs() * w * (2.0 * w * w + 4.0 * f1.powi(4) + f1 * f1 * f2 * f2);
            let s = 4.0 * f1 * f1 + f2 * f2;
            let den = f2.abs() * (4.0 * w * w + s * s).sqrt();
            Ok(num / den * c)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEnergetics {
    pub t: f64,
    /// `Ẇτ`
    pub work: f64,
    /// `Q̇τ`
    pub heat: f64,
}

/// Work and heat per collision for every stored state of a trajectory.
pub fn per_collision_energetics(traj: &Trajectory, cfg: &ScenarioConfig) -> Result<Vec<CollisionEnergetics>> {
    let probe = ThermoProbe::new(cfg)?;
    let tau = cfg.collision.tau;
    let mut out = Vec::new();
    for k in 0..traj.len() {
        if let Some(rho) = traj.state_at(k) {
            let r = probe.record(rho, traj.time(k))?;
            out.push(CollisionEnergetics { t: r.t, work: r.w_dot * tau, heat: r.q_dot * tau });
        }
    }
    Ok(out)
}
