use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{bath_moments, BlochState, CouplingForm, ScenarioConfig, SystemKind};

/// Rates of the linear Bloch system `d⟨σ⟩/dt = B⟨σ⟩ + c` for a qubit target.
///
/// - rotating form: transverse decay Γ, longitudinal decay γ, coupling Ω, drive (c_x, c_z)
/// - counter-rotating form: dephasing γ_φ, longitudinal decay γ, coupling Ω, no drive
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochRates {
    pub form: CouplingForm,
    pub omega: f64,
    pub transverse: f64,
    pub longitudinal: f64,
    pub dephasing: f64,
    pub coupling: f64,
    pub c_x: f64,
    pub c_z: f64,
}

impl BlochRates {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.target.kind != SystemKind::Tls {
            return Err(Error::NotQubit);
        }
        let m = bath_moments(cfg)?;
        let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
        let a = m.anticomm;
        let omega = cfg.target.frequency;
        Ok(match cfg.interaction.form {
            CouplingForm::Rwa => BlochRates {
                form: CouplingForm::Rwa,
                omega,
                transverse: (2.0 * f1 * f1 + 0.5 * f2 * f2) * a,
                longitudinal: f2 * f2 * a,
                dephasing: 0.0,
                coupling: f1 * f2 * a,
                c_x: 2.0 * f1 * f2 * m.comm,
                c_z: f2 * f2 * m.comm,
            },
            CouplingForm::CounterRotating => BlochRates {
                form: CouplingForm::CounterRotating,
                omega,
                transverse: 0.0,
                longitudinal: 2.0 * f2 * f2 * a,
                dephasing: 2.0 * f1 * f1 * a,
                coupling: 2.0 * f1 * f2 * a,
                c_x: 0.0,
                c_z: 0.0,
            },
        })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let (w, om) = (self.omega, self.coupling);
        match self.form {
            CouplingForm::Rwa => {
                let (gt, gl) = (self.transverse, self.longitudinal);
                Matrix3::new(-gt, -w, om, w, -gt, 0.0, om, 0.0, -gl)
            }
            CouplingForm::CounterRotating => {
                let (gp, gl) = (self.dephasing, self.longitudinal);
                Matrix3::new(-gp, -w, om, w, -(gp + gl), 0.0, om, 0.0, -gl)
            }
        }
    }

    pub fn drive(&self) -> Vector3<f64> {
        Vector3::new(self.c_x, 0.0, -self.c_z)
    }
}

pub fn bloch_system(cfg: &ScenarioConfig) -> Result<(Matrix3<f64>, Vector3<f64>)> {
    let r = BlochRates::from_config(cfg)?;
    Ok((r.matrix(), r.drive()))
}

/// Fixed point `-B⁻¹c`.
pub fn bloch_steady_linear(b: &Matrix3<f64>, c: &Vector3<f64>) -> Result<BlochState> {
    let det = b.determinant();
    let scale = b.abs().max().powi(3).max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-14 * scale || !det.is_finite() {
        return Err(Error::SingularBlochMatrix { det });
    }
    let sol = b.lu().solve(&(-c)).ok_or(Error::SingularBlochMatrix { det })?;
    Ok(BlochState::new(sol[0], sol[1], sol[2]))
}

/// Steady state of the configured Bloch system, for either coupling form.
pub fn bloch_steady(cfg: &ScenarioConfig) -> Result<BlochState> {
    let (b, c) = bloch_system(cfg)?;
    bloch_steady_linear(&b, &c)
}

/// Explicit steady state of the rotating-form system.
pub fn bloch_steady_rwa(cfg: &ScenarioConfig) -> Result<BlochState> {
    let r = BlochRates::from_config(cfg)?;
    if r.form != CouplingForm::Rwa {
        return Err(Error::Unsupported("explicit steady state is for the rotating form".into()));
    }
    bloch_steady_rwa_from(&r, cfg.interaction.f1, cfg.interaction.f2)
}

/// Explicit rotating-form steady state from a (possibly hand-modified) set of rates.
pub fn bloch_steady_rwa_from(r: &BlochRates, f1: f64, f2: f64) -> Result<BlochState> {
    let (gt, gl, w) = (r.transverse, r.longitudinal, r.omega);
    if gt == 0.0 || gl == 0.0 {
        return Err(Error::SingularBlochMatrix { det: r.matrix().determinant() });
    }
    let ratio = f1 / f2;
    let denom = gt * gt + w * w - ratio * ratio * gl * gt;
    if denom == 0.0 {
        return Err(Error::SingularBlochMatrix { det: r.matrix().determinant() });
    }
    // c_x/2 = f1 f2 ⟨[A,A†]⟩
    let x = 0.5 * r.c_x * gt / denom;
    let y = w / gt * x;
    let z = r.coupling / gl * x - r.c_z / gl;
    Ok(BlochState::new(x, y, z))
}
