use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::bloch::{bloch_steady_rwa_from, bloch_steady, BlochRates};
use crate::error::{Error, Result};
use crate::model::{bath_moments, CouplingForm, ScenarioConfig, SystemKind};

fn require_qubit(cfg: &ScenarioConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.target.kind != SystemKind::Tls {
        return Err(Error::NotQubit);
    }
    Ok(())
}

/// Steady-state coherence of a qubit target. Zero for the counter-rotating
/// form, whose steady state is maximally mixed.
pub fn ssc_closed_form(cfg: &ScenarioConfig) -> Result<f64> {
    require_qubit(cfg)?;
    if cfg.interaction.form == CouplingForm::CounterRotating {
        return Ok(0.0);
    }
    let m = bath_moments(cfg)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let w = cfg.target.frequency;
    let a = m.anticomm;
    let g = 2.0 * f1 * f1 + 0.5 * f2 * f2;
    let r = m.comm * (w * w + a * a * g * g).sqrt();
    let s = a * a * g * (f1 * f1 + 0.5 * f2 * f2);
    Ok((f1 * f2).abs() * r / (s + w * w))
}

/// `|f1 f2| / (f1² + f2²/2)`: the large-cluster coherence at zero temperature.
pub fn c0(f1: f64, f2: f64) -> f64 {
    let den = f1 * f1 + 0.5 * f2 * f2;
    if den == 0.0 {
        0.0
    } else {
        (f1 * f2).abs() / den
    }
}

/// Large-cluster limit `C0·tanh(βω_B/2)` of the rotating-form coherence.
pub fn ssc_large_n(cfg: &ScenarioConfig) -> Result<f64> {
    require_qubit(cfg)?;
    if cfg.interaction.form == CouplingForm::CounterRotating {
        return Ok(0.0);
    }
    let th = cfg.beta()?.tanh_half(cfg.bath_unit.frequency);
    Ok(c0(cfg.interaction.f1, cfg.interaction.f2) * th)
}

/// Exact steady purity `(1 + |⟨σ⟩_ss|²)/2`.
pub fn purity_closed_form(cfg: &ScenarioConfig) -> Result<f64> {
    require_qubit(cfg)?;
    let r = BlochRates::from_config(cfg)?;
    let s = match r.form {
        CouplingForm::Rwa => bloch_steady_rwa_from(&r, cfg.interaction.f1, cfg.interaction.f2)?,
        CouplingForm::CounterRotating => bloch_steady(cfg)?,
    };
    Ok(s.purity())
}

/// Large-cluster purity `½ + (½ + f2²/(8f1²))·C0²·tanh²(βω_B/2)`.
pub fn purity_large_n(cfg: &ScenarioConfig) -> Result<f64> {
    require_qubit(cfg)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    if cfg.interaction.form == CouplingForm::CounterRotating {
        return Ok(0.5);
    }
    if f1 == 0.0 {
        return Err(Error::Unsupported("large-cluster purity needs f1 != 0".into()));
    }
    let th = cfg.beta()?.tanh_half(cfg.bath_unit.frequency);
    let c = c0(f1, f2) * th;
    Ok(0.5 + (0.5 + f2 * f2 / (8.0 * f1 * f1)) * c * c)
}

/// Large-cluster inversion `-tanh(βω_B/2)·[1 - f1 C0 / f2]`.
pub fn sz_large_n(cfg: &ScenarioConfig) -> Result<f64> {
    require_qubit(cfg)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    if cfg.interaction.form == CouplingForm::CounterRotating {
        return Ok(0.0);
    }
    if f2 == 0.0 {
        return Err(Error::Unsupported("large-cluster inversion needs f2 != 0".into()));
    }
    let th = cfg.beta()?.tanh_half(cfg.bath_unit.frequency);
    let c0_signed = f1 * f2 / (f1 * f1 + 0.5 * f2 * f2);
    Ok(-th * (1.0 - f1 * c0_signed / f2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscSteady {
    /// `⟨a⟩_ss`
    pub amplitude: C64,
    /// `⟨X_a⟩_ss = 2 Re⟨a⟩_ss`
    pub quadrature: f64,
    /// Whether the couplings are small against the oscillator frequency
    /// (`f1² + f2² ≤ 0.05 ω₀`), which the rotating-form result assumes.
    pub weak_coupling: bool,
}

/// Steady displacement of an oscillator target.
///
/// Counter-rotating form: `⟨a⟩ = -f1 f2 / (f1² + 2iω̃)` with `ω̃ = ω₀/⟨{A,A†}⟩`.
/// Rotating form: `⟨a⟩ = -f1 f2 ⟨b†b⟩ / (2iω₀ + f1²⟨{B,B†}⟩ + f2²)`.
pub fn osc_target_steady(cfg: &ScenarioConfig) -> Result<OscSteady> {
    cfg.validate()?;
    if cfg.target.kind != SystemKind::Lho {
        return Err(Error::Unsupported("oscillator steady displacement needs an oscillator target".into()));
    }
    let m = bath_moments(cfg)?;
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let w0 = cfg.target.frequency;
    let weak_coupling = f1 * f1 + f2 * f2 <= 0.05 * w0;
    let num = C64::new(-f1 * f2, 0.0);
    let amplitude = if f1 * f2 == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        match cfg.interaction.form {
            CouplingForm::CounterRotating => {
                let wt = w0 / m.anticomm;
                num / C64::new(f1 * f1, 2.0 * wt)
            }
            CouplingForm::Rwa => num * m.m_raise / C64::new(f1 * f1 * m.anticomm + f2 * f2, 2.0 * w0),
        }
    };
    Ok(OscSteady { amplitude, quadrature: 2.0 * amplitude.re, weak_coupling })
}
