//! Transient coherence: how much coherence the target shows at its best moment
//! on the way to the steady state, in closed form and by direct integration.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::mastereq::{evolve_me, make_generator, ssc_closed_form, BlochRates, Liouvillian};
use crate::model::{l1_coherence, BlochState, CouplingForm, ScenarioConfig, SystemKind};

/// Closed forms are trusted for `|f1|, |f2| ≤ 0.2ω`, `N ≤ 3` and `|z0| ≥ 0.5`.
pub const WINDOW_MAX_COUPLING: f64 = 0.2;
pub const WINDOW_MAX_UNITS: usize = 3;
pub const WINDOW_MIN_INVERSION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransientOptimum {
    pub c_bar: f64,
    pub p_bar: f64,
    pub t_max: f64,
    pub method: Method,
    /// Closed form: parameters inside the validity window.
    /// Numeric: an interior local maximum was found.
    pub reliable: bool,
}

/// Initial inversion of a qubit thermalised at temperature `t`: `-tanh(ω/2T)`.
pub fn thermal_inversion(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        -1.0
    } else {
        -(omega / (2.0 * t)).tanh()
    }
}

/// Diagonal qubit state with inversion `z0`.
pub fn inverted_qubit(z0: f64) -> Result<DensityMatrix> {
    BlochState::new(0.0, 0.0, z0).to_density()
}

fn in_window(cfg: &ScenarioConfig, z0: f64) -> bool {
    let w = cfg.target.frequency;
    cfg.interaction.f1.abs() <= WINDOW_MAX_COUPLING * w
        && cfg.interaction.f2.abs() <= WINDOW_MAX_COUPLING * w
        && cfg.cluster.n_units <= WINDOW_MAX_UNITS
        && z0.abs() >= WINDOW_MIN_INVERSION
        && z0.abs() <= 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxVariant {
    /// Laplace-transform solution with separate exponents and shifted frequencies.
    Raw,
    /// Common exponent `(γ + γ_φ)/2` and bare frequency `ω`.
    Simplified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxBloch {
    pub state: BlochState,
    pub reliable: bool,
}

/// Weak-damping approximation to the counter-rotating Bloch dynamics starting
/// from `(0, 0, z0)`.
pub fn approx_bloch_cr(cfg: &ScenarioConfig, z0: f64, t: f64, variant: ApproxVariant) -> Result<ApproxBloch> {
    if cfg.interaction.form != CouplingForm::CounterRotating {
        return Err(Error::Unsupported("approximate transient solution is for the counter-rotating form".into()));
    }
    let r = BlochRates::from_config(cfg)?;
    let (w, om, gp, gl) = (r.omega, r.coupling, r.dephasing, r.longitudinal);
    let mut reliable = in_window(cfg, z0);
    let state = match variant {
        ApproxVariant::Simplified => {
            let decay = (-0.5 * (gl + gp) * t).exp();
            let (s, c) = (w * t).sin_cos();
            BlochState::new(z0 * om * decay * s / w, z0 * om * decay * (1.0 - c) / w, z0 * decay)
        }
        ApproxVariant::Raw => {
            let w1_sq = w * w - om * om - 0.25 * gp * gp;
            let w2_sq = w * w - om * om;
            if w1_sq <= 0.0 || w2_sq <= 0.0 {
                reliable = false;
            }
            // sin(W t)/W and (1 - cos(W t))/W² stay finite through W → 0 via their
            // hyperbolic continuations.
            let sinc = |wsq: f64| -> f64 {
                if wsq > 0.0 {
                    let k = wsq.sqrt();
                    (k * t).sin() / k
                } else if wsq < 0.0 {
                    let k = (-wsq).sqrt();
                    (k * t).sinh() / k
                } else {
                    t
                }
            };
            let versin = |wsq: f64| -> f64 {
                if wsq > 0.0 {
                    let k = wsq.sqrt();
                    (1.0 - (k * t).cos()) / wsq
                } else if wsq < 0.0 {
                    let k = (-wsq).sqrt();
                    ((k * t).cosh() - 1.0) / (-wsq)
                } else {
                    0.5 * t * t
                }
            };
            let x = z0 * om * (-1.5 * gp * t).exp() * sinc(w1_sq);
            let y = z0 * om * w * (-2.0 * gp * t).exp() * versin(w2_sq);
            let z = om / w * y + z0 * (-2.0 * gp * t).exp();
            BlochState::new(x, y, z)
        }
    };
    Ok(ApproxBloch { state, reliable })
}

/// Time-optimised coherence and the purity at the same instant, `t_max = π/ω`.
/// The bath-unit kind selects between the two-level and oscillator families.
pub fn tsc_closed_form(cfg: &ScenarioConfig, z0: f64) -> Result<TransientOptimum> {
    cfg.validate()?;
    if cfg.target.kind != SystemKind::Tls {
        return Err(Error::NotQubit);
    }
    let (f1, f2) = (cfg.interaction.f1, cfg.interaction.f2);
    let w = cfg.target.frequency;
    let n = cfg.cluster.n_units as f64;
    let az = z0.abs();
    let (prefactor, rate) = match cfg.interaction.form {
        CouplingForm::Rwa => (2.0, f1 * f1 + 0.25 * f2 * f2),
        CouplingForm::CounterRotating => (4.0, f1 * f1 + f2 * f2),
    };
    let (c_bar, purity_decay) = match cfg.bath_unit.kind {
        SystemKind::Tls => {
            let c = prefactor * (f1 * f2).abs() * n * az * (-PI * n * rate / w).exp() / w;
            (c, (-2.0 * PI * n * (f1 * f1 + f2 * f2) / w).exp())
        }
        SystemKind::Lho => {
            if az == 0.0 {
                (0.0, 0.0)
            } else {
                let c = prefactor * (f1 * f2).abs() * n * (-PI * n * rate / (az * w)).exp() / w;
                (c, (-2.0 * PI * n * (f1 * f1 + f2 * f2) / (az * w)).exp())
            }
        }
    };
    let p_bar = match cfg.interaction.form {
        CouplingForm::Rwa => 0.5 * (1.0 + z0 * z0),
        CouplingForm::CounterRotating => 0.5 * (1.0 + z0 * z0 * purity_decay),
    };
    Ok(TransientOptimum { c_bar, p_bar, t_max: PI / w, method: Method::ClosedForm, reliable: in_window(cfg, z0) })
}

/// Cubic Lagrange interpolant through four equally spaced points starting at `t0`.
fn cubic(t0: f64, h: f64, y: [f64; 4]) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let s = (t - t0) / h;
        let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// First local maximum of the coherence along the exact generator's dynamics.
///
/// The fixed RK4 grid is scanned for the first interior maximum, which is then
/// refined by golden-section search on a local cubic interpolant. The state at
/// the refined instant is reached with a partial RK4 step from the preceding grid
/// point. Without an interior maximum the largest grid value is returned and the
/// result is flagged unreliable.
pub fn tsc_numeric(cfg: &ScenarioConfig, rho0: &DensityMatrix, t_end: f64) -> Result<TransientOptimum> {
    let gen = make_generator(cfg)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::config("t_end", "must be finite and > 0"));
    }
    let n = (t_end / gen.max_step()).ceil().max(4.0) as usize;
    let dt = t_end / n as f64;
    let traj = evolve_me(rho0, &gen, t_end, dt)?;
    let c = traj.coherences();
    let len = c.len();

    let interior = (1..len - 1).find(|&k| c[k] > c[k - 1] && c[k] >= c[k + 1]);
    let Some(k) = interior else {
        let mut best = 0;
        for (j, &v) in c.iter().enumerate() {
            if v > c[best] {
                best = j;
            }
        }
        let rho = traj.state_at(best).expect("every state is stored");
        return Ok(TransientOptimum {
            c_bar: c[best],
            p_bar: rho.purity(),
            t_max: traj.time(best),
            method: Method::Numeric,
            reliable: false,
        });
    };

    let start = if k + 2 < len { k - 1 } else { k - 2 };
    let y = [c[start], c[start + 1], c[start + 2], c[start + 3]];
    let interp = cubic(traj.time(start), dt, y);
    let t_star = golden_max(&interp, traj.time(k - 1), traj.time(k + 1));

    let j = ((t_star / dt).floor() as usize).min(len - 1);
    let h = t_star - traj.time(j);
    let base = traj.state_at(j).expect("every state is stored");
    let lv = gen.liouvillian();
    let mut v = Liouvillian::vectorize(base.matrix());
    if h > 0.0 {
        let mut work = lv.workspace();
        lv.rk4_step(&mut v, h, &mut work);
    }
    let rho = DensityMatrix::from_matrix(Liouvillian::unvectorize(&v, base.dim()))
        .unwrap_or_else(|_| base.clone());
    Ok(TransientOptimum {
        c_bar: l1_coherence(&rho),
        p_bar: rho.purity(),
        t_max: t_star,
        method: Method::Numeric,
        reliable: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TscSscRow {
    pub temperature: f64,
    pub z0: f64,
    pub c_ts: f64,
    pub c_ts_numeric: Option<f64>,
    pub c_ss: f64,
    /// `c_ts / c_ss`; infinite when the steady coherence vanishes.
    pub ratio: f64,
}

/// Transient-versus-steady comparison across bath temperatures, with the target
/// initially thermal at the bath temperature.
pub fn tsc_vs_ssc_report(cfg: &ScenarioConfig, temperatures: &[f64], numeric: bool) -> Result<Vec<TscSscRow>> {
    temperatures
        .iter()
        .map(|&temp| {
            let c = cfg.clone().with_temperature(temp);
            let z0 = thermal_inversion(c.target.frequency, temp);
            let ts = tsc_closed_form(&c, z0)?;
            let c_ss = ssc_closed_form(&c)?;
            let c_ts_numeric = if numeric {
                let t_end = 3.0 * PI / c.target.frequency;
                Some(tsc_numeric(&c, &inverted_qubit(z0)?, t_end)?.c_bar)
            } else {
                None
            };
            let ratio = if c_ss > 0.0 { ts.c_bar / c_ss } else { f64::INFINITY };
            Ok(TscSscRow { temperature: temp, z0, c_ts: ts.c_bar, c_ts_numeric, c_ss, ratio })
        })
        .collect()
}
