//! Scenario description: target, bath units, cluster, interaction and collision
//! parameters, plus the operators and bath statistics derived from them.

mod moments;
mod observables;
mod operators;

pub use moments::{bath_moments, bath_moments_bruteforce, BathMoments};
pub use observables::{bloch_vector, l1_coherence, purity, BlochState};
pub use operators::{
    annihilation, build_free_hamiltonians, build_interaction, collective_lowering, embed,
    lindblad_coupling, number, quadrature, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z,
    unit_hamiltonian, unit_lowering, Coupling,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Beta, MAX_DENSE_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Tls,
    Lho,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMode {
    /// Explicit `N`-fold tensor product of bath units.
    ExactTensor,
    /// Only the collective second moments are used; no bath state is built.
    AnalyticMoment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingForm {
    #[serde(rename = "rwa")]
    Rwa,
    #[serde(rename = "c-r")]
    CounterRotating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(default = "default_kind")]
    pub kind: SystemKind,
    #[serde(default = "unit_frequency")]
    pub frequency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathUnitSpec {
    #[serde(default = "default_kind")]
    pub kind: SystemKind,
    #[serde(default = "unit_frequency")]
    pub frequency: f64,
    /// Fock cutoff for oscillator units. When absent, the default truncation rule
    /// is applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// `0` means the ground state (`β = ∞`).
    #[serde(default)]
    pub temperature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(default = "one")]
    pub n_units: usize,
    #[serde(default = "default_mode")]
    pub mode: ClusterMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    pub f1: f64,
    pub f2: f64,
    #[serde(default = "default_form")]
    pub form: CouplingForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionSpec {
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub bath_unit: BathUnitSpec,
    #[serde(default)]
    pub cluster: ClusterSpec,
    pub interaction: InteractionSpec,
    #[serde(default)]
    pub collision: CollisionSpec,
}

// Serialized defaults: ω = ω_B = 1, ground-state bath, one unit, exact tensor
// cluster, rotating form, τ = 0.051 and 5000 collisions.
fn default_kind() -> SystemKind {
    SystemKind::Tls
}
fn unit_frequency() -> f64 {
    1.0
}
fn one() -> usize {
    1
}
fn default_mode() -> ClusterMode {
    ClusterMode::ExactTensor
}
fn default_form() -> CouplingForm {
    CouplingForm::Rwa
}
fn default_tau() -> f64 {
    0.051
}
fn default_n_max() -> usize {
    5000
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::qubit(1.0)
    }
}

impl Default for BathUnitSpec {
    fn default() -> Self {
        BathUnitSpec::qubit(1.0, 0.0)
    }
}

impl Default for ClusterSpec {
    fn default() -> Self {
        ClusterSpec::exact(1)
    }
}

impl Default for CollisionSpec {
    fn default() -> Self {
        CollisionSpec { tau: default_tau(), n_max: default_n_max() }
    }
}

impl TargetSpec {
    pub fn qubit(frequency: f64) -> Self {
        TargetSpec { kind: SystemKind::Tls, frequency, truncation: None }
    }

    pub fn oscillator(frequency: f64, truncation: usize) -> Self {
        TargetSpec { kind: SystemKind::Lho, frequency, truncation: Some(truncation) }
    }

    pub fn dim(&self) -> Result<usize> {
        match self.kind {
            SystemKind::Tls => Ok(2),
            SystemKind::Lho => match self.truncation {
                Some(c) if c >= 2 => Ok(c),
                Some(c) => Err(Error::TruncationTooSmall { cutoff: c }),
                None => Err(Error::config("target.truncation", "required for an oscillator target")),
            },
        }
    }
}

impl BathUnitSpec {
    pub fn qubit(frequency: f64, temperature: f64) -> Self {
        BathUnitSpec { kind: SystemKind::Tls, frequency, truncation: None, temperature }
    }

    pub fn oscillator(frequency: f64, temperature: f64) -> Self {
        BathUnitSpec { kind: SystemKind::Lho, frequency, truncation: None, temperature }
    }

    pub fn with_truncation(mut self, cutoff: usize) -> Self {
        self.truncation = Some(cutoff);
        self
    }

    pub fn beta(&self) -> Result<Beta> {
        Beta::from_temperature(self.temperature)
    }

    /// Local dimension of one unit (applying the default truncation rule for
    /// oscillators without an explicit cutoff).
    pub fn dim(&self) -> Result<usize> {
        match self.kind {
            SystemKind::Tls => Ok(2),
            SystemKind::Lho => {
                let c = match self.truncation {
                    Some(c) => c,
                    None => truncation_rule(self.frequency, self.beta()?),
                };
                if c < 2 {
                    return Err(Error::TruncationTooSmall { cutoff: c });
                }
                Ok(c)
            }
        }
    }
}

impl ClusterSpec {
    pub fn exact(n_units: usize) -> Self {
        ClusterSpec { n_units, mode: ClusterMode::ExactTensor }
    }

    pub fn analytic(n_units: usize) -> Self {
        ClusterSpec { n_units, mode: ClusterMode::AnalyticMoment }
    }
}

/// Default Fock cutoff for a thermal oscillator: at least 8 levels, at least twelve
/// times the mean occupation plus one, and enough levels that the discarded
/// Boltzmann weight `e^{-βωc}` is below `1e-10`.
pub fn truncation_rule(frequency: f64, beta: Beta) -> usize {
    let occ = 12.0 * (beta.bose(frequency) + 1.0);
    let tail = match beta {
        Beta::Infinite => 0.0,
        Beta::Finite(b) => (10.0 * std::f64::consts::LN_10) / (b * frequency),
    };
    let c = occ.ceil().max(tail.floor() + 1.0).max(8.0);
    if c.is_finite() && c < (MAX_DENSE_DIM as f64) {
        c as usize
    } else {
        MAX_DENSE_DIM
    }
}

/// Boltzmann weight discarded by truncating a thermal oscillator at `cutoff` levels.
pub fn thermal_tail(frequency: f64, beta: Beta, cutoff: usize) -> f64 {
    match beta {
        Beta::Infinite => 0.0,
        Beta::Finite(b) => (-b * frequency * cutoff as f64).exp(),
    }
}

impl ScenarioConfig {
    /// Qubit target at frequency `omega` with an `n_units` cluster of the given
    /// bath units. Collision defaults: `τ = 0.051`, 5000 collisions.
    pub fn qubit(omega: f64, bath: BathUnitSpec, n_units: usize, f1: f64, f2: f64, form: CouplingForm) -> Self {
        ScenarioConfig {
            target: TargetSpec::qubit(omega),
            bath_unit: bath,
            cluster: ClusterSpec::exact(n_units),
            interaction: InteractionSpec { f1, f2, form },
            collision: CollisionSpec::default(),
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.collision.tau = tau;
        self
    }

    pub fn with_collisions(mut self, n_max: usize) -> Self {
        self.collision.n_max = n_max;
        self
    }

    pub fn with_mode(mut self, mode: ClusterMode) -> Self {
        self.cluster.mode = mode;
        self
    }

    pub fn with_units(mut self, n_units: usize) -> Self {
        self.cluster.n_units = n_units;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.bath_unit.temperature = temperature;
        self
    }

    pub fn with_couplings(mut self, f1: f64, f2: f64) -> Self {
        self.interaction.f1 = f1;
        self.interaction.f2 = f2;
        self
    }

    pub fn with_form(mut self, form: CouplingForm) -> Self {
        self.interaction.form = form;
        self
    }

    pub fn with_target(mut self, target: TargetSpec) -> Self {
        self.target = target;
        self
    }

    pub fn beta(&self) -> Result<Beta> {
        self.bath_unit.beta()
    }

    pub fn is_qubit_target(&self) -> bool {
        self.target.kind == SystemKind::Tls
    }

    /// Dimension of the full `N`-unit cluster, if it fits in a `usize`.
    pub fn cluster_dim(&self) -> Result<usize> {
        let unit = self.bath_unit.dim()?;
        let n = u32::try_from(self.cluster.n_units).map_err(|_| Error::DimensionOverflow {
            dim: usize::MAX,
            limit: MAX_DENSE_DIM,
        })?;
        unit.checked_pow(n)
            .ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: MAX_DENSE_DIM })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| -> Result<()> {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("must be finite and > 0, got {v}")));
            }
            Ok(())
        };
        positive("target.frequency", self.target.frequency)?;
        positive("bath_unit.frequency", self.bath_unit.frequency)?;
        positive("collision.tau", self.collision.tau)?;
        if !(self.bath_unit.temperature.is_finite() && self.bath_unit.temperature >= 0.0) {
            return Err(Error::config(
                "bath_unit.temperature",
                format!("must be finite and >= 0, got {}", self.bath_unit.temperature),
            ));
        }
        for (field, v) in [("interaction.f1", self.interaction.f1), ("interaction.f2", self.interaction.f2)] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }
        if self.cluster.n_units == 0 {
            return Err(Error::config("cluster.n_units", "must be >= 1"));
        }
        if self.target.kind == SystemKind::Tls && self.target.truncation.is_some() {
            return Err(Error::config("target.truncation", "only meaningful for an oscillator target"));
        }
        if self.bath_unit.kind == SystemKind::Tls && self.bath_unit.truncation.is_some() {
            return Err(Error::config("bath_unit.truncation", "only meaningful for oscillator units"));
        }
        self.target.dim()?;
        self.bath_unit.dim()?;
        if self.target.kind == SystemKind::Lho
            && self.bath_unit.kind == SystemKind::Tls
            && self.interaction.form == CouplingForm::Rwa
        {
            return Err(Error::Unsupported(
                "oscillator target with two-level bath units is only defined for the counter-rotating coupling".into(),
            ));
        }
        if self.cluster.mode == ClusterMode::ExactTensor {
            let dim = self.cluster_dim()?;
            if dim > MAX_DENSE_DIM {
                return Err(Error::DimensionOverflow { dim, limit: MAX_DENSE_DIM });
            }
        }
        Ok(())
    }
}
