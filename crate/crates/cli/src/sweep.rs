//! Parameter sweeps producing one [`ResultRow`] per point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use repcoh::collision::{detect_steady, run_collisions_strided};
use repcoh::linalg::{DensityMatrix, HilbertDims};
use repcoh::mastereq::{bloch_steady, make_generator, ssc_closed_form, steady_state_me};
use repcoh::model::{l1_coherence, ClusterMode, ScenarioConfig, SystemKind};
use repcoh::thermo::currents_generic;
use repcoh::transient::{thermal_inversion, tsc_closed_form};

use crate::config::{scenario_error, RunConfig};
use crate::error::{CliError, CliResult};
use crate::table::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Temperature,
    ClusterSize,
    F1,
    F2,
    Tau,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Temperature => "temperature",
            SweepParam::ClusterSize => "cluster_size",
            SweepParam::F1 => "f1",
            SweepParam::F2 => "f2",
            SweepParam::Tau => "tau",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "temperature" => SweepParam::Temperature,
            "cluster_size" => SweepParam::ClusterSize,
            "f1" => SweepParam::F1,
            "f2" => SweepParam::F2,
            "tau" => SweepParam::Tau,
            other => {
                return Err(CliError::invalid(
                    "sweep.parameter",
                    format!("unknown parameter `{other}` (expected temperature, cluster_size, f1, f2 or tau)"),
                ))
            }
        })
    }
}

/// A swept parameter with either an inclusive linear range or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl SweepSpec {
    pub fn range(parameter: SweepParam, from: f64, to: f64, points: usize) -> Self {
        SweepSpec { parameter, from: Some(from), to: Some(to), points: Some(points), values: None, output: None }
    }

    pub fn list(parameter: SweepParam, values: Vec<f64>) -> Self {
        SweepSpec { parameter, from: None, to: None, points: None, values: Some(values), output: None }
    }

    /// `name=from:to:points` or `name=v1,v2,...`.
    pub fn parse_arg(arg: &str) -> CliResult<Self> {
        let (name, spec) = arg
            .split_once('=')
            .ok_or_else(|| CliError::invalid("--sweep", format!("expected name=from:to:points, got `{arg}`")))?;
        let parameter = SweepParam::parse(name.trim())?;
        let num = |field: &str, s: &str| -> CliResult<f64> {
            s.trim().parse::<f64>().map_err(|_| CliError::invalid(format!("--sweep.{field}"), format!("not a number: `{s}`")))
        };
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            [from, to, points] => {
                let points = points
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::invalid("--sweep.points", format!("not a count: `{points}`")))?;
                Ok(SweepSpec::range(parameter, num("from", from)?, num("to", to)?, points))
            }
            [list] => {
                let values = list.split(',').map(|v| num("values", v)).collect::<CliResult<Vec<_>>>()?;
                Ok(SweepSpec::list(parameter, values))
            }
            _ => Err(CliError::invalid("--sweep", format!("expected name=from:to:points, got `{arg}`"))),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        let (from, to, n) = (self.from.unwrap_or(0.0), self.to.unwrap_or(0.0), self.points.unwrap_or(0));
        if n == 1 {
            return vec![from];
        }
        (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect()
    }

    pub fn validate(&self, base: &ScenarioConfig) -> CliResult<()> {
        match (&self.values, self.from, self.to, self.points) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    return Err(CliError::invalid("values", "must list at least one value"));
                }
            }
            (None, Some(from), Some(to), Some(points)) => {
                if points == 0 {
                    return Err(CliError::invalid("points", "must be >= 1"));
                }
                if !(from.is_finite() && to.is_finite()) || from > to {
                    return Err(CliError::invalid("from", format!("need finite from <= to, got {from} > {to}")));
                }
            }
            _ => return Err(CliError::invalid("values", "give either `values` or all of `from`, `to`, `points`")),
        }
        for v in self.values() {
            apply(base, self.parameter, v)?.validate().map_err(scenario_error)?;
        }
        Ok(())
    }
}

/// Scenario with one parameter replaced.
pub fn apply(base: &ScenarioConfig, param: SweepParam, value: f64) -> CliResult<ScenarioConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Temperature => cfg.bath_unit.temperature = value,
        SweepParam::F1 => cfg.interaction.f1 = value,
        SweepParam::F2 => cfg.interaction.f2 = value,
        SweepParam::Tau => cfg.collision.tau = value,
        SweepParam::ClusterSize => {
            if !(value >= 1.0 && value.fract() == 0.0 && value < 1e6) {
                return Err(CliError::invalid("cluster_size", format!("must be a positive integer, got {value}")));
            }
            cfg.cluster.n_units = value as usize;
        }
    }
    Ok(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Simulated column from the exact collision map.
    Collision,
    /// Simulated column from the coarse-grained master equation.
    Me,
    /// Closed forms only.
    Analytic,
    /// Collisions where the cluster can be built exactly, master equation otherwise.
    All,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Collision => "collision",
            Mode::Me => "me",
            Mode::Analytic => "analytic",
            Mode::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub value: f64,
    pub c_ss_analytic: Option<f64>,
    pub c_ss_sim: Option<f64>,
    pub p_ss: Option<f64>,
    pub sz_ss: Option<f64>,
    pub c_ts_bar: Option<f64>,
    pub p_ts_bar: Option<f64>,
    pub t_max: Option<f64>,
    pub wdot_ss: Option<f64>,
    pub qdot_ss: Option<f64>,
    pub flags: Vec<String>,
}

pub const COLUMNS: [&str; 12] = [
    "scenario", "value", "C_ss_analytic", "C_ss_sim", "P_ss", "sz_ss", "C_TS_bar", "P_TS_bar", "t_max", "Wdot_ss",
    "Qdot_ss", "flags",
];

impl ResultRow {
    fn empty(scenario: &str, value: f64) -> Self {
        ResultRow {
            scenario: scenario.to_string(),
            value,
            c_ss_analytic: None,
            c_ss_sim: None,
            p_ss: None,
            sz_ss: None,
            c_ts_bar: None,
            p_ts_bar: None,
            t_max: None,
            wdot_ss: None,
            qdot_ss: None,
            flags: Vec::new(),
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let flags = if self.flags.is_empty() { "ok".to_string() } else { self.flags.join(";") };
        vec![
            Cell::from(self.scenario.as_str()),
            Cell::from(self.value),
            self.c_ss_analytic.into(),
            self.c_ss_sim.into(),
            self.p_ss.into(),
            self.sz_ss.into(),
            self.c_ts_bar.into(),
            self.p_ts_bar.into(),
            self.t_max.into(),
            self.wdot_ss.into(),
            self.qdot_ss.into(),
            Cell::Text(flags),
        ]
    }
}

fn short(e: &repcoh::Error) -> &'static str {
    use repcoh::Error::*;
    match e {
        SingularBlochMatrix { .. } => "singular-bloch",
        DimensionOverflow { .. } => "dimension-overflow",
        AnalyticModeRejected => "analytic-mode",
        Unsupported(_) => "unsupported",
        NotQubit => "not-qubit",
        _ => "error",
    }
}

fn ground_state(cfg: &ScenarioConfig) -> repcoh::Result<DensityMatrix> {
    let d = cfg.target.dim()?;
    let k = if cfg.target.kind == SystemKind::Tls { 1 } else { 0 };
    DensityMatrix::basis(HilbertDims::single(d)?, k)
}

/// Steady state of the simulated route, or a flag explaining why there is none.
fn simulate(cfg: &ScenarioConfig, mode: Mode, flags: &mut Vec<String>) -> Option<DensityMatrix> {
    let rho0 = ground_state(cfg).ok()?;
    let use_collisions = match mode {
        Mode::Analytic => return None,
        Mode::Collision => true,
        Mode::Me => false,
        Mode::All => cfg.cluster.mode == ClusterMode::ExactTensor,
    };
    if use_collisions {
        let n = cfg.collision.n_max;
        match run_collisions_strided(&rho0, cfg, n, n.max(1)) {
            Ok(traj) => {
                if !detect_steady(&traj, 1e-6).converged {
                    flags.push("collision-not-converged".into());
                }
                Some(traj.final_state().clone())
            }
            Err(e) => {
                flags.push(format!("collision-{}", short(&e)));
                None
            }
        }
    } else {
        let gen = match make_generator(cfg) {
            Ok(g) => g,
            Err(e) => {
                flags.push(format!("me-{}", short(&e)));
                return None;
            }
        };
        let t_max = (cfg.collision.n_max as f64 * cfg.collision.tau).max(100.0);
        match steady_state_me(&gen, &rho0, gen.max_step(), 1e-10, t_max) {
            Ok(ss) => {
                if !ss.converged {
                    flags.push("me-not-converged".into());
                }
                Some(ss.state)
            }
            Err(e) => {
                flags.push(format!("me-{}", short(&e)));
                None
            }
        }
    }
}

/// Evaluates every column for one scenario. Failures end up in `flags`.
pub fn evaluate(id: &str, cfg: &ScenarioConfig, value: f64, mode: Mode) -> ResultRow {
    let mut row = ResultRow::empty(id, value);
    if let Err(e) = cfg.validate() {
        row.flags.push(format!("invalid-{}", short(&e)));
        return row;
    }
    let sim = simulate(cfg, mode, &mut row.flags);
    row.c_ss_sim = sim.as_ref().map(l1_coherence);

    let steady = match cfg.target.kind {
        SystemKind::Tls => {
            match ssc_closed_form(cfg) {
                Ok(c) => row.c_ss_analytic = Some(c),
                Err(e) => row.flags.push(format!("ssc-{}", short(&e))),
            }
            match bloch_steady(cfg) {
                Ok(s) => {
                    row.p_ss = Some(s.purity());
                    row.sz_ss = Some(s.z);
                    s.to_density().ok()
                }
                Err(e) => {
                    row.flags.push(format!("bloch-{}", short(&e)));
                    None
                }
            }
        }
        SystemKind::Lho => {
            row.flags.push("oscillator-target".into());
            row.p_ss = sim.as_ref().map(|r| r.purity());
            sim.clone()
        }
    };

    if cfg.target.kind == SystemKind::Tls {
        let z0 = thermal_inversion(cfg.target.frequency, cfg.bath_unit.temperature);
        match tsc_closed_form(cfg, z0) {
            Ok(t) => {
                row.c_ts_bar = Some(t.c_bar);
                row.p_ts_bar = Some(t.p_bar);
                row.t_max = Some(t.t_max);
                if !t.reliable {
                    row.flags.push("tsc-outside-window".into());
                }
            }
            Err(e) => row.flags.push(format!("tsc-{}", short(&e))),
        }
    }

    if let Some(rho) = steady {
        match currents_generic(&rho, cfg) {
            Ok(r) => {
                row.wdot_ss = Some(r.w_dot);
                row.qdot_ss = Some(r.q_dot);
            }
            Err(e) => row.flags.push(format!("thermo-{}", short(&e))),
        }
    }
    row
}

/// All points of a sweep, evaluated in parallel and returned in input order.
pub fn run_sweep(run: &RunConfig, sweep: &SweepSpec, mode: Mode) -> CliResult<Vec<ResultRow>> {
    sweep.validate(&run.scenario)?;
    let points: Vec<(f64, ScenarioConfig)> = sweep
        .values()
        .into_iter()
        .map(|v| apply(&run.scenario, sweep.parameter, v).map(|c| (v, c)))
        .collect::<CliResult<_>>()?;
    Ok(points.par_iter().map(|(v, c)| evaluate(&run.id, c, *v, mode)).collect())
}

pub fn rows_table(run: &RunConfig, sweep: &SweepSpec, mode: Mode, rows: &[ResultRow]) -> Table {
    let mut t = Table::new(&COLUMNS);
    t.comment(format!("repcoh sweep {} over {}", run.id, sweep.parameter.name()));
    t.comment(format!("config-sha256 {}", run.hash()));
    t.comment(format!("mode {}", mode.name()));
    for r in rows {
        t.push(r.cells());
    }
    t
}
