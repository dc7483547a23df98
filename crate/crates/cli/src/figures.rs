//! Figure presets: each emits a table with the columns needed to redraw one panel.

use rayon::prelude::*;

use repcoh::collision::run_collisions_strided;
use repcoh::linalg::{DensityMatrix, HilbertDims};
use repcoh::mastereq::{
    evolve_me_sampled, make_generator, purity_closed_form, purity_large_n, ssc_closed_form, ssc_large_n,
};
use repcoh::model::{BlochState, ClusterMode, CouplingForm, ScenarioConfig, SystemKind};
use repcoh::transient::{
    approx_bloch_cr, inverted_qubit, thermal_inversion, tsc_closed_form, tsc_vs_ssc_report, ApproxVariant,
};

use crate::config::{parse_config, RunConfig};
use crate::error::{CliError, CliResult};
use crate::sweep::{apply, Mode, SweepParam};
use crate::table::{Cell, Table};

pub const FIGURE_IDS: [&str; 8] = ["fig1c", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5"];

/// Collision dots are computed on every `DOT_STRIDE`-th temperature.
const DOT_STRIDE: usize = 6;

pub fn preset_text(id: &str) -> CliResult<&'static str> {
    Ok(match id {
        "fig1c" => include_str!("../presets/fig1c.json"),
        "fig2a" => include_str!("../presets/fig2a.json"),
        "fig2b" => include_str!("../presets/fig2b.json"),
        "fig3a" => include_str!("../presets/fig3a.json"),
        "fig3b" => include_str!("../presets/fig3b.json"),
        "fig4a" => include_str!("../presets/fig4a.json"),
        "fig4b" => include_str!("../presets/fig4b.json"),
        "fig5" => include_str!("../presets/fig5.json"),
        other => return Err(CliError::UnknownFigure(other.to_string())),
    })
}

pub fn preset(id: &str) -> CliResult<RunConfig> {
    parse_config(preset_text(id)?, &format!("preset {id}"))
}

fn series_units(run: &RunConfig) -> Vec<usize> {
    match &run.series {
        Some(s) if s.parameter == SweepParam::ClusterSize => s.values().into_iter().map(|v| v as usize).collect(),
        _ => vec![run.scenario.cluster.n_units],
    }
}

fn temperatures(run: &RunConfig) -> Vec<f64> {
    match &run.sweep {
        Some(s) if s.parameter == SweepParam::Temperature => s.values(),
        _ => vec![run.scenario.bath_unit.temperature],
    }
}

fn ground() -> DensityMatrix {
    DensityMatrix::basis(HilbertDims::single(2).expect("qubit dims"), 1).expect("qubit ground state")
}

fn header(table: &mut Table, run: &RunConfig, mode: Mode) {
    table.comment(format!("repcoh figure {}", run.id));
    table.comment(format!("config-sha256 {}", run.hash()));
    table.comment(format!("mode {}", mode.name()));
}

/// Builds the table for figure `id` from its preset.
pub fn figure(id: &str, mode: Mode) -> CliResult<(RunConfig, Table)> {
    let run = preset(id)?;
    let mut table = match id {
        "fig1c" => fig1c(&run)?,
        "fig2a" | "fig4a" => ssc_vs_temperature(&run, mode)?,
        "fig2b" | "fig4b" => tsc_vs_temperature(&run)?,
        "fig3a" => fig3a(&run, mode)?,
        "fig3b" => fig3b(&run)?,
        "fig5" => fig5(&run, mode)?,
        other => return Err(CliError::UnknownFigure(other.to_string())),
    };
    let body = std::mem::take(&mut table.comments);
    header(&mut table, &run, mode);
    table.comments.extend(body);
    Ok((run, table))
}

fn fig1c(run: &RunConfig) -> CliResult<Table> {
    let units = series_units(run);
    let n = run.scenario.collision.n_max;
    let curves: Vec<Vec<f64>> = units
        .par_iter()
        .map(|&k| {
            let cfg = run.scenario.clone().with_units(k);
            run_collisions_strided(&ground(), &cfg, n, n.max(1)).map(|t| t.coherences())
        })
        .collect::<repcoh::Result<_>>()?;
    let mut cols = vec!["collision".to_string(), "t".to_string()];
    cols.extend(units.iter().map(|k| format!("C_N{k}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&col_refs);
    for step in 0..=n {
        let mut row = vec![Cell::from(step), Cell::from(step as f64 * run.scenario.collision.tau)];
        row.extend(curves.iter().map(|c| Cell::from(c[step])));
        t.push(row);
    }
    Ok(t)
}

/// Steady coherence and purity against temperature, one block per cluster size,
/// with the large-cluster limits and sparse collision dots.
fn ssc_vs_temperature(run: &RunConfig, mode: Mode) -> CliResult<Table> {
    let temps = temperatures(run);
    let jobs: Vec<(usize, usize, f64)> = series_units(run)
        .into_iter()
        .flat_map(|n| temps.iter().enumerate().map(move |(i, &t)| (n, i, t)))
        .collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(n, i, temp)| -> CliResult<Vec<Cell>> {
            let mut cfg = apply(&run.scenario, SweepParam::Temperature, temp)?.with_units(n);
            cfg.cluster.mode = ClusterMode::AnalyticMoment;
            let c = ssc_closed_form(&cfg)?;
            let c_lim = ssc_large_n(&cfg)?;
            let p = purity_closed_form(&cfg)?;
            let p_lim = purity_large_n(&cfg)?;
            // Oscillator clusters beyond one unit are too large for the exact map.
            let dots = mode != Mode::Analytic
                && i % DOT_STRIDE == 0
                && (cfg.bath_unit.kind == SystemKind::Tls || n == 1);
            let (cd, pd) = if dots {
                let exact = cfg.clone().with_mode(ClusterMode::ExactTensor);
                let traj = run_collisions_strided(&ground(), &exact, exact.collision.n_max, exact.collision.n_max)?;
                let last = traj.final_state();
                (Some(repcoh::model::l1_coherence(last)), Some(last.purity()))
            } else {
                (None, None)
            };
            Ok(vec![
                Cell::from(n),
                Cell::from(temp),
                Cell::from(c),
                Cell::from(c_lim),
                Cell::from(p),
                Cell::from(p_lim),
                Cell::from(cd),
                Cell::from(pd),
            ])
        })
        .collect::<CliResult<_>>()?;
    let mut t = Table::new(&["N", "temperature", "C_ss", "C_ss_limit", "P_ss", "P_ss_limit", "C_ss_collision", "P_ss_collision"]);
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

/// Optimised transient coherence and purity against temperature for both
/// coupling forms, target initially thermal at the bath temperature.
fn tsc_vs_temperature(run: &RunConfig) -> CliResult<Table> {
    let mut t = Table::new(&["N", "temperature", "z0", "C_TS_rwa", "P_TS_rwa", "C_TS_cr", "P_TS_cr", "flags"]);
    for n in series_units(run) {
        for temp in temperatures(run) {
            let cfg = apply(&run.scenario, SweepParam::Temperature, temp)?.with_units(n);
            let z0 = thermal_inversion(cfg.target.frequency, temp);
            let rwa = tsc_closed_form(&cfg.clone().with_form(CouplingForm::Rwa), z0)?;
            let cr = tsc_closed_form(&cfg.with_form(CouplingForm::CounterRotating), z0)?;
            let flag = if rwa.reliable && cr.reliable { "ok" } else { "outside-window" };
            t.push(vec![
                Cell::from(n),
                Cell::from(temp),
                Cell::from(z0),
                Cell::from(rwa.c_bar),
                Cell::from(rwa.p_bar),
                Cell::from(cr.c_bar),
                Cell::from(cr.p_bar),
                Cell::from(flag),
            ]);
        }
    }
    Ok(t)
}

fn fig3a(run: &RunConfig, mode: Mode) -> CliResult<Table> {
    let temps = temperatures(run);
    let numeric = mode != Mode::Analytic;
    let rows: Vec<_> = temps
        .par_iter()
        .map(|&temp| tsc_vs_ssc_report(&run.scenario, &[temp], numeric).map(|r| r[0]))
        .collect::<repcoh::Result<_>>()?;
    let mut t = Table::new(&["temperature", "z0", "C_TS", "C_TS_numeric", "C_ss", "ratio"]);
    for r in rows {
        t.push(vec![
            Cell::from(r.temperature),
            Cell::from(r.z0),
            Cell::from(r.c_ts),
            Cell::from(r.c_ts_numeric),
            Cell::from(r.c_ss),
            Cell::from(r.ratio),
        ]);
    }
    Ok(t)
}

fn fig3b(run: &RunConfig) -> CliResult<Table> {
    let mut t = Table::new(&["temperature", "z0", "C_TS_TLS_rwa", "C_TS_LHO_rwa", "C_TS_TLS_cr", "C_TS_LHO_cr"]);
    for temp in temperatures(run) {
        let cfg = apply(&run.scenario, SweepParam::Temperature, temp)?;
        let z0 = thermal_inversion(cfg.target.frequency, temp);
        let mut row = vec![Cell::from(temp), Cell::from(z0)];
        for form in [CouplingForm::Rwa, CouplingForm::CounterRotating] {
            for kind in [SystemKind::Tls, SystemKind::Lho] {
                let mut c = cfg.clone().with_form(form);
                c.bath_unit.kind = kind;
                row.push(Cell::from(tsc_closed_form(&c, z0)?.c_bar));
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// Bloch components and coherence for the counter-rotating coupling: weak-damping
/// approximation, master equation and collision map on the collision grid.
fn fig5(run: &RunConfig, mode: Mode) -> CliResult<Table> {
    let cfg: &ScenarioConfig = &run.scenario;
    let z0 = thermal_inversion(cfg.target.frequency, cfg.bath_unit.temperature);
    let tau = cfg.collision.tau;
    let n = cfg.collision.n_max;
    let rho0 = inverted_qubit(z0)?;
    let c_bar = tsc_closed_form(cfg, z0)?.c_bar;
    let (me, coll) = if mode == Mode::Analytic {
        (None, None)
    } else {
        let gen = make_generator(cfg)?;
        let sub = (tau / gen.max_step()).ceil().max(1.0) as usize;
        let me = evolve_me_sampled(&rho0, &gen, n as f64 * tau, tau / sub as f64, sub, usize::MAX)?;
        let coll = run_collisions_strided(&rho0, cfg, n, n.max(1))?;
        (Some(me), Some(coll))
    };
    let bloch_at = |traj: &Option<repcoh::collision::Trajectory>, k: usize| -> Option<BlochState> {
        traj.as_ref().and_then(|t| t.samples().get(k)).and_then(|s| s.bloch)
    };
    let mut t = Table::new(&[
        "t", "x_approx", "y_approx", "z_approx", "C_approx", "x_me", "y_me", "z_me", "C_me", "x_collision",
        "y_collision", "z_collision", "C_collision", "C_bar",
    ]);
    t.comment(format!("initial inversion z0 = {z0}"));
    for k in 0..=n {
        let time = k as f64 * tau;
        let a = approx_bloch_cr(cfg, z0, time, ApproxVariant::Simplified)?.state;
        let mut row = vec![Cell::from(time), a.x.into(), a.y.into(), a.z.into(), a.coherence().into()];
        for b in [bloch_at(&me, k), bloch_at(&coll, k)] {
            row.extend([
                Cell::from(b.map(|b| b.x)),
                Cell::from(b.map(|b| b.y)),
                Cell::from(b.map(|b| b.z)),
                Cell::from(b.map(|b| b.coherence())),
            ]);
        }
        row.push(Cell::from(c_bar));
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for id in FIGURE_IDS {
            let run = preset(id).unwrap();
            assert_eq!(run.id, id);
        }
        assert!(matches!(preset("fig9"), Err(CliError::UnknownFigure(_))));
    }

    #[test]
    fn fig2_preset_parameters() {
        let run = preset("fig2a").unwrap();
        let s = &run.scenario;
        assert_eq!(s.interaction.f2, 0.6);
        assert!((s.interaction.f1 - 0.6 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!((s.target.frequency, s.bath_unit.frequency, s.collision.tau), (1.0, 1.0, 0.051));
        assert_eq!(series_units(&run), vec![1, 2, 3, 8]);
    }

    #[test]
    fn transient_panels_have_expected_shape() {
        let (_, t) = figure("fig3b", Mode::Analytic).unwrap();
        assert_eq!(t.rows.len(), 60);
        assert_eq!(t.columns.len(), 6);
        let (_, t) = figure("fig2b", Mode::Analytic).unwrap();
        assert_eq!(t.rows.len(), 120);
    }
}
