use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use repcoh::collision::{bloch_gap_vs_me, detect_steady, run_collisions, run_collisions_strided};
use repcoh::linalg::{DensityMatrix, HilbertDims};
use repcoh::mastereq::{
    bloch_steady, bloch_steady_rwa, evolve_me, make_generator, osc_target_steady, ssc_closed_form, steady_state_me,
};
use repcoh::model::{
    bloch_vector, BathUnitSpec, BlochState, ClusterMode, CouplingForm, ScenarioConfig, TargetSpec,
};
use repcoh::thermo::ThermoProbe;

fn fig2(n: usize, t: f64) -> ScenarioConfig {
    ScenarioConfig::qubit(1.0, BathUnitSpec::qubit(1.0, t), n, 0.6 / 2f64.sqrt(), 0.6, CouplingForm::Rwa)
}

fn ground() -> DensityMatrix {
    DensityMatrix::basis(HilbertDims::single(2).unwrap(), 1).unwrap()
}

#[test]
fn collisions_reach_closed_form_coherence() {
    let cfg = fig2(1, 0.2);
    let traj = run_collisions_strided(&ground(), &cfg, 5000, 5000).unwrap();
    let c = traj.coherences();
    let target = ssc_closed_form(&cfg).unwrap();
    assert!((c.last().unwrap() - target).abs() < 5e-3, "{} vs {target}", c.last().unwrap());
    let rep = detect_steady(&traj, 1e-6);
    assert!(rep.converged);
    assert!(rep.index.unwrap() < 5000);
}

#[test]
fn collision_map_approaches_generator_linearly_in_tau() {
    let rho0 = ground();
    for form in [CouplingForm::Rwa, CouplingForm::CounterRotating] {
        let cfg = fig2(1, 0.2).with_form(form);
        let coarse = bloch_gap_vs_me(&rho0, &cfg.clone().with_tau(0.01), 20.0).unwrap();
        let fine = bloch_gap_vs_me(&rho0, &cfg.clone().with_tau(0.005), 20.0).unwrap();
        assert!(coarse < 1e-2, "{form:?}: {coarse}");
        let ratio = coarse / fine;
        assert!((ratio - 2.0).abs() <= 0.3, "{form:?}: ratio {ratio}");
    }
}

#[test]
fn generator_steady_state_matches_bloch_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let t = rng.random_range(0.0..2.0);
        let f2 = rng.random_range(0.2..0.8);
        let f1 = rng.random_range(0.1..0.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let cfg = ScenarioConfig::qubit(rng.random_range(0.6..1.4), BathUnitSpec::qubit(1.0, t), n, f1, f2, CouplingForm::Rwa)
            .with_mode(ClusterMode::AnalyticMoment);
        let gen = make_generator(&cfg).unwrap();
        let ss = steady_state_me(&gen, &ground(), gen.max_step(), 1e-10, 5.0e4).unwrap();
        assert!(ss.converged, "residual {}", ss.residual);
        let me = bloch_vector(&ss.state).unwrap();
        let exact = bloch_steady_rwa(&cfg).unwrap();
        assert!(me.max_abs_diff(&exact) < 1e-8, "{me:?} vs {exact:?}");
    }
}

#[test]
fn counter_rotating_generator_forgets_coherence() {
    let cfg = fig2(2, 0.3).with_form(CouplingForm::CounterRotating).with_couplings(0.3, 0.4);
    let gen = make_generator(&cfg).unwrap();
    let start = BlochState::new(0.5, 0.1, -0.6).to_density().unwrap();
    let ss = steady_state_me(&gen, &start, gen.max_step(), 1e-12, 1.0e4).unwrap();
    assert!(bloch_vector(&ss.state).unwrap().norm() < 1e-8);
    assert_eq!(bloch_steady(&cfg).unwrap().norm(), 0.0);
}

#[test]
fn first_law_along_trajectories() {
    let rho0 = BlochState::new(0.3, 0.0, -0.7).to_density().unwrap();
    for form in [CouplingForm::Rwa, CouplingForm::CounterRotating] {
        for bath in [BathUnitSpec::qubit(1.0, 0.4), BathUnitSpec::oscillator(1.0, 0.4)] {
            let cfg = ScenarioConfig::qubit(1.0, bath, 1, 0.3, 0.4, form);
            let probe = ThermoProbe::new(&cfg).unwrap();
            let traj = run_collisions(&rho0, &cfg, 200).unwrap();
            for (k, rho) in traj.states().iter().enumerate() {
                let r = probe.record(rho, traj.time(k)).unwrap();
                assert!(r.first_law_residual() < 1e-11);
            }
            let gen = make_generator(&cfg).unwrap();
            let me = evolve_me(&rho0, &gen, 5.0, gen.max_step()).unwrap();
            for (k, rho) in me.states().iter().enumerate() {
                assert!(probe.record(rho, me.time(k)).unwrap().first_law_residual() < 1e-11);
            }
        }
    }
}

#[test]
fn bath_unit_kind_is_irrelevant_at_zero_temperature() {
    for n in 1..=3 {
        let tls = fig2(n, 0.0);
        let mut lho = tls.clone();
        lho.bath_unit = BathUnitSpec::oscillator(1.0, 0.0);
        let a = ssc_closed_form(&tls).unwrap();
        let b = ssc_closed_form(&lho).unwrap();
        assert!((a - b).abs() < 1e-6);

        let (ga, gb) = (make_generator(&tls).unwrap(), make_generator(&lho).unwrap());
        let sa = steady_state_me(&ga, &ground(), ga.max_step(), 1e-11, 2e4).unwrap();
        let sb = steady_state_me(&gb, &ground(), gb.max_step(), 1e-11, 2e4).unwrap();
        assert!(sa.converged && sb.converged);
        let ca = bloch_vector(&sa.state).unwrap().coherence();
        let cb = bloch_vector(&sb.state).unwrap().coherence();
        assert!((ca - cb).abs() < 1e-6, "n={n}: {ca} vs {cb}");
    }
}

/// At the collision level the two unit kinds differ only through higher bath
/// moments, which enter at order τ.
#[test]
fn bath_unit_kinds_differ_at_order_tau_in_collisions() {
    let mut gaps = Vec::new();
    for tau in [0.02, 0.01] {
        let tls = fig2(1, 0.0).with_tau(tau);
        let mut lho = tls.clone();
        lho.bath_unit = BathUnitSpec::oscillator(1.0, 0.0);
        let n = (40.0 / tau) as usize;
        let a = run_collisions_strided(&ground(), &tls, n, n).unwrap();
        let b = run_collisions_strided(&ground(), &lho, n, n).unwrap();
        gaps.push((a.coherences().last().unwrap() - b.coherences().last().unwrap()).abs());
    }
    assert!(gaps[0] < 0.05 * 0.02);
    assert!(gaps[1] < 0.6 * gaps[0]);
}

#[test]
fn oscillator_target_rotating_form_displacement() {
    // β chosen so that the bath occupation is exactly one half.
    let beta = 3f64.ln();
    let cfg = ScenarioConfig::qubit(1.0, BathUnitSpec::oscillator(1.0, 1.0 / beta), 1, 0.1, 0.1, CouplingForm::Rwa)
        .with_target(TargetSpec::oscillator(1.0, 30))
        .with_mode(ClusterMode::AnalyticMoment);
    let gen = make_generator(&cfg).unwrap();
    let d = cfg.target.dim().unwrap();
    let rho0 = DensityMatrix::basis(HilbertDims::single(d).unwrap(), 0).unwrap();
    let ss = steady_state_me(&gen, &rho0, gen.max_step(), 1e-10, 2.0e4).unwrap();
    let a = repcoh::model::annihilation(d);
    let amp = (ss.state.matrix() * a).trace();
    let exact = osc_target_steady(&cfg).unwrap();
    assert!((amp - exact.amplitude).norm() < 1e-3, "{amp} vs {}", exact.amplitude);
}

#[test]
fn single_collision_matches_generator_to_second_order() {
    let rho = BlochState::new(0.4, -0.3, 0.2).to_density().unwrap();
    for tau in [0.01, 0.005, 0.0025] {
        let cfg = fig2(1, 0.2).with_tau(tau);
        let coll = repcoh::collision::collide_once(&rho, &cfg).unwrap();
        let gen = make_generator(&cfg).unwrap();
        let sub = (tau / gen.max_step()).ceil() as usize;
        let me = evolve_me(&rho, &gen, tau, tau / sub as f64).unwrap();
        let diff = (coll.matrix() - me.final_state().matrix()).norm();
        assert!(diff < 10.0 * tau * tau, "tau={tau}: {diff}");
    }
}

#[test]
fn steady_state_forgets_the_initial_state() {
    let cfg = fig2(2, 0.3);
    let mixed = DensityMatrix::maximally_mixed(HilbertDims::single(2).unwrap());
    let a = run_collisions_strided(&ground(), &cfg, 4000, 4000).unwrap();
    let b = run_collisions_strided(&mixed, &cfg, 4000, 4000).unwrap();
    assert!(a.final_state().trace_distance(b.final_state()) < 1e-6);
}

#[test]
fn long_collisions_still_order_coherence_by_cluster_size() {
    let mut last = 0.0;
    for n in 1..=3 {
        let cfg = fig2(n, 0.2).with_tau(1.0);
        let traj = run_collisions_strided(&ground(), &cfg, 300, 300).unwrap();
        let c = *traj.coherences().last().unwrap();
        assert!(c > last, "n={n}: {c} <= {last}");
        last = c;
    }
}

#[test]
fn fixed_point_trajectory_is_steady_immediately() {
    let cfg = fig2(1, 0.2);
    let fixed = run_collisions_strided(&ground(), &cfg, 6000, 6000).unwrap().final_state().clone();
    let traj = run_collisions(&fixed, &cfg, 80).unwrap();
    let rep = detect_steady(&traj, 1e-6);
    assert_eq!(rep.index, Some(0));
}
