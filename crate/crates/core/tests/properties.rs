use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use repcoh::collision::CollisionChannel;
use repcoh::linalg::{herm_expm, kron_states, partial_trace_state, DensityMatrix, HilbertDims, Operator};
use repcoh::mastereq::{bloch_steady, bloch_steady_rwa, make_generator, ssc_closed_form};
use repcoh::model::{bloch_vector, BathUnitSpec, BlochState, ClusterMode, CouplingForm, ScenarioConfig};
use repcoh::thermo::currents_generic;
use repcoh::transient::{approx_bloch_cr, tsc_closed_form, ApproxVariant};

fn density(d: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let a = DMatrix::from_fn(d, d, |i, j| {
        let (re, im) = entries[i * d + j];
        C64::new(re, im)
    });
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(m.map(|z| z / tr)).unwrap()
}

fn arb_density(d: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_filter("non-degenerate", |v| v.iter().any(|&(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| density(d, &v))
}

fn arb_bloch() -> impl Strategy<Value = BlochState> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th, ph)| {
        BlochState::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos())
    })
}

fn arb_form() -> impl Strategy<Value = CouplingForm> {
    prop_oneof![Just(CouplingForm::Rwa), Just(CouplingForm::CounterRotating)]
}

fn arb_qubit_cfg() -> impl Strategy<Value = ScenarioConfig> {
    (0.5f64..1.5, 0.5f64..1.5, 0.0f64..2.0, 1usize..=3, -0.7f64..0.7, -0.7f64..0.7, arb_form(), any::<bool>())
        .prop_map(|(w, wb, t, n, f1, f2, form, lho)| {
            let bath = if lho { BathUnitSpec::oscillator(wb, t) } else { BathUnitSpec::qubit(wb, t) };
            ScenarioConfig::qubit(w, bath, if lho { 1 } else { n }, f1, f2, form)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_of_product_recovers_factor(a in arb_density(2), b in arb_density(3)) {
        let ab = kron_states(&a, &b);
        let back = partial_trace_state(&ab, &[0]).unwrap();
        prop_assert!((back.matrix() - a.matrix()).camax() < 1e-13);
        let other = partial_trace_state(&ab, &[1]).unwrap();
        prop_assert!((other.matrix() - b.matrix()).camax() < 1e-13);
    }

    #[test]
    fn hermitian_exponential_is_unitary(rho in arb_density(4), t in -3.0f64..3.0) {
        let h = Operator::from_matrix(rho.matrix().clone()).unwrap();
        let u = herm_expm(&h, t).unwrap();
        let id = DMatrix::<C64>::identity(4, 4);
        prop_assert!((u.matrix() * u.matrix().adjoint() - id).camax() < 1e-12);
    }

    #[test]
    fn collision_map_is_a_channel(cfg in arb_qubit_cfg(), b in arb_bloch()) {
        let ch = CollisionChannel::new(&cfg).unwrap();
        let out = ch.apply(&b.to_density().unwrap()).unwrap();
        let m = out.matrix();
        prop_assert!((m.trace().re - 1.0).abs() < 1e-12);
        prop_assert!((m - m.adjoint()).camax() < 1e-13);
        prop_assert!(bloch_vector(&out).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn first_law_holds_for_any_state(cfg in arb_qubit_cfg(), b in arb_bloch()) {
        let r = currents_generic(&b.to_density().unwrap(), &cfg).unwrap();
        prop_assert!(r.first_law_residual() < 1e-11);
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(cfg in arb_qubit_cfg(), b in arb_bloch()) {
        let cfg = cfg.with_mode(ClusterMode::AnalyticMoment);
        let gen = make_generator(&cfg).unwrap();
        let d = gen.apply(b.to_density().unwrap().matrix());
        prop_assert!(d.trace().norm() < 1e-13);
        prop_assert!((&d - d.adjoint()).camax() < 1e-13);
    }

    #[test]
    fn counter_rotating_fixed_point_is_origin(cfg in arb_qubit_cfg()) {
        let cfg = cfg.with_form(CouplingForm::CounterRotating).with_mode(ClusterMode::AnalyticMoment);
        prop_assume!((cfg.interaction.f1 * cfg.interaction.f2).abs() > 1e-3);
        prop_assert!(bloch_steady(&cfg).unwrap().norm() < 1e-14);
    }

    #[test]
    fn coherence_identity(w in 0.5f64..1.5, t in 0.0f64..3.0, n in 1usize..40, f1 in -0.8f64..0.8, f2 in 0.05f64..0.8) {
        prop_assume!(f1.abs() > 1e-3);
        let cfg = ScenarioConfig::qubit(w, BathUnitSpec::qubit(1.0, t), n, f1, f2, CouplingForm::Rwa)
            .with_mode(ClusterMode::AnalyticMoment);
        let s = bloch_steady_rwa(&cfg).unwrap();
        prop_assert!((s.coherence() - ssc_closed_form(&cfg).unwrap()).abs() < 1e-12);
        prop_assert!(s.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn approximate_solution_starts_at_initial_inversion(f1 in -0.3f64..0.3, f2 in -0.3f64..0.3, z0 in -1.0f64..1.0) {
        let cfg = ScenarioConfig::qubit(1.0, BathUnitSpec::qubit(1.0, 0.0), 1, f1, f2, CouplingForm::CounterRotating);
        for v in [ApproxVariant::Raw, ApproxVariant::Simplified] {
            prop_assert_eq!(approx_bloch_cr(&cfg, z0, 0.0, v).unwrap().state, BlochState::new(0.0, 0.0, z0));
        }
    }

    #[test]
    fn closed_form_optimum_stays_physical(f1 in 0.0f64..0.2, f2 in 0.0f64..0.2, n in 1usize..=3,
                                          az in 0.5f64..1.0, form in arb_form(), lho in any::<bool>()) {
        let bath = if lho { BathUnitSpec::oscillator(1.0, 0.0) } else { BathUnitSpec::qubit(1.0, 0.0) };
        let cfg = ScenarioConfig::qubit(1.0, bath, n, f1, f2, form).with_mode(ClusterMode::AnalyticMoment);
        let r = tsc_closed_form(&cfg, -az).unwrap();
        prop_assert!(r.reliable);
        prop_assert!((0.0..=1.0).contains(&r.c_bar));
        prop_assert!((0.5..=1.0).contains(&r.p_bar));
        prop_assert!(r.t_max > 0.0);
        if form == CouplingForm::Rwa {
            prop_assert_eq!(r.p_bar, 0.5 * (1.0 + az * az));
        }
    }
}

#[test]
fn trivial_dims_reject_mismatch() {
    let rho = DensityMatrix::maximally_mixed(HilbertDims::single(3).unwrap());
    let cfg = ScenarioConfig::qubit(1.0, BathUnitSpec::qubit(1.0, 0.1), 1, 0.1, 0.1, CouplingForm::Rwa);
    assert!(CollisionChannel::new(&cfg).unwrap().apply(&rho).is_err());
}
