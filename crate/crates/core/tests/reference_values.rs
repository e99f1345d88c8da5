use cox_core::feshbach::{self, units, EventKind, FeshbachData, FieldModel};
use cox_core::inverse::{self, Branch, ResonanceSpec};
use cox_core::observables;
use cox_core::oracle::ode::{self, IntegrationConfig, PotentialTable};
use cox_core::spectrum::count_bound_states;
use cox_core::{sampling, FactorizationState, TwoChannelParams};

fn close(x: f64, want: f64, rel: f64) -> bool {
    ((x - want) / want).abs() <= rel
}

#[test]
fn resonance_inversion_values() {
    let spec = ResonanceSpec::new(1.0, 0.4, 0.01).unwrap();
    let r = inverse::from_resonance(&spec, 0.1, 1.0).unwrap();
    assert!(close(r.params.alpha1(), 0.76938, 5e-5), "{}", r.params.alpha1());
    assert!(close(r.params.alpha2(), -0.766853, 5e-5), "{}", r.params.alpha2());
    assert_eq!(r.n_b, 0);
}

#[test]
fn two_bound_inversion_values_and_ode_spectrum() {
    for (branch, a1, a2) in [(Branch::Upper, -0.112649, -1.79557), (Branch::Lower, -1.48735, -1.0122)] {
        let r = inverse::from_two_bound(0.1, 1.5, 1.0, 0.1, 1.51, branch).unwrap();
        let p = r.params;
        assert!(close(p.alpha1(), a1, 5e-6) && close(p.alpha2(), a2, 5e-5), "{p:?}");
        let table = PotentialTable::new(&p, IntegrationConfig::for_bound_states(&p)).unwrap();
        let k1 = p.kappa1();
        let mut e = ode::numeric_bound_states(&table, (-k1 * k1, 0.0), 400)
            .unwrap()
            .energies;
        e.sort_by(f64::total_cmp);
        assert_eq!(e.len(), 2);
        assert!(close(e[0], -2.25, 1e-6) && close(e[1], -0.01, 1e-6), "{e:?}");
    }
}

#[test]
fn indefinite_parameters_are_singular() {
    let mut rng = sampling::rng(11);
    for _ in 0..500 {
        let p = sampling::draw_indefinite(&mut rng);
        let s = FactorizationState::new(p.to_general()).unwrap();
        assert!(!s.singular_points().is_empty());
        assert!(s.potential_grid(10.0, 50).is_err());
        let q = sampling::draw_regular(&mut rng);
        let s = FactorizationState::new(q.to_general()).unwrap();
        assert!(s.singular_points().is_empty());
        assert!(s.potential_grid(10.0, 50).is_ok());
    }
}

fn rb() -> feshbach::FeshbachFit {
    let data = FeshbachData {
        a_bg: -443.0,
        b0: 15.5041,
        gamma_b: 1.071,
        field: FieldModel::from_external(2471.386, -36.4, 15.5041, units::energy_unit_mhz(units::RB85_MASS_U)),
        alpha1: 2.2e-3,
    };
    feshbach::fit_from_feshbach_data(&data, None).unwrap()
}

#[test]
fn rb_fit_reproduces_alpha2_kappa1_and_slope() {
    let fit = rb();
    assert!(close(fit.params.alpha2(), -0.239343, 5e-4));
    assert!(close(fit.params.kappa1(), 0.0866, 5e-3));
    assert!(close(-fit.field.mu_mag * 1000.0, 0.856899, 5e-3));
}

#[test]
fn rb_scattering_length_follows_single_pole_form() {
    let fit = rb();
    for i in 0..=56 {
        let d = 0.2 + 0.05 * i as f64;
        for b in [15.5041 - d, 15.5041 + d] {
            let exact = feshbach::a_of_b(&fit.params, &fit.field, b).unwrap();
            let approx = feshbach::approx_a_of_b(-443.0, 15.5041, 1.071, b);
            assert!(
                (exact - approx).abs() <= 0.02 * approx.abs().max(443.0),
                "B = {b}: {exact} vs {approx}"
            );
        }
    }
}

#[test]
fn cs_collision_and_threshold_crossing() {
    let p = TwoChannelParams::new(-0.103, -0.5, 0.05, 0.35, 1.0).unwrap();
    let run = feshbach::continue_spectrum_in_b(&p, &FieldModel::new(0.35, -1.0, 0.0), (0.0, 0.3), 2000).unwrap();
    let collision = run.events_of(EventKind::PoleCollision)[0];
    let threshold = run.events_of(EventKind::ThresholdCrossing)[0];
    assert!((collision - 0.120).abs() <= 0.002, "{collision}");
    assert!((threshold - 0.124).abs() <= 0.001, "{threshold}");
}

#[test]
fn two_bound_states_give_positive_scattering_length() {
    let mut seen = 0;
    for p in sampling::regular_suite(5, 3000) {
        let c = count_bound_states(&p);
        if c.n_b == 2 && !c.degenerate {
            seen += 1;
            assert!(observables::scattering_length(&p) > 0.0, "{p:?}");
        }
    }
    assert!(seen > 20);
}
