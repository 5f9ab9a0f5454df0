use bernlog::mgf::{log_envelope, log_mgf};
use bernlog::*;
use proptest::prelude::*;

fn prob() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.0),
        (-700.0f64..0.0).prop_map(f64::exp),
        0.0f64..=1.0,
    ]
}

proptest! {
    #[test]
    fn summand_is_centered(p in prob()) {
        let mean: f64 = support_points(p).unwrap().iter().map(|a| a.value * a.mass).sum();
        prop_assert!(mean.abs() < 1e-14);
    }

    #[test]
    fn summand_variance_formula_and_ceiling(p in 1e-300f64..1.0) {
        prop_assume!(p < 1.0);
        let atoms = support_points(p).unwrap();
        let var: f64 = atoms.iter().map(|a| a.value * a.value * a.mass).sum();
        let formula = p * (1.0 - p) * p.ln().powi(2);
        prop_assert!((var - formula).abs() <= 1e-12 * formula);
        prop_assert!(formula <= 1.0);
    }

    #[test]
    fn mgf_under_envelope(p in prob(), lambda in -0.999f64..0.999) {
        let le = log_envelope(lambda).unwrap();
        prop_assert!(log_mgf(p, lambda) <= le + 1e-12);
    }

    #[test]
    fn mgf_positive(p in prob(), lambda in -50.0f64..50.0) {
        let g = mgf(p, lambda).unwrap();
        prop_assert!(g.value > 0.0);
        prop_assert!(g.log_value.is_finite());
    }

    #[test]
    fn grouped_amgm(group in prop::collection::vec(0.0f64..=1.0, 1..9), lambda in -3.0f64..3.0) {
        let g = grouped_mgf(&group, lambda).unwrap();
        prop_assert!(g.log_exact <= g.log_dominating + 1e-10);
    }

    #[test]
    fn bounds_monotone_in_t(probs in prop::collection::vec(prob(), 1..20), t0 in 1e-3f64..10.0, step in 1e-3f64..5.0) {
        let e = BernoulliEnsemble::new(probs).unwrap();
        let a = compare(&e, &[t0]).unwrap();
        let b = compare(&e, &[t0 + step]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(y.bound <= x.bound);
        }
        let n = e.len();
        for k in 2..5usize {
            let eps0 = t0 / n as f64;
            let eps1 = (t0 + step) / n as f64;
            prop_assert!(multinoulli_bound(n, k, eps1).unwrap().bound <= multinoulli_bound(n, k, eps0).unwrap().bound);
        }
    }

    #[test]
    fn validation_idempotent(probs in prop::collection::vec(prob(), 1..30)) {
        let e = BernoulliEnsemble::new(probs).unwrap();
        prop_assert_eq!(e.validate().unwrap(), e.clone());
        let wrapped = Ensemble::Bernoulli(e);
        prop_assert_eq!(wrapped.validate().unwrap(), wrapped);
    }

    #[test]
    fn ensemble_json_round_trip(groups in prop::collection::vec(prop::collection::vec(prob(), 1..5), 1..5)) {
        let g = Ensemble::Grouped(GroupedEnsemble::new(groups).unwrap());
        prop_assert_eq!(Ensemble::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn chernoff_objective_not_above_closed_form(n in 1usize..1_000_000, frac in 1e-6f64..10.0) {
        let t = frac * n as f64;
        for side in [Side::Left, Side::Right] {
            let s = chernoff_optimize(n, t, side).unwrap();
            prop_assert!(s.objective_value <= s.closed_form_objective + 1e-12 * s.closed_form_objective.abs().max(1.0));
            prop_assert!(s.lambda_star.abs() < 1.0);
        }
    }
}

#[test]
fn mgf_at_zero_is_one() {
    for p in bernlog::numeric::log_symmetric_unit_grid(1e-12, 400) {
        assert_eq!(mgf(p, 0.0).unwrap().value, 1.0);
    }
}
