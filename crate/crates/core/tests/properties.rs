use matdelay_core::analysis::{monotone_bounds, TauHat};
use matdelay_core::engine::hermite;
use matdelay_core::model::Profile;
use matdelay_core::stability::{eval_quartic, quartic_classify};
use matdelay_core::{
    integrate, solve_coexistence, DelayFunction, FunctionalResponse, HistoryFunction, ModelParams, ModelSpec,
    StepperConfig,
};
use proptest::prelude::*;

fn delay_strategy() -> impl Strategy<Value = DelayFunction> {
    (0.0..2.0f64, 0.0..3.0f64, 0.05..5.0f64, any::<bool>()).prop_map(|(tm, span, c, sat)| {
        if sat {
            DelayFunction::saturating(tm, tm + span, c)
        } else {
            DelayFunction::exponential(tm, tm + span, c)
        }
    })
}

fn response_strategy() -> impl Strategy<Value = FunctionalResponse> {
    prop_oneof![
        (0.1..3.0f64).prop_map(|b| FunctionalResponse::Linear { b }),
        (0.1..3.0f64, 0.1..2.0f64).prop_map(|(b, h)| FunctionalResponse::HollingII { b, h }),
        (0.1..3.0f64, 0.1..2.0f64).prop_map(|(b, h)| FunctionalResponse::HollingIII { b, h }),
        (0.1..3.0f64, 0.1..2.0f64).prop_map(|(b, c)| FunctionalResponse::Ivlev { b, c }),
        (0.1..3.0f64, 0.0..2.0f64, 0.0..10.0f64)
            .prop_map(|(b, k1, k2)| FunctionalResponse::BeddingtonDeAngelis { b, k1, k2 }),
        (0.1..3.0f64, 0.0..2.0f64, 0.0..10.0f64).prop_map(|(b, k1, k2)| FunctionalResponse::CrowleyMartin { b, k1, k2 }),
    ]
}

fn spec_strategy() -> impl Strategy<Value = ModelSpec> {
    (0.5..2.0f64, 0.5..5.0f64, 0.5..2.0f64, 0.1..1.0f64, 0.05..1.0f64, delay_strategy(), response_strategy()).prop_map(
        |(r, k, n, dj, d, delay, response)| ModelSpec { params: ModelParams { r, k, n, dj, d }, delay, response },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn correction_factor_positive(delay in delay_strategy(), y in 0.0..50.0f64, rec in 0.0..50.0f64, d in 0.01..3.0f64) {
        let spec = ModelSpec {
            params: ModelParams { r: 1.0, k: 1.0, n: 1.0, dj: 0.5, d },
            delay,
            response: FunctionalResponse::Linear { b: 1.0 },
        };
        let c = spec.correction_factor(y, rec).unwrap();
        prop_assert!(c > 0.0);
        // resolves y' = (1 − τ' y') N − d y
        let tp = spec.delay.tau_prime(y);
        let slope = (rec - d * y) / (1.0 + tp * rec);
        prop_assert!((c - (1.0 - tp * slope)).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn responses_monotone(f in response_strategy(), x in 0.0..5.0f64, y in 0.0..5.0f64, dx in 0.0..1.0f64, dy in 0.0..1.0f64) {
        prop_assert!(f.rate(x + dx, y) >= f.rate(x, y));
        prop_assert!(f.rate(x, y + dy) <= f.rate(x, y));
        prop_assert_eq!(f.rate(0.0, y), 0.0);
    }

    #[test]
    fn delay_within_bounds_and_nondecreasing(delay in delay_strategy(), y in 0.0..100.0f64, dy in 0.0..10.0f64) {
        let t = delay.tau(y);
        prop_assert!(t >= delay.tau_m() - 1e-12 && t <= delay.tau_max() + 1e-12);
        prop_assert!(delay.tau(y + dy) >= t - 1e-14);
        prop_assert!(delay.tau_prime(y) >= 0.0);
    }

    #[test]
    fn reproduction_number_monotone(spec in spec_strategy(), factor in 1.0..3.0f64) {
        let r = spec.reproduction_number();
        let mut more_death = spec.clone();
        more_death.params.d *= factor;
        prop_assert!(more_death.reproduction_number() <= r);
        let mut juvenile_death = spec.clone();
        juvenile_death.params.dj *= factor;
        prop_assert!(juvenile_death.reproduction_number() <= r);
        let mut births = spec;
        births.params.n *= factor;
        prop_assert!(births.reproduction_number() >= r);
    }

    #[test]
    fn coexistence_exists_iff_above_threshold(spec in spec_strategy()) {
        let r = spec.reproduction_number();
        prop_assume!((r - 1.0).abs() > 1e-3);
        match solve_coexistence(&spec) {
            Ok(e) => {
                prop_assert!(r > 1.0);
                prop_assert!(e.residual <= 1e-10);
                prop_assert!(e.x > 0.0 && e.x < spec.params.k && e.y > 0.0 && e.yj > 0.0);
            }
            Err(err) => prop_assert!(r < 1.0, "{err}"),
        }
    }

    #[test]
    fn hermite_reproduces_cubics(c in prop::array::uniform4(-3.0..3.0f64), t0 in -2.0..2.0f64, len in 0.01..2.0f64, w in 0.0..1.0f64) {
        let p = |t: f64| ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
        let dp = |t: f64| (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1];
        let t1 = t0 + len;
        let t = t0 + w * len;
        let v = hermite(t0, &[p(t0)], &[dp(t0)], t1, &[p(t1)], &[dp(t1)], t);
        prop_assert!((v[0] - p(t)).abs() <= 1e-10 * (1.0 + p(t).abs()));
    }

    #[test]
    fn quartic_roots_reported_are_real_roots(q in prop::array::uniform4(-10.0..10.0f64)) {
        let rep = quartic_classify(q[0], q[1], q[2], q[3]);
        if q[3] < 0.0 {
            prop_assert!(rep.has_positive_root);
        }
        if !rep.has_positive_root {
            // h stays positive on a fine grid of the positive axis
            let min = (1..4000).map(|i| eval_quartic(&q, i as f64 * 0.005)).fold(f64::INFINITY, f64::min);
            prop_assert!(min > -1e-9, "{min}");
        }
    }

    #[test]
    fn history_json_round_trip(base in 0.1..3.0f64, amp in 0.0..0.1f64, omega in 0.1..5.0f64) {
        let h = HistoryFunction {
            prey: Profile::Sine { base, amplitude: amp, omega, phase: 0.3 },
            juvenile: Profile::Constant { value: base },
            predator: Profile::Tabulated { times: vec![-1.0, 0.0], values: vec![base, 2.0 * base] },
        };
        let s = serde_json::to_string(&h).unwrap();
        let back: HistoryFunction = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn bracket_width_relation(k2 in 3.0..20.0f64, d in 0.1..0.3f64, eps in 1e-5..1e-2f64) {
        let spec = ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d },
            delay: DelayFunction::saturating(0.5, 1.0, 2.0),
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.0, k2 },
        };
        let eq = solve_coexistence(&spec).unwrap();
        if let Ok(b) = monotone_bounds(&spec, &eq, eps, 300, TauHat::AtEquilibrium) {
            let [xo, xu, yo, yu] = b.limits;
            prop_assert!((yo - yu - (b.width_slope * (xo - xu) + 2.0 * eps)).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_stay_nonnegative_with_positive_correction(spec in spec_strategy(), x0 in 0.05..3.0f64, y0 in 0.05..3.0f64) {
        let h = HistoryFunction::constant(x0, y0, 0.0).with_consistent_juveniles(&spec);
        let traj = integrate(&spec, &h, &StepperConfig::new(30.0)).unwrap();
        prop_assert!(traj.min_stage_correction() > 0.0);
        prop_assert!(traj.lag_strictly_increasing());
        for s in traj.nodes() {
            prop_assert!(s.x >= 0.0 && s.y >= 0.0 && s.yj >= 0.0);
        }
        let v_cap = spec.boundedness_limit().max(spec.params.n * x0 + y0 + h.juvenile.eval(0.0));
        let fin = traj.final_state();
        prop_assert!(spec.params.n * fin.x + fin.y + fin.yj <= 1.01 * v_cap);
    }
}
