use serde::Serialize;

use super::ModelSpec;

/// One named hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Sample point `(x, y)` (or `(y, τ(y))` for delay checks) where the
    /// check first failed.
    pub witness: Option<(f64, f64)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid_points: usize,
    pub predator_cap: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &'static str, witness: Option<(f64, f64)>, detail: impl Into<String>) -> Check {
    Check { name, passed: witness.is_none(), witness, detail: detail.into() }
}

const DELAY_FD_TOL: f64 = 1e-5;

/// Checks positivity of the parameters, the delay-law hypotheses and the
/// functional-response hypotheses on a `grid × grid` sample of
/// `[0, K] × [0, y_cap]` with `y_cap = n K (m + r)^2 / (4 r m)`,
/// `m = min(d_j, d)`. Never fails on model content; every problem is a
/// failed [`Check`]. Grids coarser than 16 points are raised to 16.
pub fn validate(spec: &ModelSpec, grid: usize) -> ValidationReport {
    let grid = grid.max(16);
    let p = &spec.params;
    let y_cap = spec.predator_cap();
    let k = if p.k > 0.0 && p.k.is_finite() { p.k } else { 1.0 };
    let xs: Vec<f64> = (0..grid).map(|i| k * i as f64 / (grid - 1) as f64).collect();
    let ys: Vec<f64> = (0..grid).map(|i| y_cap * i as f64 / (grid - 1) as f64).collect();
    let mut checks = Vec::new();

    let bad_param = [("r", p.r), ("K", p.k), ("n", p.n), ("dj", p.dj), ("d", p.d)]
        .into_iter()
        .find(|(_, v)| !(*v > 0.0 && v.is_finite()));
    checks.push(Check {
        name: "params_positive",
        passed: bad_param.is_none(),
        witness: None,
        detail: bad_param.map_or_else(
            || "r, K, n, dj, d all positive".to_string(),
            |(n, v)| format!("{n} = {v} is not positive"),
        ),
    });

    // Delay law. Sample the predator grid plus a far tail, since τ_M is a
    // supremum over all y ≥ 0.
    let delay = &spec.delay;
    let mut yd: Vec<f64> = ys.clone();
    yd.extend([2.0, 5.0, 10.0, 100.0, 1e4, 1e8].iter().map(|m| m * y_cap.max(1.0)));
    let tau_m = delay.tau_m();
    let tau_max = delay.tau_max();

    let t0 = delay.tau(0.0);
    checks.push(check(
        "delay_at_zero",
        ((t0 - tau_m).abs() > 1e-12 * tau_m.abs().max(1.0)).then_some((0.0, t0)),
        format!("tau(0) = {t0}, declared tau_m = {tau_m}"),
    ));
    checks.push(check(
        "delay_bounds",
        (tau_m < 0.0 || !tau_max.is_finite())
            .then_some((f64::NAN, tau_m))
            .or_else(|| {
                yd.iter().map(|&y| (y, delay.tau(y))).find(|&(_, t)| {
                    t < tau_m - 1e-12 || t > tau_max + 1e-12 * tau_max.abs().max(1.0)
                })
            }),
        format!("0 <= tau_m = {tau_m} <= tau(y) <= tau_M = {tau_max}"),
    ));
    checks.push(check(
        "delay_monotone",
        yd.windows(2)
            .find(|w| delay.tau(w[1]) < delay.tau(w[0]) - 1e-14)
            .map(|w| (w[1], delay.tau(w[1]))),
        "tau nondecreasing on the sample",
    ));
    checks.push(check(
        "delay_derivative_nonnegative",
        yd.iter().map(|&y| (y, delay.tau_prime(y))).find(|&(_, d)| !(d >= 0.0)),
        "tau'(y) >= 0",
    ));
    checks.push(check(
        "delay_derivative_consistent",
        ys.iter().copied().find_map(|y| {
            let h = 1e-6 * y.max(1.0);
            let fd = if y < h {
                (delay.tau(y + h) - delay.tau(y)) / h
            } else {
                (delay.tau(y + h) - delay.tau(y - h)) / (2.0 * h)
            };
            let tp = delay.tau_prime(y);
            let tol = DELAY_FD_TOL * tp.abs().max(1.0);
            ((fd - tp).abs() > tol).then_some((y, tp))
        }),
        "tau' agrees with finite differences of tau",
    ));

    // Functional response.
    let f = &spec.response;
    let violations = f.coefficient_violations();
    checks.push(Check {
        name: "response_coefficients",
        passed: violations.is_empty(),
        witness: None,
        detail: if violations.is_empty() {
            format!("{} coefficients consistent", f.kind_name())
        } else {
            violations.join("; ")
        },
    });
    checks.push(check(
        "response_zero_prey",
        ys.iter().map(|&y| (0.0, y)).find(|&(x, y)| f.rate(x, y) != 0.0),
        "f(0, y) = 0",
    ));
    let interior = || {
        xs.iter()
            .skip(1)
            .flat_map(|&x| ys.iter().skip(1).map(move |&y| (x, y)))
    };
    checks.push(check(
        "response_positive",
        interior().find(|&(x, y)| !(f.rate(x, y) > 0.0)),
        "f(x, y) > 0 for x, y > 0",
    ));
    checks.push(check(
        "response_monotone_prey",
        ys.iter().find_map(|&y| {
            xs.windows(2)
                .find(|w| f.rate(w[1], y) < f.rate(w[0], y))
                .map(|w| (w[1], y))
        }),
        "f nondecreasing in x",
    ));
    checks.push(check(
        "response_monotone_predator",
        xs.iter().find_map(|&x| {
            ys.windows(2)
                .find(|w| f.rate(x, w[1]) > f.rate(x, w[0]))
                .map(|w| (x, w[1]))
        }),
        "f nonincreasing in y",
    ));
    let slope0 = f.d_prey(0.0, 0.0);
    checks.push(check(
        "response_origin_slope_finite",
        (!slope0.is_finite()).then_some((0.0, 0.0)),
        format!("f_x(0, 0) = {slope0}"),
    ));
    checks.push(check(
        "response_derivatives_consistent",
        interior().find(|&(x, y)| {
            if let Some(kink) = f.kink() {
                if (x - kink).abs() < 1e-4 * kink.abs().max(1.0) {
                    return false;
                }
            }
            let hx = 1e-6 * x.max(1e-3);
            let hy = 1e-6 * y.max(1e-3);
            let fx = (f.rate(x + hx, y) - f.rate(x - hx, y)) / (2.0 * hx);
            let fy = (f.rate(x, y + hy) - f.rate(x, y - hy)) / (2.0 * hy);
            let ax = f.d_prey(x, y);
            let ay = f.d_predator(x, y);
            (fx - ax).abs() > 1e-5 * ax.abs().max(1e-3) || (fy - ay).abs() > 1e-5 * ay.abs().max(1e-3)
        }),
        "f_x, f_y agree with central differences",
    ));

    ValidationReport { grid_points: grid, predator_cap: y_cap, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayFunction, FunctionalResponse, ModelParams};

    fn base(response: FunctionalResponse, delay: DelayFunction) -> ModelSpec {
        ModelSpec { params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 0.8 }, delay, response }
    }

    #[test]
    fn holling_ii_passes_everything() {
        let s = base(FunctionalResponse::HollingII { b: 2.0, h: 0.5 }, DelayFunction::saturating(0.5, 1.5, 1.0));
        let r = validate(&s, 16);
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn power_law_kind_mismatch() {
        let s = base(FunctionalResponse::PowerLaw { b: 1.0, k: 1.0 }, DelayFunction::constant(1.0));
        let r = validate(&s, 32);
        assert!(r.get("response_monotone_prey").unwrap().passed);
        assert!(!r.get("response_coefficients").unwrap().passed);
    }

    #[test]
    fn claimed_delay_bound_too_small() {
        let s = base(
            FunctionalResponse::Linear { b: 1.0 },
            DelayFunction::custom(|y| 1.0 - (-y).exp(), |y| (-y).exp(), 0.0, 0.5),
        );
        let r = validate(&s, 64);
        let c = r.get("delay_bounds").unwrap();
        assert!(!c.passed);
        let (y, tau) = c.witness.unwrap();
        assert!(tau > 0.5 && y > std::f64::consts::LN_2);
        // everything else about this law is fine
        assert!(r.get("delay_derivative_consistent").unwrap().passed);
        assert!(r.get("delay_monotone").unwrap().passed);
    }

    #[test]
    fn wrong_derivative_is_caught() {
        let s = base(
            FunctionalResponse::Linear { b: 1.0 },
            DelayFunction::custom(|y| 1.0 - 0.5 * (-y).exp(), |y| (-y).exp(), 0.5, 1.0),
        );
        assert!(!validate(&s, 16).get("delay_derivative_consistent").unwrap().passed);
    }

    #[test]
    fn zero_death_rate_fails_params() {
        let mut s = base(FunctionalResponse::Linear { b: 1.0 }, DelayFunction::constant(1.0));
        s.params.dj = 0.0;
        assert!(!validate(&s, 16).get("params_positive").unwrap().passed);
    }
}
