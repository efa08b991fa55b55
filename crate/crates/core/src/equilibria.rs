//! Steady states: `E0 = (0, 0, 0)`, `E1 = (K, 0, 0)` and the coexistence
//! point `E* = (x*, y*, yj*)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FunctionalResponse, ModelSpec};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Trivial,
    PredatorExtinction,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub x: f64,
    pub y: f64,
    pub yj: f64,
    /// `τ(y)` at the steady state.
    pub tau: f64,
    /// Largest absolute right-hand side over the three equations.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("no coexistence equilibrium: reproduction number {r} <= 1")]
    NotFound { r: f64 },
    #[error("coexistence solve did not converge (last iterate x = {x}, y = {y}, residual {residual})")]
    NoConvergence { x: f64, y: f64, residual: f64 },
}

pub const RESIDUAL_TOL: f64 = 1e-10;
const MAX_OUTER: usize = 200;
const DAMPING: f64 = 0.5;

/// `E0` and `E1`.
pub fn boundary_equilibria(spec: &ModelSpec) -> Vec<Equilibrium> {
    let tau0 = spec.delay.tau(0.0);
    let k = spec.params.k;
    vec![
        Equilibrium { kind: EquilibriumKind::Trivial, x: 0.0, y: 0.0, yj: 0.0, tau: tau0, residual: residual(spec, 0.0, 0.0, 0.0) },
        Equilibrium {
            kind: EquilibriumKind::PredatorExtinction,
            x: k,
            y: 0.0,
            yj: 0.0,
            tau: tau0,
            residual: residual(spec, k, 0.0, 0.0),
        },
    ]
}

/// Steady juvenile density `n f y (1 − e^{−d_j τ}) / d_j`, or `n f y τ`
/// when `d_j = 0`.
pub fn yj_star(spec: &ModelSpec, x: f64, y: f64) -> f64 {
    let p = &spec.params;
    let tau = spec.delay.tau(y);
    let flux = p.n * spec.response.rate(x, y) * y;
    if p.dj == 0.0 {
        flux * tau
    } else {
        flux * (-(-p.dj * tau).exp_m1()) / p.dj
    }
}

/// Max absolute value of the three right-hand sides at a constant state.
pub fn residual(spec: &ModelSpec, x: f64, y: f64, yj: f64) -> f64 {
    let p = &spec.params;
    let f = spec.response.rate(x, y);
    let e = spec.survival(spec.delay.tau(y));
    let rx = p.r * x * (1.0 - x / p.k) - f * y;
    let ry = p.n * e * f * y - p.d * y;
    let rj = p.n * f * y - p.dj * yj - p.n * e * f * y;
    rx.abs().max(ry.abs()).max(rj.abs())
}

fn coexistence(spec: &ModelSpec, x: f64, y: f64) -> Equilibrium {
    let yj = yj_star(spec, x, y);
    Equilibrium { kind: EquilibriumKind::Coexistence, x, y, yj, tau: spec.delay.tau(y), residual: residual(spec, x, y, yj) }
}

/// Coexistence equilibrium.
///
/// For Beddington–DeAngelis responses with `k2 > 0` the prey component is
/// first taken from the closed-form quadratic, iterated on `τ(y*)`. Any
/// candidate is accepted only if its residual is at most `1e−10`; otherwise
/// the general solver runs: an outer damped fixed point on `τ(y*)` around
/// an inner one-dimensional bisection, with a direct bisection on the full
/// reduced equation as fallback, followed by Newton polishing.
pub fn solve_coexistence(spec: &ModelSpec) -> Result<Equilibrium, EquilibriumError> {
    let r = spec.reproduction_number();
    if !(r > 1.0) {
        return Err(EquilibriumError::NotFound { r });
    }
    let mut best: Option<Equilibrium> = None;
    let mut consider = |cand: Option<(f64, f64)>| -> Option<Equilibrium> {
        let (x, y) = cand?;
        if !(x > 0.0 && y > 0.0) {
            return None;
        }
        let (x, y) = polish(spec, x, y);
        let eq = coexistence(spec, x, y);
        if best.is_none_or(|b| eq.residual < b.residual) {
            best = Some(eq);
        }
        (eq.residual <= RESIDUAL_TOL && eq.x > 0.0 && eq.y > 0.0).then_some(eq)
    };
    if let Some(eq) = consider(bd_closed_form(spec)) {
        return Ok(eq);
    }
    if let Some(eq) = consider(nested_fixed_point(spec)) {
        return Ok(eq);
    }
    if let Some(eq) = consider(reduced_bisection(spec)) {
        return Ok(eq);
    }
    let (x, y, residual) = best.map_or((f64::NAN, f64::NAN, f64::INFINITY), |b| (b.x, b.y, b.residual));
    Err(EquilibriumError::NoConvergence { x, y, residual })
}

/// Prey density of the Beddington–DeAngelis coexistence point at a frozen
/// survival `E`: the positive root of `x² + α x − β = 0` with
/// `α = (K/r)(n b E − d k1)/(n k2 E) − K`, `β = K d/(n r k2 E)`.
pub fn bd_prey_closed_form(spec: &ModelSpec, survival: f64) -> Option<f64> {
    let FunctionalResponse::BeddingtonDeAngelis { b, k1, k2 } = spec.response else {
        return None;
    };
    let p = &spec.params;
    if !(k2 > 0.0) {
        return None;
    }
    let ne = p.n * survival;
    let alpha = (p.k / p.r) * (ne * b - p.d * k1) / (ne * k2) - p.k;
    let beta = p.k * p.d / (p.r * ne * k2);
    let disc = alpha * alpha + 4.0 * beta;
    // stable form of the positive root
    let x = if alpha >= 0.0 { 2.0 * beta / (alpha + disc.sqrt()) } else { 0.5 * (-alpha + disc.sqrt()) };
    x.is_finite().then_some(x)
}

fn bd_closed_form(spec: &ModelSpec) -> Option<(f64, f64)> {
    let p = &spec.params;
    let y_of = |x: f64, e: f64| p.r * p.n * e * x * (1.0 - x / p.k) / p.d;
    let mut tau = spec.delay.tau(0.0);
    let mut last = None;
    for _ in 0..MAX_OUTER {
        let e = spec.survival(tau);
        let x = bd_prey_closed_form(spec, e)?;
        let y = y_of(x, e);
        if !(y > 0.0) {
            return None;
        }
        let next = spec.delay.tau(y);
        last = Some((x, y));
        if (next - tau).abs() <= 1e-15 * tau.abs().max(1.0) {
            return last;
        }
        tau += DAMPING * (next - tau);
    }
    last
}

/// Prey density solving `f(x, y) = c`, if any.
fn prey_for_rate(spec: &ModelSpec, y: f64, c: f64) -> Option<f64> {
    let f = &spec.response;
    let mut hi = spec.params.k.max(1.0);
    let mut tries = 0;
    while f.rate(hi, y) < c {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return None;
        }
    }
    bisect(|x| f.rate(x, y) - c, 0.0, hi, 200)
}

/// `r x_p (1 − x_p/K) − c y` where `x_p` solves `f(x_p, y) = c`; negative
/// when no such `x_p` exists.
fn reduced(spec: &ModelSpec, y: f64, c: f64) -> f64 {
    let p = &spec.params;
    match prey_for_rate(spec, y, c) {
        Some(x) => p.r * x * (1.0 - x / p.k) - c * y,
        None => -1.0 - c * y,
    }
}

fn rate_needed(spec: &ModelSpec, tau: f64) -> f64 {
    spec.params.d / (spec.params.n * spec.survival(tau))
}

fn y_upper(spec: &ModelSpec) -> f64 {
    let p = &spec.params;
    1.01 * p.r * p.k / (4.0 * rate_needed(spec, spec.delay.tau(0.0)))
}

fn solve_frozen(spec: &ModelSpec, tau: f64) -> Option<(f64, f64)> {
    let c = rate_needed(spec, tau);
    let y = bisect(|y| reduced(spec, y, c), 0.0, y_upper(spec), 200)?;
    let x = prey_for_rate(spec, y, c)?;
    Some((x, y))
}

fn nested_fixed_point(spec: &ModelSpec) -> Option<(f64, f64)> {
    let mut tau = spec.delay.tau(0.0);
    for _ in 0..MAX_OUTER {
        let (x, y) = solve_frozen(spec, tau)?;
        let next = spec.delay.tau(y);
        if (next - tau).abs() <= 1e-14 * tau.abs().max(1.0) {
            return Some((x, y));
        }
        tau += DAMPING * (next - tau);
    }
    None
}

fn reduced_bisection(spec: &ModelSpec) -> Option<(f64, f64)> {
    let g = |y: f64| reduced(spec, y, rate_needed(spec, spec.delay.tau(y)));
    let y = bisect(g, 0.0, y_upper(spec), 200)?;
    let x = prey_for_rate(spec, y, rate_needed(spec, spec.delay.tau(y)))?;
    Some((x, y))
}

/// Newton on `(r x (1 − x/K) − f y, n e^{−d_j τ(y)} f − d)`, keeping the
/// best iterate.
fn polish(spec: &ModelSpec, mut x: f64, mut y: f64) -> (f64, f64) {
    let p = &spec.params;
    let f = &spec.response;
    let score = |x: f64, y: f64| residual(spec, x, y, yj_star(spec, x, y));
    let mut best = (x, y, score(x, y));
    for _ in 0..20 {
        let fv = f.rate(x, y);
        let fx = f.d_prey(x, y);
        let fy = f.d_predator(x, y);
        let e = spec.survival(spec.delay.tau(y));
        let g1 = p.r * x * (1.0 - x / p.k) - fv * y;
        let g2 = p.n * e * fv - p.d;
        let j11 = p.r * (1.0 - 2.0 * x / p.k) - fx * y;
        let j12 = -(fv + fy * y);
        let j21 = p.n * e * fx;
        let j22 = p.n * e * (fy - p.dj * spec.delay.tau_prime(y) * fv);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (g1 * j22 - g2 * j12) / det;
        let dy = (j11 * g2 - j21 * g1) / det;
        let (nx, ny) = (x - dx, y - dy);
        if !(nx > 0.0 && ny > 0.0) {
            break;
        }
        x = nx;
        y = ny;
        let s = score(x, y);
        if s < best.2 {
            best = (x, y, s);
        }
        if dx.abs() <= 1e-16 * x && dy.abs() <= 1e-16 * y {
            break;
        }
    }
    (best.0, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayFunction, ModelParams};

    fn bd(tau: DelayFunction) -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 10.0, n: 1.0, dj: 0.1, d: 0.5 },
            delay: tau,
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.1, k2: 1.0 },
        }
    }

    #[test]
    fn boundary_points() {
        let s = bd(DelayFunction::constant(1.0));
        let b = boundary_equilibria(&s);
        assert_eq!((b[0].x, b[0].y, b[0].yj), (0.0, 0.0, 0.0));
        assert_eq!((b[1].x, b[1].y, b[1].yj), (10.0, 0.0, 0.0));
        assert_eq!(b[1].residual, 0.0);
    }

    #[test]
    fn bd_coexistence_has_small_residual() {
        let s = bd(DelayFunction::constant(1.0));
        let eq = solve_coexistence(&s).unwrap();
        assert!(eq.residual <= RESIDUAL_TOL);
        assert!(eq.x > 0.0 && eq.x < 10.0 && eq.y > 0.0);
    }

    #[test]
    fn general_solver_matches_closed_form() {
        let s = bd(DelayFunction::saturating(0.5, 2.0, 1.0));
        let closed = bd_closed_form(&s).unwrap();
        let general = nested_fixed_point(&s).unwrap();
        let fallback = reduced_bisection(&s).unwrap();
        assert!((closed.0 - general.0).abs() < 1e-9 && (closed.1 - general.1).abs() < 1e-9);
        assert!((fallback.0 - general.0).abs() < 1e-9 && (fallback.1 - general.1).abs() < 1e-9);
    }

    #[test]
    fn subcritical_is_not_found() {
        let mut s = bd(DelayFunction::constant(1.0));
        s.params.d = 50.0;
        assert!(matches!(solve_coexistence(&s), Err(EquilibriumError::NotFound { .. })));
    }

    #[test]
    fn juvenile_limits() {
        let mut s = bd(DelayFunction::constant(2.0));
        s.params.dj = 0.0;
        let f = s.response.rate(3.0, 1.0);
        assert_eq!(yj_star(&s, 3.0, 1.0), f * 2.0);
        assert_eq!(yj_star(&s, 3.0, 0.0), 0.0);
    }

    #[test]
    fn holling_ii_coexistence() {
        let s = ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 0.4 },
            delay: DelayFunction::saturating(0.5, 1.5, 1.0),
            response: FunctionalResponse::HollingII { b: 1.0, h: 0.5 },
        };
        let eq = solve_coexistence(&s).unwrap();
        assert!(eq.residual <= RESIDUAL_TOL, "{eq:?}");
    }
}
