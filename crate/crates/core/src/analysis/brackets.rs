use serde::Serialize;

use super::AnalysisError;
use crate::equilibria::Equilibrium;
use crate::model::{FunctionalResponse, ModelSpec};

/// Which lag freezes the survival factor `e^{−d_j τ̂}` in the bracket
/// recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauHat {
    /// `τ(0)`.
    AtZero,
    /// `τ(y*)`.
    #[default]
    AtEquilibrium,
}

/// Nested over/under estimates for the Beddington–DeAngelis model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketSequences {
    pub epsilon: f64,
    pub tau_hat: TauHat,
    pub x_over: Vec<f64>,
    pub x_under: Vec<f64>,
    pub y_over: Vec<f64>,
    pub y_under: Vec<f64>,
    /// Last elements `(x̄, x̲, ȳ, y̲)`.
    pub limits: [f64; 4],
    /// `b K (n b E − d k1) / (k2 d r)`; the recursion contracts when this is
    /// below one.
    pub contraction_factor: f64,
    /// `(n b E − d k1) / (k2 d)`, the slope relating the `y` and `x` widths.
    pub width_slope: f64,
}

struct Maps {
    k: f64,
    r: f64,
    b: f64,
    k1: f64,
    k2: f64,
    nbe: f64,
    d: f64,
}

impl Maps {
    fn y_of(&self, x: f64) -> f64 {
        (self.nbe * x - self.d * (1.0 + self.k1 * x)) / (self.k2 * self.d)
    }

    fn x_of(&self, y: f64) -> f64 {
        self.k * (1.0 - self.b * y / (self.r * (1.0 + self.k2 * y)))
    }
}

/// Iterates
///
/// ```text
/// x̄_1 = K + ε,               x̄_n = K [1 − b y̲_{n−1} / (r (1 + k2 y̲_{n−1}))] + ε
/// ȳ_n = (n b E x̄_n − d (1 + k1 x̄_n)) / (k2 d) + ε
/// x̲_n = K [1 − b ȳ_n / (r (1 + k2 ȳ_n))] − ε
/// y̲_n = (n b E x̲_n − d (1 + k1 x̲_n)) / (k2 d) − ε
/// ```
///
/// with `E = e^{−d_j τ̂}`, stopping after `n_iter` rounds or when all four
/// sequences stall. Fails at the first index where the sequences stop
/// being monotone, stop nesting, or no longer contain `(x*, y*)`.
pub fn monotone_bounds(
    spec: &ModelSpec,
    eq: &Equilibrium,
    epsilon: f64,
    n_iter: usize,
    tau_hat: TauHat,
) -> Result<BracketSequences, AnalysisError> {
    let FunctionalResponse::BeddingtonDeAngelis { b, k1, k2 } = spec.response else {
        return Err(AnalysisError::NotBeddingtonDeAngelis);
    };
    if !(k2 > 0.0) {
        return Err(AnalysisError::NotBeddingtonDeAngelis);
    }
    let p = &spec.params;
    let tau = match tau_hat {
        TauHat::AtZero => spec.delay.tau(0.0),
        TauHat::AtEquilibrium => spec.delay.tau(eq.y),
    };
    let nbe = p.n * b * spec.survival(tau);
    let maps = Maps { k: p.k, r: p.r, b, k1, k2, nbe, d: p.d };
    let mut out = BracketSequences {
        epsilon,
        tau_hat,
        x_over: Vec::new(),
        x_under: Vec::new(),
        y_over: Vec::new(),
        y_under: Vec::new(),
        limits: [f64::NAN; 4],
        contraction_factor: b * p.k * (nbe - p.d * k1) / (k2 * p.d * p.r),
        width_slope: (nbe - p.d * k1) / (k2 * p.d),
    };
    for i in 0..n_iter.max(1) {
        let xo = if i == 0 { p.k + epsilon } else { maps.x_of(out.y_under[i - 1]) + epsilon };
        let yo = maps.y_of(xo) + epsilon;
        let xu = maps.x_of(yo) - epsilon;
        let yu = maps.y_of(xu) - epsilon;
        out.x_over.push(xo);
        out.y_over.push(yo);
        out.x_under.push(xu);
        out.y_under.push(yu);
        out.limits = [xo, xu, yo, yu];
        if let Some(detail) = nesting_problem(&out, i, eq) {
            return Err(AnalysisError::Nesting { index: i, detail, partial: Box::new(out) });
        }
        if i > 0 {
            let stalled = [&out.x_over, &out.x_under, &out.y_over, &out.y_under]
                .iter()
                .all(|s| (s[i] - s[i - 1]).abs() <= 1e-15 * s[i].abs().max(1.0));
            if stalled {
                break;
            }
        }
    }
    Ok(out)
}

fn nesting_problem(s: &BracketSequences, i: usize, eq: &Equilibrium) -> Option<String> {
    let (xo, xu, yo, yu) = (s.x_over[i], s.x_under[i], s.y_over[i], s.y_under[i]);
    // roundoff allowance once a sequence has converged
    let slack = |v: f64| 4.0 * f64::EPSILON * v.abs().max(1.0);
    if i > 0 {
        if xo > s.x_over[i - 1] + slack(xo) {
            return Some(format!("x_over increased to {xo}"));
        }
        if yo > s.y_over[i - 1] + slack(yo) {
            return Some(format!("y_over increased to {yo}"));
        }
        if xu < s.x_under[i - 1] - slack(xu) {
            return Some(format!("x_under decreased to {xu}"));
        }
        if yu < s.y_under[i - 1] - slack(yu) {
            return Some(format!("y_under decreased to {yu}"));
        }
    }
    if !(xu <= xo && yu <= yo) {
        return Some(format!("under exceeds over (x: {xu} > {xo} or y: {yu} > {yo})"));
    }
    if !(xu <= eq.x && eq.x <= xo) {
        return Some(format!("x* = {} outside [{xu}, {xo}]", eq.x));
    }
    if !(yu <= eq.y && eq.y <= yo) {
        return Some(format!("y* = {} outside [{yu}, {yo}]", eq.y));
    }
    None
}

/// Bracket limits for several `ε` and their polynomial extrapolation to
/// `ε = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolatedBounds {
    pub runs: Vec<BracketSequences>,
    /// Extrapolated `(x̄, x̲, ȳ, y̲)`.
    pub extrapolated: [f64; 4],
    /// Largest distance from an extrapolated limit to the matching
    /// equilibrium component.
    pub gap_to_equilibrium: f64,
}

/// Runs [`monotone_bounds`] for each `ε` and fits the limits by the
/// interpolating polynomial in `ε`, evaluated at zero.
pub fn extrapolated_bounds(
    spec: &ModelSpec,
    eq: &Equilibrium,
    epsilons: &[f64],
    n_iter: usize,
    tau_hat: TauHat,
) -> Result<ExtrapolatedBounds, AnalysisError> {
    let runs = epsilons
        .iter()
        .map(|&e| monotone_bounds(spec, eq, e, n_iter, tau_hat))
        .collect::<Result<Vec<_>, _>>()?;
    let mut extrapolated = [0.0; 4];
    for (c, slot) in extrapolated.iter_mut().enumerate() {
        let pts: Vec<(f64, f64)> = runs.iter().map(|r| (r.epsilon, r.limits[c])).collect();
        *slot = neville_at_zero(&pts);
    }
    let target = [eq.x, eq.x, eq.y, eq.y];
    let gap = extrapolated.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ExtrapolatedBounds { runs, extrapolated, gap_to_equilibrium: gap })
}

fn neville_at_zero(pts: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = pts.iter().map(|q| q.1).collect();
    let n = pts.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (pts[i].0, pts[i + m].0);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve_coexistence;
    use crate::model::{DelayFunction, ModelParams};

    fn spec(k1: f64) -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d: 0.2 },
            delay: DelayFunction::saturating(0.5, 1.0, 2.0),
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1, k2: 10.0 },
        }
    }

    #[test]
    fn neville_recovers_quadratic() {
        let f = |e: f64| 3.0 - 2.0 * e + 5.0 * e * e;
        let pts: Vec<(f64, f64)> = [0.1, 0.01, 0.001].iter().map(|&e| (e, f(e))).collect();
        assert!((neville_at_zero(&pts) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn brackets_nest_and_close_on_equilibrium() {
        let s = spec(0.0);
        let eq = solve_coexistence(&s).unwrap();
        let b = monotone_bounds(&s, &eq, 1e-3, 200, TauHat::AtEquilibrium).unwrap();
        assert!(b.contraction_factor < 1.0);
        let [xo, xu, yo, yu] = b.limits;
        assert!((yo - yu - (b.width_slope * (xo - xu) + 2e-3)).abs() < 1e-10);
        let ex = extrapolated_bounds(&s, &eq, &[1e-2, 1e-3, 1e-4], 200, TauHat::AtEquilibrium).unwrap();
        assert!(ex.gap_to_equilibrium < 1e-6, "{}", ex.gap_to_equilibrium);
    }

    #[test]
    fn prey_interference_breaks_containment() {
        let s = spec(0.3);
        let eq = solve_coexistence(&s).unwrap();
        let r = monotone_bounds(&s, &eq, 1e-6, 200, TauHat::AtEquilibrium);
        assert!(matches!(r, Err(AnalysisError::Nesting { .. })));
    }
}
