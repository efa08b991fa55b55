//! Local stability of equilibria with the delay frozen at its steady-state
//! value.

mod characteristic;
mod conditions;
mod contour;
mod quartic;

use serde::Serialize;
use thiserror::Error;

pub use characteristic::{Characteristic, QuasiPolynomial, ScalarFactor};
pub use conditions::{check_global_conditions, ConditionReport, Margins};
pub use contour::{positive_real_root, rightmost_abscissa, Root, SearchBox, Spectrum, SpectrumError};
pub use quartic::{eval_quartic, quartic_classify, PrintedIntermediates, QuarticCase, QuarticReport};

use crate::equilibria::{Equilibrium, EquilibriumKind};
use crate::model::{FunctionalResponse, ModelSpec};

/// Coefficients of the linearized two-dimensional system
///
/// ```text
/// u' = A u − B v
/// v' = C u(t − τ*) + D v(t − τ*) − (d − η) v
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearizationCoeffs {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub eta: f64,
    pub tau_star: f64,
}

/// Linearization at `(x*, y*)`:
/// `A = r − 2 r x*/K − f_x y*`, `B = f + f_y y*`, `C = n E f_x y*`,
/// `D = n E (f + f_y y*)`, `η = n E τ'(y*) f y* (d − d_j)` with
/// `E = e^{−d_j τ(y*)}`.
pub fn linearize_at(spec: &ModelSpec, eq: &Equilibrium) -> LinearizationCoeffs {
    let p = &spec.params;
    let (x, y) = (eq.x, eq.y);
    let f = spec.response.rate(x, y);
    let fx = spec.response.d_prey(x, y);
    let fy = spec.response.d_predator(x, y);
    let tau_star = spec.delay.tau(y);
    let ne = p.n * spec.survival(tau_star);
    LinearizationCoeffs {
        a: p.r - 2.0 * p.r * x / p.k - fx * y,
        b: f + fy * y,
        c: ne * fx * y,
        d: ne * (f + fy * y),
        eta: ne * spec.delay.tau_prime(y) * f * y * (p.d - p.dj),
        tau_star,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    Unstable,
    NeutrallyStable,
    LocallyAsymptoticallyStable,
    Unsupported,
}

impl StabilityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Unstable => "unstable",
            Self::NeutrallyStable => "neutrally_stable",
            Self::LocallyAsymptoticallyStable => "locally_asymptotically_stable",
            Self::Unsupported => "unsupported",
        }
    }
}

/// How the verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Sign of `n e^{−d_j τ(0)} f(K, 0) − d` (or the root `λ = r` at the
    /// origin).
    Threshold,
    /// Zero-lag stability plus absence of purely imaginary roots.
    Algebraic,
    /// Rightmost computed root.
    Numeric,
}

/// Data of the algebraic test at a coexistence point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraicTest {
    pub h1_plus_n1: f64,
    pub h2_plus_n2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Classifier run on `v⁴ + B1 v² + B2`.
    pub quartic: QuarticReport,
    /// Positive root of `w² + B1 w + B2` in `w = v²`.
    pub quadratic_positive_root: bool,
    pub no_imaginary_roots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: StabilityVerdict,
    pub route: Route,
    pub coefficients: LinearizationCoeffs,
    pub characteristic: QuasiPolynomial,
    pub algebraic: Option<AlgebraicTest>,
    pub spectrum: Spectrum,
    /// Verdict implied by the rightmost root alone.
    pub numeric_verdict: StabilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("condition check needs a Beddington-DeAngelis response, got {0}")]
    NotBeddingtonDeAngelis(&'static str),
    #[error("condition check needs a coexistence equilibrium")]
    NotCoexistence,
}

/// Real parts within this distance of zero count as neutral.
pub const NEUTRAL_BAND: f64 = 1e-8;

fn verdict_from_abscissa(re: f64) -> StabilityVerdict {
    if re < -NEUTRAL_BAND {
        StabilityVerdict::LocallyAsymptoticallyStable
    } else if re > NEUTRAL_BAND {
        StabilityVerdict::Unstable
    } else {
        StabilityVerdict::NeutrallyStable
    }
}

/// Default search box for a linearization: real parts in
/// `[−(d + |A| + |D| + 1), ·]`.
pub fn linearization_box(qp: &QuasiPolynomial, coeffs: &LinearizationCoeffs, d: f64) -> SearchBox {
    SearchBox::covering(qp, -(d + coeffs.a.abs() + coeffs.d.abs() + 1.0))
}

/// Absence of positive roots of `v⁴ + B1 v² + B2`.
pub fn algebraic_test(qp: &QuasiPolynomial, tau_prime: f64) -> AlgebraicTest {
    let (b1, b2) = qp.imaginary_axis_quartic();
    let quartic = quartic_classify(0.0, b1, 0.0, b2);
    let quadratic_positive_root = b2 < 0.0 || (b1 < 0.0 && b1 * b1 - 4.0 * b2 >= 0.0);
    let has_root = if tau_prime == 0.0 { quadratic_positive_root } else { quartic.has_positive_root };
    AlgebraicTest {
        h1_plus_n1: qp.h1 + qp.n1,
        h2_plus_n2: qp.h2 + qp.n2,
        b1,
        b2,
        quartic,
        quadratic_positive_root,
        no_imaginary_roots: !has_root,
    }
}

/// Classifies an equilibrium.
///
/// * `E0`: always unstable (root `λ = r`).
/// * `E1`: by the sign of `n e^{−d_j τ(0)} f(K, 0) − d`, neutral when the
///   two agree to relative `1e−12`.
/// * Coexistence with a Beddington–DeAngelis response and `d ≤ d_j`:
///   unstable if `H2 + N2 < 0`; stable if `H1 + N1 > 0`, `H2 + N2 > 0` and
///   there is no purely imaginary root; otherwise by the rightmost root.
/// * Any other coexistence point: `Unsupported`, with the numeric verdict
///   reported alongside.
///
/// The rightmost root is always computed as a cross-check.
pub fn classify_equilibrium(spec: &ModelSpec, eq: &Equilibrium) -> Result<Classification, StabilityError> {
    let coefficients = linearize_at(spec, eq);
    let d = spec.params.d;
    let qp = QuasiPolynomial::from_coeffs(&coefficients, d);
    let spectrum = rightmost_abscissa(&qp, linearization_box(&qp, &coefficients, d))?;
    let numeric_verdict = verdict_from_abscissa(spectrum.abscissa);
    let mut algebraic = None;
    let (verdict, route) = match eq.kind {
        EquilibriumKind::Trivial => (StabilityVerdict::Unstable, Route::Threshold),
        EquilibriumKind::PredatorExtinction => {
            let gap = coefficients.d - d;
            let v = if gap.abs() <= 1e-12 * d {
                StabilityVerdict::NeutrallyStable
            } else if gap > 0.0 {
                StabilityVerdict::Unstable
            } else {
                StabilityVerdict::LocallyAsymptoticallyStable
            };
            (v, Route::Threshold)
        }
        EquilibriumKind::Coexistence => {
            let bd = matches!(spec.response, FunctionalResponse::BeddingtonDeAngelis { .. });
            if !bd || d > spec.params.dj {
                (StabilityVerdict::Unsupported, Route::Numeric)
            } else {
                let test = algebraic_test(&qp, spec.delay.tau_prime(eq.y));
                let out = if test.h2_plus_n2 < 0.0 {
                    (StabilityVerdict::Unstable, Route::Algebraic)
                } else if test.h1_plus_n1 > 0.0 && test.h2_plus_n2 > 0.0 && test.no_imaginary_roots {
                    (StabilityVerdict::LocallyAsymptoticallyStable, Route::Algebraic)
                } else {
                    (numeric_verdict, Route::Numeric)
                };
                algebraic = Some(test);
                out
            }
        }
    };
    Ok(Classification { verdict, route, coefficients, characteristic: qp, algebraic, spectrum, numeric_verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{boundary_equilibria, solve_coexistence};
    use crate::model::{DelayFunction, ModelParams};

    fn spec(d: f64) -> ModelSpec {
        ModelSpec {
            params: ModelParams { r: 1.0, k: 2.0, n: 1.0, dj: 0.5, d },
            delay: DelayFunction::saturating(0.5, 1.0, 2.0),
            response: FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.0, k2: 10.0 },
        }
    }

    #[test]
    fn origin_coefficients() {
        let s = spec(0.2);
        let e0 = boundary_equilibria(&s)[0];
        let c = linearize_at(&s, &e0);
        assert_eq!((c.a, c.b, c.c, c.d, c.eta), (1.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(classify_equilibrium(&s, &e0).unwrap().verdict, StabilityVerdict::Unstable);
    }

    #[test]
    fn capacity_point_coefficients_and_threshold() {
        let s = spec(0.2);
        let e1 = boundary_equilibria(&s)[1];
        let c = linearize_at(&s, &e1);
        let f = s.response.rate(2.0, 0.0);
        assert_eq!(c.a, -1.0);
        assert_eq!(c.b, f);
        assert_eq!(c.c, 0.0);
        assert_eq!(c.eta, 0.0);
        assert!((c.d - (-0.25f64).exp() * f).abs() < 1e-15);
        let cl = classify_equilibrium(&s, &e1).unwrap();
        assert_eq!(cl.verdict, StabilityVerdict::Unstable);
        assert_eq!(cl.numeric_verdict, StabilityVerdict::Unstable);

        let s = spec(10.0);
        let cl = classify_equilibrium(&s, &boundary_equilibria(&s)[1]).unwrap();
        assert_eq!(cl.verdict, StabilityVerdict::LocallyAsymptoticallyStable);
        assert_eq!(cl.numeric_verdict, StabilityVerdict::LocallyAsymptoticallyStable);
    }

    #[test]
    fn coefficient_identity_at_coexistence() {
        let s = spec(0.2);
        let eq = solve_coexistence(&s).unwrap();
        let c = linearize_at(&s, &eq);
        let qp = QuasiPolynomial::from_coeffs(&c, 0.2);
        let lhs = qp.h2 + qp.n2;
        let rhs = c.a * (c.d - 0.2 + c.eta) + c.b * c.c;
        assert!((lhs - rhs).abs() < 1e-14);
        assert!(lhs > 0.0);
        let cl = classify_equilibrium(&s, &eq).unwrap();
        assert_eq!(cl.verdict, StabilityVerdict::LocallyAsymptoticallyStable);
        assert_eq!(cl.route, Route::Algebraic);
        assert!(cl.spectrum.abscissa < -NEUTRAL_BAND);
    }

    #[test]
    fn constant_delay_has_no_eta() {
        let mut s = spec(0.2);
        s.delay = DelayFunction::constant(0.7);
        let eq = solve_coexistence(&s).unwrap();
        assert_eq!(linearize_at(&s, &eq).eta, 0.0);
    }

    #[test]
    fn non_bd_coexistence_is_unsupported() {
        let s = ModelSpec { response: FunctionalResponse::HollingII { b: 2.0, h: 0.5 }, ..spec(0.2) };
        let eq = solve_coexistence(&s).unwrap();
        assert_eq!(classify_equilibrium(&s, &eq).unwrap().verdict, StabilityVerdict::Unsupported);
    }
}
