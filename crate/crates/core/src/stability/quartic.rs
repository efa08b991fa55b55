//! Positive-root test for `h(v) = v⁴ + Q1 v³ + Q2 v² + Q3 v + Q4`.

use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuarticCase {
    /// `Q4 < 0`: `h(0) < 0` and `h → +∞`, so a positive root exists.
    NegativeConstant,
    /// `Q4 ≥ 0`, `Δ ≥ 0`: one real critical point `v1`.
    SingleCriticalPoint,
    /// `Q4 ≥ 0`, `Δ < 0`: three real critical points.
    ThreeCriticalPoints,
}

/// Intermediates evaluated with the textbook-style printed expressions
/// `N = Q1³/32 − Q1 Q2/8 + Q3`, `Δ = (N/2)² + (M/2)³`. Reported for
/// reference; the decision uses [`QuarticReport::m`], [`QuarticReport::n`]
/// and [`QuarticReport::delta`], which are the depressed-cubic quantities
/// of `h'(v) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrintedIntermediates {
    pub m: f64,
    pub n: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticReport {
    pub q: [f64; 4],
    /// `Q2/2 − 3 Q1²/16`
    pub m: f64,
    /// `Q1³/32 − Q1 Q2/8 + Q3/4`
    pub n: f64,
    /// `(N/2)² + (M/3)³`
    pub delta: f64,
    pub printed: PrintedIntermediates,
    /// Cardano roots of the depressed cubic `Y³ + M Y + N = 0`.
    #[serde(serialize_with = "complex_triple")]
    pub y: [Complex64; 3],
    /// Critical points of `h`: `v_i = Y_i − Q1/4`.
    #[serde(serialize_with = "complex_triple")]
    pub v: [Complex64; 3],
    pub has_positive_root: bool,
    pub case: QuarticCase,
}

fn complex_triple<S: serde::Serializer>(v: &[Complex64; 3], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

const IMAG_TOL: f64 = 1e-9;

pub fn eval_quartic(q: &[f64; 4], v: f64) -> f64 {
    (((v + q[0]) * v + q[1]) * v + q[2]) * v + q[3]
}

/// Decides whether `h` has a positive real root from the constant term
/// and the values of `h` at its critical points.
///
/// Cube roots follow `σ = (−1 + √3 i)/2`: `Y1 = u + w`,
/// `Y2 = σ u + σ² w`, `Y3 = σ² u + σ w`, where `u, w` are the real cube
/// roots when `Δ ≥ 0` and principal complex-conjugate cube roots when
/// `Δ < 0`. Critical points with `|Im v| > 1e−9` are not candidates.
pub fn quartic_classify(q1: f64, q2: f64, q3: f64, q4: f64) -> QuarticReport {
    let q = [q1, q2, q3, q4];
    let m = q2 / 2.0 - 3.0 * q1 * q1 / 16.0;
    let n = q1.powi(3) / 32.0 - q1 * q2 / 8.0 + q3 / 4.0;
    let delta = (n / 2.0).powi(2) + (m / 3.0).powi(3);
    let pn = q1.powi(3) / 32.0 - q1 * q2 / 8.0 + q3;
    let printed = PrintedIntermediates { m, n: pn, delta: (pn / 2.0).powi(2) + (m / 2.0).powi(3) };

    let sigma = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let sigma2 = sigma * sigma;
    let (u, w) = if delta >= 0.0 {
        let sd = delta.sqrt();
        (Complex64::from((-n / 2.0 + sd).cbrt()), Complex64::from((-n / 2.0 - sd).cbrt()))
    } else {
        let a = Complex64::new(-n / 2.0, (-delta).sqrt());
        let u = a.cbrt();
        (u, u.conj())
    };
    let y = [u + w, sigma * u + sigma2 * w, sigma2 * u + sigma * w];
    let shift = Complex64::from(q1 / 4.0);
    let v = [y[0] - shift, y[1] - shift, y[2] - shift];

    let (case, has_positive_root) = if q4 < 0.0 {
        (QuarticCase::NegativeConstant, true)
    } else if delta >= 0.0 {
        let v1 = v[0].re;
        (QuarticCase::SingleCriticalPoint, v1 > 0.0 && eval_quartic(&q, v1) < 0.0)
    } else {
        let found = v
            .iter()
            .filter(|z| z.im.abs() <= IMAG_TOL)
            .any(|z| z.re > 0.0 && eval_quartic(&q, z.re) <= 0.0);
        (QuarticCase::ThreeCriticalPoints, found)
    };
    QuarticReport { q, m, n, delta, printed, y, v, has_positive_root, case }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_examples() {
        let r = quartic_classify(0.0, 0.0, 0.0, -1.0);
        assert!(r.has_positive_root);
        assert_eq!(r.case, QuarticCase::NegativeConstant);
        let r = quartic_classify(0.0, 1.0, 0.0, 1.0);
        assert!(!r.has_positive_root);
    }

    #[test]
    fn critical_points_are_zeros_of_derivative() {
        let q = [1.3, -4.0, 0.7, 2.0];
        let r = quartic_classify(q[0], q[1], q[2], q[3]);
        for z in r.v {
            if z.im.abs() < 1e-9 {
                let v = z.re;
                let dh = ((4.0 * v + 3.0 * q[0]) * v + 2.0 * q[1]) * v + q[2];
                assert!(dh.abs() < 1e-9, "h'({v}) = {dh}");
            }
        }
    }

    #[test]
    fn double_well_with_positive_dip() {
        // (v² − 4)² − 1 has roots at ±√3, ±√5.
        let r = quartic_classify(0.0, -8.0, 0.0, 15.0);
        assert_eq!(r.case, QuarticCase::ThreeCriticalPoints);
        assert!(r.has_positive_root);
        // (v² − 4)² + 1 never vanishes
        assert!(!quartic_classify(0.0, -8.0, 0.0, 17.0).has_positive_root);
    }

    #[test]
    fn printed_intermediates_follow_their_formulas() {
        let r = quartic_classify(2.0, 3.0, -1.0, 0.5);
        let n = 8.0 / 32.0 - 6.0 / 8.0 - 1.0;
        assert_eq!(r.printed.n, n);
        assert_eq!(r.printed.m, 1.5 - 0.75);
        assert_eq!(r.printed.delta, (n / 2.0).powi(2) + (r.printed.m / 2.0).powi(3));
    }
}
