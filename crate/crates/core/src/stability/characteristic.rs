use num_complex::Complex64;
use serde::Serialize;

use super::LinearizationCoeffs;

/// An entire characteristic function of retarded type.
pub trait Characteristic: Sync {
    fn eval(&self, lambda: Complex64) -> Complex64;
    fn derivative(&self, lambda: Complex64) -> Complex64;

    /// Radius `ρ` such that every root with `Re λ ≥ re_min` has `|λ| ≤ ρ`.
    fn modulus_bound(&self, re_min: f64) -> f64;

    /// Sum of term magnitudes at `λ`, used to judge when `|G(λ)|` is
    /// negligibly small.
    fn scale(&self, lambda: Complex64) -> f64;

    /// The lag `τ`; sets the sampling density along contour edges.
    fn lag(&self) -> f64;
}

/// `G(λ) = λ² + H1 λ + H2 + (N1 λ + N2) e^{−λτ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiPolynomial {
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "N1")]
    pub n1: f64,
    #[serde(rename = "N2")]
    pub n2: f64,
    pub tau: f64,
}

impl QuasiPolynomial {
    /// Builds the characteristic function of the frozen-delay linearization
    /// for mature death rate `d`:
    /// `H1 = d − η − A`, `H2 = Aη − Ad`, `N1 = −D`, `N2 = AD + BC`.
    pub fn from_coeffs(c: &LinearizationCoeffs, d: f64) -> Self {
        Self {
            h1: d - c.eta - c.a,
            h2: c.a * c.eta - c.a * d,
            n1: -c.d,
            n2: c.a * c.d + c.b * c.c,
            tau: c.tau_star,
        }
    }

    /// `B1 = H1² − 2 H2 − N1²`, `B2 = H2² − N2²`: coefficients of
    /// `v⁴ + B1 v² + B2`, whose positive roots are the frequencies of purely
    /// imaginary roots `λ = i v`.
    pub fn imaginary_axis_quartic(&self) -> (f64, f64) {
        (self.h1 * self.h1 - 2.0 * self.h2 - self.n1 * self.n1, self.h2 * self.h2 - self.n2 * self.n2)
    }
}

impl Characteristic for QuasiPolynomial {
    fn eval(&self, l: Complex64) -> Complex64 {
        l * l + self.h1 * l + self.h2 + (self.n1 * l + self.n2) * (-l * self.tau).exp()
    }

    fn derivative(&self, l: Complex64) -> Complex64 {
        let e = (-l * self.tau).exp();
        2.0 * l + self.h1 + (self.n1 - self.tau * (self.n1 * l + self.n2)) * e
    }

    fn modulus_bound(&self, re_min: f64) -> f64 {
        // |λ|² ≤ (|H1| + |N1| w)|λ| + |H2| + |N2| w with w = sup |e^{−λτ}|
        let w = (-re_min.min(0.0) * self.tau).exp();
        let p = self.h1.abs() + self.n1.abs() * w;
        let q = self.h2.abs() + self.n2.abs() * w;
        0.5 * (p + (p * p + 4.0 * q).sqrt())
    }

    fn lag(&self) -> f64 {
        self.tau
    }

    fn scale(&self, l: Complex64) -> f64 {
        let e = (-l.re * self.tau).exp();
        l.norm_sqr() + self.h1.abs() * l.norm() + self.h2.abs() + (self.n1.abs() * l.norm() + self.n2.abs()) * e
    }
}

/// `g(λ) = λ + d − c e^{−λτ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarFactor {
    pub d: f64,
    pub c: f64,
    pub tau: f64,
}

impl Characteristic for ScalarFactor {
    fn eval(&self, l: Complex64) -> Complex64 {
        l + self.d - self.c * (-l * self.tau).exp()
    }

    fn derivative(&self, l: Complex64) -> Complex64 {
        Complex64::from(1.0) + self.c * self.tau * (-l * self.tau).exp()
    }

    fn modulus_bound(&self, re_min: f64) -> f64 {
        let w = (-re_min.min(0.0) * self.tau).exp();
        self.d.abs() + self.c.abs() * w
    }

    fn lag(&self) -> f64 {
        self.tau
    }

    fn scale(&self, l: Complex64) -> f64 {
        l.norm() + self.d.abs() + self.c.abs() * (-l.re * self.tau).exp()
    }
}
