//! Functional-response catalog `f(x, y)`: per-predator prey consumption as a
//! function of prey density `x` and mature-predator density `y`.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Catalog of functional responses with their coefficients.
///
/// JSON form is `{"kind": "...", "coefficients": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coefficients")]
pub enum FunctionalResponse {
    /// `b x`
    #[serde(rename = "linear")]
    Linear { b: f64 },
    /// `b x^k`, `k > 1`
    #[serde(rename = "power_law")]
    PowerLaw { b: f64, k: f64 },
    /// `a x` for `x <= b`, `a b` beyond.
    #[serde(rename = "holling_i")]
    HollingI { a: f64, b: f64 },
    /// `b x / (1 + b h x)`
    #[serde(rename = "holling_ii")]
    HollingII { b: f64, h: f64 },
    /// `b x^2 / (1 + b h x^2)`
    #[serde(rename = "holling_iii")]
    HollingIII { b: f64, h: f64 },
    /// `b x^k / (1 + b h x^k)`, `k > 1`
    #[serde(rename = "saturation")]
    Saturation { b: f64, h: f64, k: f64 },
    /// `b (1 - e^{-c x})`
    #[serde(rename = "ivlev")]
    Ivlev { b: f64, c: f64 },
    /// `b x / (1 + k1 x + k2 y)`
    #[serde(rename = "beddington_deangelis")]
    BeddingtonDeAngelis { b: f64, k1: f64, k2: f64 },
    /// `b x / ((1 + k1 x)(1 + k2 y))`
    #[serde(rename = "crowley_martin")]
    CrowleyMartin { b: f64, k1: f64, k2: f64 },
}

impl FunctionalResponse {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::PowerLaw { .. } => "power_law",
            Self::HollingI { .. } => "holling_i",
            Self::HollingII { .. } => "holling_ii",
            Self::HollingIII { .. } => "holling_iii",
            Self::Saturation { .. } => "saturation",
            Self::Ivlev { .. } => "ivlev",
            Self::BeddingtonDeAngelis { .. } => "beddington_deangelis",
            Self::CrowleyMartin { .. } => "crowley_martin",
        }
    }

    /// Checked evaluation; negative densities are a domain error.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, ModelError> {
        if !(x >= 0.0) || !(y >= 0.0) {
            return Err(ModelError::NegativeDensity { x, y });
        }
        Ok(self.rate(x, y))
    }

    /// Unchecked evaluation for hot paths. Inputs are expected to be
    /// nonnegative; callers in the integrator clamp stage values first.
    pub fn rate(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Linear { b } => b * x,
            Self::PowerLaw { b, k } => b * x.powf(k),
            Self::HollingI { a, b } => {
                if x <= b {
                    a * x
                } else {
                    a * b
                }
            }
            Self::HollingII { b, h } => b * x / (1.0 + b * h * x),
            Self::HollingIII { b, h } => {
                let x2 = x * x;
                b * x2 / (1.0 + b * h * x2)
            }
            Self::Saturation { b, h, k } => {
                let xk = x.powf(k);
                b * xk / (1.0 + b * h * xk)
            }
            Self::Ivlev { b, c } => -b * (-c * x).exp_m1(),
            Self::BeddingtonDeAngelis { b, k1, k2 } => b * x / (1.0 + k1 * x + k2 * y),
            Self::CrowleyMartin { b, k1, k2 } => b * x / ((1.0 + k1 * x) * (1.0 + k2 * y)),
        }
    }

    /// `∂f/∂x`. Holling I uses the left derivative `a` at the kink `x = b`.
    pub fn d_prey(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Linear { b } => b,
            Self::PowerLaw { b, k } => {
                if x == 0.0 {
                    if k > 1.0 {
                        0.0
                    } else if k == 1.0 {
                        b
                    } else {
                        f64::INFINITY
                    }
                } else {
                    b * k * x.powf(k - 1.0)
                }
            }
            Self::HollingI { a, b } => {
                if x <= b {
                    a
                } else {
                    0.0
                }
            }
            Self::HollingII { b, h } => {
                let den = 1.0 + b * h * x;
                b / (den * den)
            }
            Self::HollingIII { b, h } => {
                let den = 1.0 + b * h * x * x;
                2.0 * b * x / (den * den)
            }
            Self::Saturation { b, h, k } => {
                if x == 0.0 {
                    return if k > 1.0 { 0.0 } else if k == 1.0 { b } else { f64::INFINITY };
                }
                let xk = x.powf(k);
                let den = 1.0 + b * h * xk;
                b * k * x.powf(k - 1.0) / (den * den)
            }
            Self::Ivlev { b, c } => b * c * (-c * x).exp(),
            Self::BeddingtonDeAngelis { b, k1, k2 } => {
                let den = 1.0 + k1 * x + k2 * y;
                b * (1.0 + k2 * y) / (den * den)
            }
            Self::CrowleyMartin { b, k1, k2 } => {
                let px = 1.0 + k1 * x;
                b / (px * px * (1.0 + k2 * y))
            }
        }
    }

    /// `∂f/∂y`; zero for the prey-only forms.
    pub fn d_predator(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::BeddingtonDeAngelis { b, k1, k2 } => {
                let den = 1.0 + k1 * x + k2 * y;
                -b * k2 * x / (den * den)
            }
            Self::CrowleyMartin { b, k1, k2 } => {
                let py = 1.0 + k2 * y;
                -b * k2 * x / ((1.0 + k1 * x) * py * py)
            }
            _ => 0.0,
        }
    }

    /// Whether the response depends on predator density at all.
    pub fn is_predator_dependent(&self) -> bool {
        matches!(
            self,
            Self::BeddingtonDeAngelis { .. } | Self::CrowleyMartin { .. }
        )
    }

    /// Location of a non-smooth point in `x`, if the form has one.
    pub fn kink(&self) -> Option<f64> {
        match *self {
            Self::HollingI { b, .. } => Some(b),
            _ => None,
        }
    }

    /// Coefficient constraints for the declared kind. Returns a list of
    /// violated constraints, empty when consistent.
    pub fn coefficient_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                bad.push(format!("{name} must be positive and finite (got {v})"));
            }
        };
        match *self {
            Self::Linear { b } => positive("b", b),
            Self::PowerLaw { b, k } => {
                positive("b", b);
                if !(k > 1.0) {
                    bad.push(format!("power_law requires k > 1 (got {k})"));
                }
            }
            Self::HollingI { a, b } => {
                positive("a", a);
                positive("b", b);
            }
            Self::HollingII { b, h } | Self::HollingIII { b, h } => {
                positive("b", b);
                positive("h", h);
            }
            Self::Saturation { b, h, k } => {
                positive("b", b);
                positive("h", h);
                if !(k > 1.0) {
                    bad.push(format!("saturation requires k > 1 (got {k})"));
                }
            }
            Self::Ivlev { b, c } => {
                positive("b", b);
                positive("c", c);
            }
            Self::BeddingtonDeAngelis { b, k1, k2 } | Self::CrowleyMartin { b, k1, k2 } => {
                positive("b", b);
                for (name, v) in [("k1", k1), ("k2", k2)] {
                    if !(v >= 0.0) || !v.is_finite() {
                        bad.push(format!("{name} must be nonnegative and finite (got {v})"));
                    }
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holling_ii_value() {
        let f = FunctionalResponse::HollingII { b: 2.0, h: 0.5 };
        assert_eq!(f.eval(1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn bd_with_zero_interference_is_linear() {
        let f = FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.0, k2: 0.0 };
        assert_eq!(f.eval(3.0, 7.0).unwrap(), 3.0);
    }

    #[test]
    fn zero_prey_gives_zero_rate() {
        let all = [
            FunctionalResponse::Linear { b: 1.3 },
            FunctionalResponse::PowerLaw { b: 1.3, k: 2.5 },
            FunctionalResponse::HollingI { a: 2.0, b: 0.7 },
            FunctionalResponse::HollingII { b: 2.0, h: 0.5 },
            FunctionalResponse::HollingIII { b: 2.0, h: 0.5 },
            FunctionalResponse::Saturation { b: 2.0, h: 0.5, k: 1.5 },
            FunctionalResponse::Ivlev { b: 2.0, c: 0.4 },
            FunctionalResponse::BeddingtonDeAngelis { b: 1.0, k1: 0.2, k2: 0.4 },
            FunctionalResponse::CrowleyMartin { b: 1.0, k1: 0.2, k2: 0.4 },
        ];
        for f in all {
            for y in [0.0, 0.5, 10.0] {
                assert_eq!(f.eval(0.0, y).unwrap(), 0.0, "{}", f.kind_name());
            }
        }
    }

    #[test]
    fn negative_density_is_domain_error() {
        let f = FunctionalResponse::Linear { b: 1.0 };
        assert!(matches!(f.eval(-1.0, 0.0), Err(ModelError::NegativeDensity { .. })));
        assert!(f.eval(1.0, -1e-9).is_err());
    }

    #[test]
    fn holling_i_kink_uses_left_derivative() {
        let f = FunctionalResponse::HollingI { a: 2.0, b: 1.0 };
        assert_eq!(f.d_prey(1.0, 0.0), 2.0);
        assert_eq!(f.d_prey(1.0 + 1e-12, 0.0), 0.0);
        assert_eq!(f.rate(5.0, 0.0), 2.0);
    }

    #[test]
    fn json_shape() {
        let f = FunctionalResponse::HollingII { b: 2.0, h: 0.5 };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"kind":"holling_ii","coefficients":{"b":2.0,"h":0.5}}"#);
        let back: FunctionalResponse = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn power_law_with_unit_exponent_is_inconsistent() {
        let f = FunctionalResponse::PowerLaw { b: 1.0, k: 1.0 };
        assert_eq!(f.coefficient_violations().len(), 1);
    }
}
