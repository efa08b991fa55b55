//! Maturation delay laws `τ(y)` as a function of mature-predator density.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied delay law: the pair `(τ, τ')`.
#[derive(Clone)]
pub struct CustomDelay {
    tau: ScalarFn,
    tau_prime: ScalarFn,
}

impl fmt::Debug for CustomDelay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomDelay")
    }
}

#[derive(Debug, Clone)]
pub enum DelayLaw {
    /// `τ ≡ c`
    Constant { c: f64 },
    /// `τ_m + (τ_M − τ_m) y / (y + θ)`
    Saturating { theta: f64 },
    /// `τ_M − (τ_M − τ_m) e^{−λ y}`
    Exp { lambda: f64 },
    Custom(CustomDelay),
}

/// Delay law together with its declared bounds `τ_m = τ(0)` and
/// `τ_M = sup τ`.
#[derive(Debug, Clone)]
pub struct DelayFunction {
    law: DelayLaw,
    tau_m: f64,
    tau_max: f64,
}

impl DelayFunction {
    pub fn constant(c: f64) -> Self {
        Self { law: DelayLaw::Constant { c }, tau_m: c, tau_max: c }
    }

    pub fn saturating(tau_m: f64, tau_max: f64, theta: f64) -> Self {
        Self { law: DelayLaw::Saturating { theta }, tau_m, tau_max }
    }

    pub fn exponential(tau_m: f64, tau_max: f64, lambda: f64) -> Self {
        Self { law: DelayLaw::Exp { lambda }, tau_m, tau_max }
    }

    /// Arbitrary `(τ, τ')` pair with claimed bounds. The bounds are checked,
    /// not trusted, by [`crate::model::validate`].
    pub fn custom<T, D>(tau: T, tau_prime: D, tau_m: f64, tau_max: f64) -> Self
    where
        T: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            law: DelayLaw::Custom(CustomDelay { tau: Arc::new(tau), tau_prime: Arc::new(tau_prime) }),
            tau_m,
            tau_max,
        }
    }

    pub fn law(&self) -> &DelayLaw {
        &self.law
    }

    pub fn tau_m(&self) -> f64 {
        self.tau_m
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.law, DelayLaw::Constant { .. })
    }

    pub fn tau(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        match &self.law {
            DelayLaw::Constant { c } => *c,
            DelayLaw::Saturating { theta } => {
                if y == 0.0 {
                    self.tau_m
                } else {
                    self.tau_m + (self.tau_max - self.tau_m) * y / (y + theta)
                }
            }
            DelayLaw::Exp { lambda } => {
                self.tau_max - (self.tau_max - self.tau_m) * (-lambda * y).exp()
            }
            DelayLaw::Custom(c) => (c.tau)(y),
        }
    }

    pub fn tau_prime(&self, y: f64) -> f64 {
        let y = y.max(0.0);
        match &self.law {
            DelayLaw::Constant { .. } => 0.0,
            DelayLaw::Saturating { theta } => {
                let den = y + theta;
                (self.tau_max - self.tau_m) * theta / (den * den)
            }
            DelayLaw::Exp { lambda } => {
                (self.tau_max - self.tau_m) * lambda * (-lambda * y).exp()
            }
            DelayLaw::Custom(c) => (c.tau_prime)(y),
        }
    }

    /// Copy with new bounds, keeping the law's shape parameter.
    /// For the constant law both bounds collapse to `tau_m`.
    pub fn with_bounds(&self, tau_m: f64, tau_max: f64) -> Self {
        match &self.law {
            DelayLaw::Constant { .. } => Self::constant(tau_m),
            law => Self { law: law.clone(), tau_m, tau_max },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "coefficients")]
enum LawDoc {
    #[serde(rename = "constant")]
    Constant { c: f64 },
    #[serde(rename = "saturating")]
    Saturating { theta: f64 },
    #[serde(rename = "exp")]
    Exp { lambda: f64 },
}

#[derive(Serialize, Deserialize)]
struct DelayDoc {
    #[serde(flatten)]
    law: LawDoc,
    tau_m: f64,
    #[serde(rename = "tau_M")]
    tau_max: f64,
}

impl Serialize for DelayFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let law = match &self.law {
            DelayLaw::Constant { c } => LawDoc::Constant { c: *c },
            DelayLaw::Saturating { theta } => LawDoc::Saturating { theta: *theta },
            DelayLaw::Exp { lambda } => LawDoc::Exp { lambda: *lambda },
            DelayLaw::Custom(_) => {
                return Err(serde::ser::Error::custom("custom delay laws cannot be serialized"))
            }
        };
        DelayDoc { law, tau_m: self.tau_m, tau_max: self.tau_max }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DelayFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = DelayDoc::deserialize(deserializer)?;
        let law = match doc.law {
            LawDoc::Constant { c } => DelayLaw::Constant { c },
            LawDoc::Saturating { theta } => DelayLaw::Saturating { theta },
            LawDoc::Exp { lambda } => DelayLaw::Exp { lambda },
        };
        Ok(Self { law, tau_m: doc.tau_m, tau_max: doc.tau_max })
    }
}
