//! Laws ν on [0, ∞) for point dendrons.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointLaw {
    Dirac {
        a: f64,
    },
    /// pmf q (1 - q)^(ℓ - 1) on ℓ = 1, 2, …
    Geometric1 {
        q: f64,
    },
    /// Uniform over the listed values.
    Empirical {
        values: Vec<f64>,
    },
    /// pmf over 0, 1, 2, … given by index.
    Discrete {
        pmf: Vec<f64>,
    },
}

impl PointLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PointLaw::Dirac { a } => *a >= 0.0 && a.is_finite(),
            PointLaw::Geometric1 { q } => *q > 0.0 && *q <= 1.0,
            PointLaw::Empirical { values } => !values.is_empty() && values.iter().all(|v| *v >= 0.0 && v.is_finite()),
            PointLaw::Discrete { pmf } => pmf.iter().all(|p| *p >= 0.0) && (pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid point law {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PointLaw::Dirac { a } => *a,
            PointLaw::Geometric1 { q } => {
                if *q >= 1.0 {
                    return 1.0;
                }
                // inversion: ⌈ln U / ln(1 - q)⌉ with U in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                (u.ln() / (1.0 - q).ln()).ceil().max(1.0)
            }
            PointLaw::Empirical { values } => values[rng.random_range(0..values.len())],
            PointLaw::Discrete { pmf } => {
                let mut u = rng.random::<f64>();
                for (k, &p) in pmf.iter().enumerate() {
                    if u < p {
                        return k as f64;
                    }
                    u -= p;
                }
                pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0) as f64
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            PointLaw::Dirac { a } => *a,
            PointLaw::Geometric1 { q } => 1.0 / q,
            PointLaw::Empirical { values } => values.iter().sum::<f64>() / values.len() as f64,
            PointLaw::Discrete { pmf } => pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum(),
        }
    }

    /// Mass at an integer point, for laws supported on the naturals.
    pub fn pmf(&self, k: usize) -> f64 {
        match self {
            PointLaw::Dirac { a } => f64::from(u8::from(*a == k as f64)),
            PointLaw::Geometric1 { q } => {
                if k == 0 {
                    0.0
                } else {
                    q * (1.0 - q).powi(k as i32 - 1)
                }
            }
            PointLaw::Empirical { values } => {
                values.iter().filter(|&&v| v == k as f64).count() as f64 / values.len() as f64
            }
            PointLaw::Discrete { pmf } => pmf.get(k).copied().unwrap_or(0.0),
        }
    }
}
