//! The limit each model is expected to converge to.

use serde::{Deserialize, Serialize};

use super::constants::{chi_exact, cmj_char_size};
use super::scaling::Scaling;
use crate::dendrons::PointLaw;
use crate::error::{Error, Result};
use crate::generators::model::ModelSpec;
use crate::generators::offspring::OffspringSpec;
use crate::generators::simply_generated::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LimitFamily {
    /// d(ξ₁, ξ₂)/ln n → 2a; checked through the slope against ln n.
    Logarithmic { a: f64 },
    /// c_n d(ξ₁, ξ₂) → 2a.
    Constant { a: f64, scaling: Scaling },
    /// c_n d(ξ₁, ξ₂) → |U - V|·length.
    Interval { length: f64, scaling: Scaling },
    /// c_n d(ξ₁, ξ₂) → X₁ + X₂ with X_i i.i.d. ν on the naturals.
    Point { nu: PointLaw, scaling: Scaling },
    /// d(ξ₁, ξ₂)/√n → distance in the excursion tree of (2/σ)B^ex.
    Crt { sigma: f64 },
    /// Like `Point` with ν = Ge(1 - κ) around the vertex of maximal degree.
    Condensation { kappa: f64 },
}

impl LimitFamily {
    pub fn scaling(&self) -> Scaling {
        match self {
            LimitFamily::Logarithmic { .. } => Scaling::InvLog,
            LimitFamily::Constant { scaling, .. }
            | LimitFamily::Interval { scaling, .. }
            | LimitFamily::Point { scaling, .. } => *scaling,
            LimitFamily::Crt { .. } => Scaling::InvSqrt,
            LimitFamily::Condensation { .. } => Scaling::None,
        }
    }

    /// The characteristic size 2a when the limit is a constant dendron.
    pub fn two_a(&self) -> Option<f64> {
        match self {
            LimitFamily::Logarithmic { a } | LimitFamily::Constant { a, .. } => Some(2.0 * a),
            _ => None,
        }
    }
}

/// Standard deviation of the offspring law after the exponential tilt
/// that makes it critical, if such a tilt exists.
pub fn critical_sigma(offspring: &OffspringSpec) -> Option<f64> {
    match *offspring {
        OffspringSpec::Poisson { .. } => Some(1.0),
        OffspringSpec::Geometric { .. } => Some(2f64.sqrt()),
        OffspringSpec::PowerLaw { .. } => {
            let (m, v) = (offspring.mean(), offspring.variance());
            ((m - 1.0).abs() < 1e-12 && v.is_finite()).then(|| v.sqrt())
        }
        OffspringSpec::Finite { ref pmf } => {
            let support = pmf.iter().rposition(|&p| p > 0.0)?;
            if support < 2 {
                return None;
            }
            let tilted = |theta: f64| -> (f64, f64) {
                let w: Vec<f64> = pmf.iter().enumerate().map(|(k, p)| p * (theta * k as f64).exp()).collect();
                let z: f64 = w.iter().sum();
                let m: f64 = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum::<f64>() / z;
                let m2: f64 = w.iter().enumerate().map(|(k, x)| (k * k) as f64 * x).sum::<f64>() / z;
                (m, m2 - m * m)
            };
            let (mut lo, mut hi) = (-50.0, 50.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if tilted(mid).0 < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(tilted(0.5 * (lo + hi)).1.sqrt())
        }
    }
}

pub fn limit_family(model: &ModelSpec) -> Result<LimitFamily> {
    model.validate()?;
    Ok(match model {
        ModelSpec::Path => LimitFamily::Interval { length: 1.0, scaling: Scaling::InvN },
        ModelSpec::Star => LimitFamily::Constant { a: 1.0, scaling: Scaling::None },
        ModelSpec::CompleteBary { .. } => LimitFamily::Constant { a: 1.0, scaling: Scaling::InvN },
        ModelSpec::Superstar { p } => {
            let gamma: f64 = p.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).sum();
            let mut q = vec![0.0];
            for k in 1..=p.len() {
                q.push(p[k - 1..].iter().sum::<f64>() / gamma);
            }
            LimitFamily::Point { nu: PointLaw::Discrete { pmf: q }, scaling: Scaling::None }
        }
        ModelSpec::Cgw { offspring, .. } => match critical_sigma(offspring) {
            Some(sigma) => LimitFamily::Crt { sigma },
            None if matches!(offspring, OffspringSpec::PowerLaw { .. }) && offspring.mean() < 1.0 => {
                LimitFamily::Condensation { kappa: offspring.mean() }
            }
            None => return Err(Error::InvalidSpec(format!("no supported limit for offspring law {offspring:?}"))),
        },
        ModelSpec::SimplyGenerated { weights } => match weights {
            WeightSpec::Factorial { alpha } if *alpha > 0.0 => LimitFamily::Constant { a: 1.0, scaling: Scaling::None },
            WeightSpec::Explicit { w } => {
                let total: f64 = w.iter().sum();
                let pmf = w.iter().map(|x| x / total).collect();
                match critical_sigma(&OffspringSpec::Finite { pmf }) {
                    Some(sigma) => LimitFamily::Crt { sigma },
                    None => return Err(Error::InvalidSpec("weights admit no critical tilt".into())),
                }
            }
            _ => return Err(Error::InvalidSpec(format!("no supported limit for weights {weights:?}"))),
        },
        ModelSpec::Split { split } => LimitFamily::Logarithmic { a: 1.0 / chi_exact(&split.splitter) },
        ModelSpec::Pa { chi, rho } => {
            if !(chi + rho > 0.0) {
                return Err(Error::InvalidSpec("χ + ρ must be positive for a logarithmic limit".into()));
            }
            LimitFamily::Logarithmic { a: rho / (chi + rho) }
        }
        ModelSpec::Bst => LimitFamily::Logarithmic { a: 2.0 },
        ModelSpec::Cmj { birth } => LimitFamily::Logarithmic { a: cmj_char_size(birth)?.a },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logarithmic_constants() {
        let two_a = |name: &str| limit_family(&ModelSpec::preset(name).unwrap()).unwrap().two_a().unwrap();
        for (name, expect) in [
            ("bst", 4.0),
            ("rrt", 2.0),
            ("port", 1.0),
            ("pa_bst", 4.0),
            ("bary3", 3.0),
            ("split_bst", 4.0),
            ("split_dirichlet3", 2.4),
            ("yule", 2.0),
            ("cmj_bst", 4.0),
        ] {
            assert!((two_a(name) - expect).abs() < 1e-8, "{name}: {}", two_a(name));
        }
        let pa12 = limit_family(&ModelSpec::Pa { chi: 1.0, rho: 2.0 }).unwrap();
        assert!((pa12.two_a().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn superstar_point_law() {
        let LimitFamily::Point { nu: PointLaw::Discrete { pmf }, .. } =
            limit_family(&ModelSpec::preset("superstar").unwrap()).unwrap()
        else {
            panic!("expected a point law");
        };
        assert!((pmf[1] - 2.0 / 3.0).abs() < 1e-15 && (pmf[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gw_families() {
        let f = limit_family(&ModelSpec::preset("cgw").unwrap()).unwrap();
        assert_eq!(f, LimitFamily::Crt { sigma: 1.0 });
        let LimitFamily::Condensation { kappa } = limit_family(&ModelSpec::preset("condensation").unwrap()).unwrap()
        else {
            panic!()
        };
        assert!((kappa - 0.5553).abs() < 1e-4);
        let binary = OffspringSpec::binary();
        assert!((critical_sigma(&binary).unwrap() - 1.0).abs() < 1e-9);
        let skewed = OffspringSpec::Finite { pmf: vec![0.7, 0.0, 0.3] };
        assert!((critical_sigma(&skewed).unwrap() - 1.0).abs() < 1e-9);
    }
}
