//! Offspring distributions for Galton–Watson trees.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::special::{gcd, zeta};

/// An offspring law on the naturals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OffspringSpec {
    Poisson {
        lambda: f64,
    },
    /// pmf p (1-p)^k on k ≥ 0.
    Geometric {
        p: f64,
    },
    /// Explicit pmf, index = number of children.
    Finite {
        pmf: Vec<f64>,
    },
    /// p_0 plus p_k = (1 - p_0) k^(-beta) / ζ(beta) for k ≥ 1.
    PowerLaw {
        p0: f64,
        beta: f64,
    },
}

impl OffspringSpec {
    /// The heavy-tailed subcritical law used for condensation experiments.
    pub fn condensation_default() -> Self {
        OffspringSpec::PowerLaw { p0: 0.5, beta: 4.0 }
    }

    /// The law {0: ½, 2: ½}.
    pub fn binary() -> Self {
        OffspringSpec::Finite { pmf: vec![0.5, 0.0, 0.5] }
    }

    /// Parses `poisson:1`, `geometric:0.5`, `binary`, `powerlaw:0.5:4`,
    /// `finite:0.5,0,0.5`, or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let spec: Self = serde_json::from_str(text)?;
            spec.validate()?;
            return Ok(spec);
        }
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let nums = |sep: char| -> Result<Vec<f64>> {
            args.split(sep)
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect()
        };
        let spec = match kind {
            "poisson" => match nums(':')?[..] {
                [lambda] => OffspringSpec::Poisson { lambda },
                _ => return Err(Error::Parse("poisson:<lambda>".into())),
            },
            "geometric" => match nums(':')?[..] {
                [p] => OffspringSpec::Geometric { p },
                _ => return Err(Error::Parse("geometric:<p>".into())),
            },
            "powerlaw" | "power_law" => match nums(':')?[..] {
                [] => Self::condensation_default(),
                [p0, beta] => OffspringSpec::PowerLaw { p0, beta },
                _ => return Err(Error::Parse("powerlaw:<p0>:<beta>".into())),
            },
            "binary" => Self::binary(),
            "finite" => OffspringSpec::Finite { pmf: nums(',')? },
            _ => return Err(Error::Parse(format!("unknown offspring law {kind:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            OffspringSpec::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("poisson rate must be positive, got {lambda}"))
            }
            OffspringSpec::Geometric { p } if !(p > 0.0 && p <= 1.0) => {
                bad(format!("geometric parameter must lie in (0, 1], got {p}"))
            }
            OffspringSpec::PowerLaw { p0, beta } if !(p0 > 0.0 && p0 < 1.0) || !(beta > 1.0) => {
                bad(format!("power law needs 0 < p0 < 1 and beta > 1, got p0 = {p0}, beta = {beta}"))
            }
            OffspringSpec::Finite { ref pmf } => {
                if pmf.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                    return bad("finite pmf has a negative or non-finite entry".into());
                }
                let total: f64 = pmf.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad(format!("finite pmf sums to {total}, not 1"));
                }
                if pmf.first().copied().unwrap_or(0.0) == 0.0 {
                    return bad("p_0 must be positive".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// ln p_k, `-inf` off the support.
    pub fn ln_pmf(&self, k: usize) -> f64 {
        match *self {
            OffspringSpec::Poisson { lambda } => -lambda + k as f64 * lambda.ln() - ln_factorial(k as u64),
            OffspringSpec::Geometric { p } => {
                if p == 1.0 {
                    if k == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    p.ln() + k as f64 * (1.0 - p).ln()
                }
            }
            OffspringSpec::Finite { ref pmf } => pmf.get(k).map_or(f64::NEG_INFINITY, |p| p.ln()),
            OffspringSpec::PowerLaw { p0, beta } => {
                if k == 0 {
                    p0.ln()
                } else {
                    (1.0 - p0).ln() - beta * (k as f64).ln() - zeta(beta).ln()
                }
            }
        }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.ln_pmf(k).exp()
    }

    pub fn mean(&self) -> f64 {
        match *self {
            OffspringSpec::Poisson { lambda } => lambda,
            OffspringSpec::Geometric { p } => (1.0 - p) / p,
            OffspringSpec::Finite { ref pmf } => pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum(),
            OffspringSpec::PowerLaw { p0, beta } => {
                if beta > 2.0 {
                    (1.0 - p0) * zeta(beta - 1.0) / zeta(beta)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Variance; `+inf` when the second moment diverges.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        match *self {
            OffspringSpec::Poisson { lambda } => lambda,
            OffspringSpec::Geometric { p } => (1.0 - p) / (p * p),
            OffspringSpec::Finite { ref pmf } => {
                pmf.iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(2) * p).sum()
            }
            OffspringSpec::PowerLaw { p0, beta } => {
                if beta > 3.0 {
                    (1.0 - p0) * zeta(beta - 2.0) / zeta(beta) - mean * mean
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Largest value with positive mass, if finite.
    pub fn max_support(&self) -> Option<usize> {
        match *self {
            OffspringSpec::Finite { ref pmf } => pmf.iter().rposition(|&p| p > 0.0),
            OffspringSpec::Geometric { p: 1.0 } => Some(0),
            _ => None,
        }
    }

    /// Gcd of the support; trees of size n exist only when it divides n - 1.
    pub fn span(&self) -> usize {
        match *self {
            OffspringSpec::Finite { ref pmf } => {
                pmf.iter().enumerate().filter(|&(k, &p)| k > 0 && p > 0.0).fold(0, |g, (k, _)| gcd(g, k))
            }
            OffspringSpec::Geometric { p: 1.0 } => 0,
            _ => 1,
        }
    }

    /// Whether a tree with exactly `n` vertices has positive probability.
    pub fn check_feasible(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Infeasible { n, reason: "trees have at least one vertex".into() });
        }
        let g = self.span();
        if n == 1 {
            return Ok(());
        }
        if g == 0 {
            return Err(Error::Infeasible { n, reason: "offspring law is a point mass at 0".into() });
        }
        if !(n - 1).is_multiple_of(g) {
            return Err(Error::Infeasible {
                n,
                reason: format!("support lattice has span {g}, which does not divide n - 1"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condensation_default_constants() {
        let s = OffspringSpec::condensation_default();
        let kappa = s.mean();
        assert!((kappa - 0.5 * zeta(3.0) / zeta(4.0)).abs() < 1e-15);
        assert!((kappa - 0.5553).abs() < 1e-4, "kappa = {kappa}");
        let total: f64 = (0..200_000).map(|k| s.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moments_match_pmf_sums() {
        for s in [OffspringSpec::Poisson { lambda: 1.0 }, OffspringSpec::Geometric { p: 0.5 }, OffspringSpec::binary()]
        {
            let m: f64 = (0..400).map(|k| k as f64 * s.pmf(k)).sum();
            let m2: f64 = (0..400).map(|k| (k * k) as f64 * s.pmf(k)).sum();
            assert!((m - s.mean()).abs() < 1e-12, "{s:?}");
            assert!((m2 - m * m - s.variance()).abs() < 1e-10, "{s:?}");
        }
        assert_eq!(OffspringSpec::PowerLaw { p0: 0.5, beta: 2.5 }.variance(), f64::INFINITY);
    }

    #[test]
    fn parsing_and_validation() {
        assert_eq!(OffspringSpec::parse("poisson:1").unwrap(), OffspringSpec::Poisson { lambda: 1.0 });
        assert_eq!(OffspringSpec::parse("binary").unwrap(), OffspringSpec::binary());
        assert_eq!(
            OffspringSpec::parse(r#"{"kind":"geometric","p":0.5}"#).unwrap(),
            OffspringSpec::Geometric { p: 0.5 }
        );
        assert_eq!(OffspringSpec::parse("finite:0.5,0,0.5").unwrap(), OffspringSpec::binary());
        assert!(OffspringSpec::parse("finite:0.5,0.6").is_err());
        assert!(OffspringSpec::parse("poisson:-1").is_err());
        assert!(OffspringSpec::parse("zipf:2").is_err());
    }

    #[test]
    fn lattice_feasibility() {
        let b = OffspringSpec::binary();
        assert_eq!(b.span(), 2);
        assert!(b.check_feasible(3).is_ok());
        assert!(b.check_feasible(4).is_err());
        assert!(b.check_feasible(1).is_ok());
        assert!(OffspringSpec::Poisson { lambda: 1.0 }.check_feasible(4).is_ok());
    }
}
