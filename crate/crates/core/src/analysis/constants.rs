//! Limit constants: split-tree entropy, Malthusian parameters, and the
//! characteristic size a of logarithmic families.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::generators::cmj::BirthSpec;
use crate::generators::split::{SplitSpec, Splitter};
use crate::rng::seeded;

/// χ = Σ E[V_i ln(1/V_i)].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    /// Exact value when the splitter has a known closed form.
    pub exact: Option<f64>,
    pub monte_carlo: f64,
    pub stderr: f64,
    pub samples: usize,
    /// χ = 0: the split vector is a.s. a unit vector.
    pub degenerate: bool,
}

impl ChiEstimate {
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or(self.monte_carlo)
    }
}

fn entropy(v: &[f64]) -> f64 {
    v.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Closed form of χ for Dirichlet and fixed splitters.
pub fn chi_exact(splitter: &Splitter) -> f64 {
    match splitter {
        Splitter::Dirichlet { alpha } => {
            let a0: f64 = alpha.iter().sum();
            alpha.iter().map(|&a| a / a0 * (digamma(a0 + 1.0) - digamma(a + 1.0))).sum()
        }
        Splitter::Fixed { v } => entropy(v),
    }
}

pub fn chi_of_split(spec: &SplitSpec, mc_samples: usize, seed: u64) -> Result<ChiEstimate> {
    if mc_samples == 0 {
        return Err(Error::InvalidSpec("need at least one Monte Carlo sample".into()));
    }
    spec.splitter.validate()?;
    let mut rng = seeded(seed);
    let mut v = vec![0.0; spec.splitter.b()];
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..mc_samples {
        spec.splitter.sample_into(&mut rng, &mut v);
        let h = entropy(&v);
        sum += h;
        sum2 += h * h;
    }
    let m = mc_samples as f64;
    let mean = sum / m;
    let var = if mc_samples > 1 { ((sum2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { f64::NAN };
    let exact = chi_exact(&spec.splitter);
    Ok(ChiEstimate {
        exact: Some(exact),
        monte_carlo: mean,
        stderr: (var / m).sqrt(),
        samples: mc_samples,
        degenerate: exact <= 0.0,
    })
}

/// Root of ĥμ(α) = 1 by bisection; the bracket starts at [1e-12, 1] and
/// the upper end doubles up to 1e6.
pub fn malthusian_alpha(laplace: impl Fn(f64) -> f64) -> Result<f64> {
    let lo0 = 1e-12;
    if !(laplace(lo0) > 1.0) {
        return Err(Error::NonMalthusian(format!(
            "intensity transform at {lo0} is {} ≤ 1: not supercritical",
            laplace(lo0)
        )));
    }
    let mut hi = 1.0;
    while laplace(hi) > 1.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonMalthusian("no root of the intensity transform below 1e6".into()));
        }
    }
    let mut lo = lo0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if laplace(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Σ_{j=1}^{N} L^j and its derivative in L, for N finite or infinite.
fn geometric_sum(l: f64, cap: Option<usize>) -> (f64, f64) {
    match cap {
        None => (l / (1.0 - l), 1.0 / (1.0 - l).powi(2)),
        Some(n) => {
            if (1.0 - l).abs() < 1e-12 {
                let n = n as f64;
                return (n, n * (n + 1.0) / 2.0);
            }
            let ln = l.powi(n as i32);
            let value = l * (1.0 - ln) / (1.0 - l);
            let nf = n as f64;
            let deriv = (1.0 - (nf + 1.0) * ln + nf * ln * l) / (1.0 - l).powi(2);
            (value, deriv)
        }
    }
}

/// Terms of the linear-weight transform are summed until they fall
/// below this, or this many terms.
const SERIES_TERMS: usize = 10_000_000;

/// ĥμ(θ) = E Σ_i e^{-θ ξ̂_i} and its θ-derivative.
pub fn intensity_transform(spec: &BirthSpec, theta: f64) -> (f64, f64) {
    match spec {
        BirthSpec::Renewal { gap, max_children } => {
            let (s, ds) = geometric_sum(gap.laplace(theta), *max_children);
            (s, ds * gap.laplace_derivative(theta))
        }
        BirthSpec::IndependentSlots { time, slots } => {
            let k = *slots as f64;
            (k * time.laplace(theta), k * time.laplace_derivative(theta))
        }
        BirthSpec::LinearWeight { chi, rho } => {
            // k-th birth after k successive Exp(w_j) waits, w_j = χ j + ρ
            let (mut value, mut deriv) = (0.0, 0.0);
            let (mut prod, mut log_deriv) = (1.0, 0.0);
            let mut terms = 0;
            for j in 0..SERIES_TERMS {
                let w = chi * j as f64 + rho;
                if w <= 0.0 {
                    return (value, deriv);
                }
                prod *= w / (w + theta);
                log_deriv -= 1.0 / (w + theta);
                value += prod;
                deriv += prod * log_deriv;
                terms = j + 1;
                if prod < 1e-16 * value {
                    break;
                }
            }
            if *chi > 0.0 {
                // terms decay like k^(-θ/χ); add the integral of the tail
                let p = theta / chi;
                if p <= 1.0 {
                    return (f64::INFINITY, f64::NEG_INFINITY);
                }
                let k = terms as f64;
                value += prod * k / (p - 1.0);
                deriv += prod * k / (p - 1.0) * log_deriv - prod * k / (chi * (p - 1.0).powi(2));
            }
            (value, deriv)
        }
    }
}

/// α, β = ∫ t e^{-αt} μ(dt), and a = 1/(αβ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmjConstants {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
}

pub fn cmj_char_size(spec: &BirthSpec) -> Result<CmjConstants> {
    spec.validate()?;
    if let BirthSpec::LinearWeight { chi, rho } = *spec {
        let alpha = chi + rho;
        if !(alpha > 0.0) {
            return Err(Error::NonMalthusian(format!("χ + ρ = {alpha} ≤ 0: at most one child each")));
        }
        let beta = 1.0 / rho;
        return Ok(CmjConstants { alpha, beta, a: 1.0 / (alpha * beta) });
    }
    let alpha = malthusian_alpha(|t| intensity_transform(spec, t).0)?;
    let beta = -intensity_transform(spec, alpha).1;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::NonMalthusian(format!("β = {beta} is not a positive finite number")));
    }
    Ok(CmjConstants { alpha, beta, a: 1.0 / (alpha * beta) })
}

/// Split-vector draw used by `chi_of_split`, exposed for convergence-rate checks.
pub fn chi_sample<R: Rng + ?Sized>(splitter: &Splitter, rng: &mut R) -> f64 {
    let mut v = vec![0.0; splitter.b()];
    splitter.sample_into(rng, &mut v);
    entropy(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cmj::TimeLaw;

    #[test]
    fn chi_closed_forms() {
        assert!((chi_exact(&Splitter::uniform2()) - 0.5).abs() < 1e-12);
        assert!((chi_exact(&Splitter::symmetric_dirichlet(3, 1.0)) - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(chi_exact(&Splitter::Fixed { v: vec![1.0, 0.0] }), 0.0);
        let est = chi_of_split(&SplitSpec::bst(), 1_000_000, 1).unwrap();
        assert!((est.monte_carlo - 0.5).abs() < 1e-3, "{est:?}");
        let est = chi_of_split(&SplitSpec::dirichlet(3, 1.0), 1_000_000, 2).unwrap();
        assert!((est.monte_carlo - 5.0 / 6.0).abs() < 2e-3, "{est:?}");
    }

    #[test]
    fn chi_stderr_halves_when_samples_quadruple() {
        let a = chi_of_split(&SplitSpec::bst(), 40_000, 3).unwrap().stderr;
        let b = chi_of_split(&SplitSpec::bst(), 160_000, 4).unwrap().stderr;
        assert!((a / b - 2.0).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn alpha_closed_forms() {
        let yule = malthusian_alpha(|t| 1.0 / t).unwrap();
        assert!((yule - 1.0).abs() < 1e-10);
        let bst = malthusian_alpha(|t| 2.0 / (1.0 + t)).unwrap();
        assert!((bst - 1.0).abs() < 1e-10);
        assert!(matches!(malthusian_alpha(|t| (-t).exp()), Err(Error::NonMalthusian(_))));
    }

    #[test]
    fn cmj_examples() {
        let y = cmj_char_size(&BirthSpec::yule()).unwrap();
        assert!((y.alpha - 1.0).abs() < 1e-8 && (y.beta - 1.0).abs() < 1e-8 && (y.a - 1.0).abs() < 1e-8);
        let b = cmj_char_size(&BirthSpec::bst()).unwrap();
        assert!((b.alpha - 1.0).abs() < 1e-8 && (b.beta - 0.5).abs() < 1e-8 && (b.a - 2.0).abs() < 1e-8);
        let p = cmj_char_size(&BirthSpec::LinearWeight { chi: 1.0, rho: 1.0 }).unwrap();
        assert!((p.a - 0.5).abs() < 1e-12);
        let det = BirthSpec::Renewal { gap: TimeLaw::Deterministic { value: 1.0 }, max_children: Some(1) };
        assert!(cmj_char_size(&det).is_err());
    }

    #[test]
    fn linear_weight_series_agrees_with_closed_form() {
        for (chi, rho) in [(0.0, 1.0), (-1.0, 2.0), (-1.0, 3.0), (1.0, 2.0), (2.0, 1.0)] {
            let spec = BirthSpec::LinearWeight { chi, rho };
            let closed = cmj_char_size(&spec).unwrap();
            let (v, d) = intensity_transform(&spec, closed.alpha);
            assert!((v - 1.0).abs() < 1e-5, "({chi},{rho}): {v}");
            assert!((-d - closed.beta).abs() < 1e-4, "({chi},{rho}): {d}");
        }
    }

    #[test]
    fn root_accuracy_when_returned() {
        let gamma = BirthSpec::Renewal { gap: TimeLaw::Gamma { shape: 2.0, scale: 0.5 }, max_children: Some(3) };
        let c = cmj_char_size(&gamma).unwrap();
        assert!((intensity_transform(&gamma, c.alpha).0 - 1.0).abs() <= 1e-9);
    }
}
