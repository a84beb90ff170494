//! Distribution distances and small summary statistics.

use crate::error::{Error, Result};
use crate::histogram::Histogram;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov statistic. Both empirical CDFs are
/// right-continuous step functions compared at every pooled jump point,
/// so ties and atoms are handled exactly.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("KS statistic needs nonempty samples".into()));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(best)
}

/// One-sample statistic against a CDF. At each jump point both the
/// post-jump and pre-jump gaps are examined; `cdf_left` gives P(X < x)
/// so discrete laws are handled (pass `cdf` twice for continuous ones).
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Degenerate("KS statistic needs a nonempty sample".into()));
    }
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let below = i as f64 / n;
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        let upto = i as f64 / n;
        best = best.max((upto - cdf(x)).abs()).max((below - cdf_left(x)).abs());
    }
    Ok(best)
}

/// ½ Σ |p_k - q_k| over the union of supports.
pub fn total_variation_discrete(a: &Histogram, b: &Histogram) -> f64 {
    let len = a.support_len().max(b.support_len());
    0.5 * (0..len).map(|k| (a.pmf(k) - b.pmf(k)).abs()).sum::<f64>()
}

/// TV distance between a histogram and a law given by its pmf, including
/// the mass the law puts beyond `horizon`.
pub fn total_variation_to_pmf(a: &Histogram, pmf: impl Fn(usize) -> f64, horizon: usize) -> f64 {
    let len = a.support_len().max(horizon);
    let mut covered = 0.0;
    let mut diff = 0.0;
    for k in 0..len {
        let q = pmf(k);
        covered += q;
        diff += (a.pmf(k) - q).abs();
    }
    0.5 * (diff + (1.0 - covered).max(0.0))
}

/// Inverse-CDF quantile: the smallest sample value x with F(x) ≥ level.
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    let k = ((level * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Ordinary least squares y ≈ intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals (NaN with two points).
    pub stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::Degenerate(format!("line fit needs ≥ 2 paired points, got {n}")));
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(LineFit { slope, intercept, stderr })
}
