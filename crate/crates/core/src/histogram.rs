//! Histograms over the naturals.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Nonnegative weights on `0, 1, 2, …`; probabilities are weights over
/// their total. Integer counts are stored exactly up to 2^53.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    weights: Vec<f64>,
    total: f64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples<I: IntoIterator<Item = usize>>(samples: I) -> Self {
        let mut h = Self::new();
        for x in samples {
            h.add(x, 1.0);
        }
        h
    }

    /// From a probability (or weight) vector indexed by value.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let total = weights.iter().sum();
        Histogram { weights, total }
    }

    pub fn add(&mut self, value: usize, weight: f64) {
        if value >= self.weights.len() {
            self.weights.resize(value + 1, 0.0);
        }
        self.weights[value] += weight;
        self.total += weight;
    }

    /// Adds the weights of `other`; used to reduce per-worker histograms.
    pub fn merge(&mut self, other: &Histogram) {
        for (k, &w) in other.weights.iter().enumerate() {
            if w != 0.0 {
                self.add(k, w);
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0.0
    }

    /// One past the largest value carrying weight.
    pub fn support_len(&self) -> usize {
        self.weights.iter().rposition(|&w| w != 0.0).map_or(0, |k| k + 1)
    }

    pub fn pmf(&self, value: usize) -> f64 {
        match self.weights.get(value) {
            Some(&w) if self.total > 0.0 => w / self.total,
            _ => 0.0,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.support_len()).map(|k| self.pmf(k)).collect()
    }

    /// P(X ≥ k).
    pub fn tail(&self, k: usize) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        self.weights.iter().skip(k).sum::<f64>() / self.total
    }

    pub fn cdf(&self, k: usize) -> f64 {
        1.0 - self.tail(k + 1)
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        self.weights.iter().enumerate().map(|(k, &w)| k as f64 * w).sum::<f64>() / self.total
    }

    /// Smallest k with P(X ≤ k) ≥ level.
    pub fn quantile(&self, level: f64) -> usize {
        let target = level * self.total;
        let mut acc = 0.0;
        for (k, &w) in self.weights.iter().enumerate() {
            acc += w;
            if w > 0.0 && acc >= target {
                return k;
            }
        }
        self.support_len().saturating_sub(1)
    }

    /// `value,probability` rows with a header, zero rows skipped.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,probability\n");
        for k in 0..self.support_len() {
            let p = self.pmf(k);
            if p > 0.0 {
                writeln!(out, "{k},{p}").unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_moments() {
        let h = Histogram::from_samples([0, 1, 1, 2, 2, 2]);
        assert_eq!(h.total(), 6.0);
        assert!((h.pmf(2) - 0.5).abs() < 1e-15);
        assert!((h.mean() - 8.0 / 6.0).abs() < 1e-15);
        assert!((h.tail(1) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(h.quantile(0.5), 1);
        assert_eq!(h.quantile(0.99), 2);
        assert_eq!(h.quantile(0.0), 0);
        assert_eq!(h.pmf(17), 0.0);
    }

    #[test]
    fn merge_is_addition() {
        let mut a = Histogram::from_samples([0, 3]);
        a.merge(&Histogram::from_samples([3, 5]));
        assert_eq!(a, Histogram::from_weights(vec![1.0, 0.0, 0.0, 2.0, 0.0, 1.0]));
    }

    #[test]
    fn csv_rows() {
        let h = Histogram::from_weights(vec![0.25, 0.0, 0.75]);
        assert_eq!(h.to_csv(), "value,probability\n0,0.25\n2,0.75\n");
        assert_eq!(Histogram::new().to_csv(), "value,probability\n");
    }
}
