//! Exact sampling of simply generated trees with arbitrary weights.
//!
//! A tree on n vertices has weight Π_v w_{outdeg(v)}. Partition functions
//! are tabulated in log space, then the tree is drawn top-down.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::special::log_sum_exp;
use crate::tree::RootedTree;

/// Largest n the cubic-time table is built for.
pub const SIMPLY_GENERATED_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// w_k = list[k], zero beyond the list.
    Explicit { w: Vec<f64> },
    /// w_k = (k!)^alpha.
    Factorial { alpha: f64 },
}

impl WeightSpec {
    fn ln_weights(&self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|k| match self {
                WeightSpec::Explicit { w } => w.get(k).map_or(f64::NEG_INFINITY, |x| x.ln()),
                WeightSpec::Factorial { alpha } => alpha * ln_factorial(k as u64),
            })
            .collect()
    }
}

/// Prepared tables for one (weights, n).
#[derive(Debug, Clone)]
pub struct SimplyGenerated {
    n: usize,
    ln_w: Vec<f64>,
    /// ln Z_m for m = 0..=n (Z_0 unused, -inf).
    ln_z: Vec<f64>,
    /// f[k][s] = ln Σ over ordered k-tuples of sizes summing to s of Π Z.
    f: Vec<Vec<f64>>,
}

impl SimplyGenerated {
    pub fn new(weights: &WeightSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        if n > SIMPLY_GENERATED_LIMIT {
            return Err(Error::SizeGuard { n, limit: SIMPLY_GENERATED_LIMIT });
        }
        if let WeightSpec::Explicit { w } = weights {
            if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidSpec("weights must be finite and nonnegative".into()));
            }
        }
        let ln_w = weights.ln_weights(n);
        if ln_w[0] == f64::NEG_INFINITY {
            return Err(Error::InvalidSpec("w_0 must be positive".into()));
        }
        if n > 1 && ln_w[1..].iter().all(|&x| x == f64::NEG_INFINITY) {
            return Err(Error::InvalidSpec("some w_k with k ≥ 1 must be positive".into()));
        }
        let kmax = ln_w.iter().rposition(|&x| x > f64::NEG_INFINITY).unwrap_or(0).min(n - 1);
        let ninf = f64::NEG_INFINITY;
        let mut f = vec![vec![ninf; n]; kmax + 1];
        let mut ln_z = vec![ninf; n + 1];
        f[0][0] = 0.0;
        let mut terms = Vec::with_capacity(n);
        for s in 0..n {
            // f[k][s] uses Z_1..Z_s, all known by now
            for k in 1..=kmax.min(s) {
                terms.clear();
                terms.extend((1..=s).map(|j| ln_z[j] + f[k - 1][s - j]));
                f[k][s] = log_sum_exp(terms.iter().copied());
            }
            ln_z[s + 1] = log_sum_exp((0..=kmax).map(|k| ln_w[k] + f[k][s]));
        }
        if ln_z[n] == ninf {
            return Err(Error::Infeasible { n, reason: "no tree of this size has positive weight".into() });
        }
        Ok(SimplyGenerated { n, ln_w, ln_z, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ln of the total weight of trees with m vertices.
    pub fn ln_partition(&self, m: usize) -> f64 {
        self.ln_z[m]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RootedTree> {
        let mut degrees = Vec::with_capacity(self.n);
        // subtree sizes still to expand, next one on top
        let mut stack = vec![self.n];
        let mut sizes = Vec::new();
        while let Some(m) = stack.pop() {
            let s = m - 1;
            let kmax = (self.f.len() - 1).min(s);
            let k = draw(rng, (0..=kmax).map(|k| self.ln_w[k] + self.f[k][s] - self.ln_z[m]));
            degrees.push(k);
            sizes.clear();
            let mut rest = s;
            for left in (1..=k).rev() {
                // first of `left` subtrees takes j vertices
                let j = if left == 1 {
                    rest
                } else {
                    1 + draw(rng, (1..=rest).map(|j| self.ln_z[j] + self.f[left - 1][rest - j] - self.f[left][rest]))
                };
                sizes.push(j);
                rest -= j;
            }
            stack.extend(sizes.iter().rev());
        }
        RootedTree::from_preorder_degrees(&degrees)
    }
}

/// Index drawn with probabilities exp(ln_p) (normalised on the fly).
fn draw<R: Rng + ?Sized>(rng: &mut R, ln_p: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = ln_p.clone().map(f64::exp).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, lp) in ln_p.enumerate() {
        let p = lp.exp();
        if p > 0.0 {
            last = i;
            if u < p {
                return i;
            }
            u -= p;
        }
    }
    last
}

/// One-shot convenience wrapper.
pub fn sample_simply_generated_exact<R: Rng + ?Sized>(
    weights: &WeightSpec,
    n: usize,
    rng: &mut R,
) -> Result<RootedTree> {
    SimplyGenerated::new(weights, n)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn catalan_partition_function() {
        let sg = SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0; 10] }, 10).unwrap();
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0, 429.0, 1430.0, 4862.0];
        for m in 1..=10 {
            assert!((sg.ln_partition(m).exp() - catalan[m - 1]).abs() < 1e-9 * catalan[m - 1]);
        }
    }

    #[test]
    fn full_binary_trees() {
        let sg = SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0, 0.0, 1.0] }, 5).unwrap();
        assert!((sg.ln_partition(5).exp() - 2.0).abs() < 1e-12);
        let mut rng = seeded(1);
        for _ in 0..50 {
            let t = sg.sample(&mut rng).unwrap();
            assert!((0..5).all(|v| t.outdegree(v) != 1));
        }
        assert!(SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0, 0.0, 1.0] }, 4).is_err());
    }

    #[test]
    fn guards() {
        let w = WeightSpec::Factorial { alpha: 1.0 };
        assert!(matches!(SimplyGenerated::new(&w, 501), Err(Error::SizeGuard { .. })));
        assert!(SimplyGenerated::new(&WeightSpec::Explicit { w: vec![0.0, 1.0] }, 3).is_err());
        assert!(SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0] }, 3).is_err());
        assert!(SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0] }, 1).is_ok());
    }

    #[test]
    fn factorial_weights_make_a_hub() {
        let sg = SimplyGenerated::new(&WeightSpec::Factorial { alpha: 1.0 }, 200).unwrap();
        let mut rng = seeded(7);
        let big = (0..40).filter(|_| sg.sample(&mut rng).unwrap().outdegree(0) >= 190).count();
        assert!(big >= 36, "{big}");
    }
}
