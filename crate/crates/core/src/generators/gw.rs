//! Galton–Watson trees conditioned on their number of vertices.
//!
//! Both methods produce an exchangeable offspring sequence with sum n - 1,
//! rotate it by the cycle lemma, and decode it as a preorder sequence.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::offspring::OffspringSpec;
use crate::error::{Error, Result};
use crate::tree::RootedTree;

pub const DEFAULT_REJECTION_CAP: usize = 1_000_000;

/// Below this table length convolutions are done directly.
const DIRECT_CONV_LIMIT: usize = 256;
/// FFT output entries below this fraction of the maximum are treated as zero.
const FFT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GwMethod {
    /// Rejection for critical finite-variance laws at moderate n, otherwise convolution.
    #[default]
    Auto,
    /// Draw i.i.d. blocks of n offspring counts until one sums to n - 1.
    Rejection,
    /// Exact divide-and-conquer sampling from convolution powers.
    Convolution,
}

/// Index at which the cyclic rotation of `degrees` becomes a valid preorder
/// sequence: the first minimiser of the partial sums of `d_i - 1`.
pub fn cycle_lemma_offset(degrees: &[usize]) -> Result<usize> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if n == 0 || total + 1 != n {
        return Err(Error::InvalidPreorder(format!("degree sum {total} differs from length - 1 for length {n}")));
    }
    let (mut walk, mut best, mut at) = (0i64, 0i64, 0usize);
    for (k, &d) in degrees.iter().enumerate() {
        if walk < best {
            best = walk;
            at = k;
        }
        walk += d as i64 - 1;
    }
    Ok(at)
}

/// The unique rotation of `degrees` that is a valid preorder sequence.
pub fn cycle_lemma_rotate(degrees: &[usize]) -> Result<Vec<usize>> {
    let at = cycle_lemma_offset(degrees)?;
    let mut out = degrees[at..].to_vec();
    out.extend_from_slice(&degrees[..at]);
    Ok(out)
}

/// True when every strict prefix of `d_i - 1` stays nonnegative.
pub fn is_preorder_sequence(degrees: &[usize]) -> bool {
    let mut walk = 0i64;
    for (k, &d) in degrees.iter().enumerate() {
        walk += d as i64 - 1;
        if walk < 0 {
            return k + 1 == degrees.len();
        }
    }
    false
}

/// Samples one tree with the default method.
pub fn sample_conditioned_gw<R: Rng + ?Sized>(spec: &OffspringSpec, n: usize, rng: &mut R) -> Result<RootedTree> {
    ConditionedGw::new(spec, n, GwMethod::Auto)?.sample(rng)
}

/// Prepared sampler for one (law, n) pair. Tables are built once and
/// shared read-only across replicas.
#[derive(Debug, Clone)]
pub struct ConditionedGw {
    n: usize,
    method: GwMethod,
    engine: Engine,
}

#[derive(Debug, Clone)]
enum Engine {
    Trivial,
    Rejection { alias: WeightedAliasIndex<f64>, cap: usize },
    Convolution { powers: BTreeMap<usize, Vec<f64>> },
}

impl ConditionedGw {
    pub fn new(spec: &OffspringSpec, n: usize, method: GwMethod) -> Result<Self> {
        Self::with_cap(spec, n, method, DEFAULT_REJECTION_CAP)
    }

    pub fn with_cap(spec: &OffspringSpec, n: usize, method: GwMethod, cap: usize) -> Result<Self> {
        spec.validate()?;
        if spec.mean() > 1.0 + 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "offspring mean {} exceeds 1; use a critical or subcritical law",
                spec.mean()
            )));
        }
        spec.check_feasible(n)?;
        let method = match method {
            GwMethod::Auto => {
                let critical = (spec.mean() - 1.0).abs() < 1e-9 && spec.variance().is_finite();
                if critical && n <= 4096 {
                    GwMethod::Rejection
                } else {
                    GwMethod::Convolution
                }
            }
            m => m,
        };
        let engine = if n == 1 {
            Engine::Trivial
        } else if method == GwMethod::Rejection {
            let mut weights: Vec<f64> = (0..n).map(|k| spec.pmf(k)).collect();
            let overflow = (1.0 - weights.iter().sum::<f64>()).max(0.0);
            weights.push(overflow);
            let alias =
                WeightedAliasIndex::new(weights).map_err(|e| Error::InvalidSpec(format!("offspring table: {e}")))?;
            Engine::Rejection { alias, cap }
        } else {
            Engine::Convolution { powers: convolution_powers(spec, n)? }
        };
        Ok(ConditionedGw { n, method, engine })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The method actually in use after resolving `Auto`.
    pub fn method(&self) -> GwMethod {
        self.method
    }

    /// An exchangeable offspring sequence of length n with sum n - 1.
    pub fn sample_sequence<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>> {
        let n = self.n;
        match &self.engine {
            Engine::Trivial => Ok(vec![0]),
            Engine::Rejection { alias, cap } => {
                let mut block = vec![0usize; n];
                let mut last_sum = 0;
                for _ in 0..*cap {
                    let mut sum = 0usize;
                    let mut ok = true;
                    for slot in block.iter_mut() {
                        let d = alias.sample(rng);
                        sum += d;
                        if sum > n - 1 {
                            ok = false;
                            break;
                        }
                        *slot = d;
                    }
                    if ok && sum == n - 1 {
                        return Ok(block);
                    }
                    last_sum = sum;
                }
                Err(Error::RejectionCap { cap: *cap, n, last_sum })
            }
            Engine::Convolution { powers } => split_sample(powers, n, rng),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RootedTree> {
        let seq = self.sample_sequence(rng)?;
        RootedTree::from_preorder_degrees(&cycle_lemma_rotate(&seq)?)
    }
}

/// Exponential tilt of the law truncated to `0..len`, with mean
/// `(len - 1) / len`. Tilting leaves the law conditioned on the sum unchanged.
fn tilted_pmf(spec: &OffspringSpec, len: usize) -> Vec<f64> {
    let lp: Vec<f64> = (0..len).map(|k| spec.ln_pmf(k)).collect();
    let target = (len as f64 - 1.0) / len as f64;
    let weights = |theta: f64| -> Vec<f64> {
        let max = lp.iter().enumerate().map(|(k, &l)| l + theta * k as f64).fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lp.iter().enumerate().map(|(k, &l)| (l + theta * k as f64 - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let mean = |theta: f64| -> f64 { weights(theta).iter().enumerate().map(|(k, w)| k as f64 * w).sum() };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while mean(lo) > target && lo > -1e4 {
        lo *= 2.0;
    }
    while mean(hi) < target && hi < 1e4 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    weights(0.5 * (lo + hi))
}

/// `powers[k]` = pmf of the sum of k tilted draws on `0..n`, for every
/// block size reached by halving n.
fn convolution_powers(spec: &OffspringSpec, n: usize) -> Result<BTreeMap<usize, Vec<f64>>> {
    let q = tilted_pmf(spec, n);
    let span = spec.span().max(1);
    let max_support = spec.max_support();
    let mut sizes = std::collections::BTreeSet::new();
    let mut frontier = vec![n];
    while let Some(k) = frontier.pop() {
        if k > 1 {
            for half in [k / 2, k - k / 2] {
                if sizes.insert(half) {
                    frontier.push(half);
                }
            }
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut powers: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &k in &sizes {
        let table = if k == 1 {
            q.clone()
        } else {
            let (a, b) = (&powers[&(k / 2)], &powers[&(k - k / 2)]);
            let mut c = convolve(a, b, n, &mut planner);
            for (s, x) in c.iter_mut().enumerate() {
                let beyond = max_support.is_some_and(|m| s > k * m);
                if s % span != 0 || beyond {
                    *x = 0.0;
                }
            }
            c
        };
        powers.insert(k, table);
    }
    Ok(powers)
}

/// First `len` entries of the convolution `a * b`, nonnegative.
fn convolve(a: &[f64], b: &[f64], len: usize, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    if len <= DIRECT_CONV_LIMIT {
        let mut out = vec![0.0; len];
        for (i, &x) in a.iter().enumerate().take(len) {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = (2 * len).next_power_of_two();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let lift = |v: &[f64]| -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = v.iter().take(len).map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(size, Complex::new(0.0, 0.0));
        buf
    };
    let (mut fa, mut fb) = (lift(a), lift(b));
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft.process(&mut fa);
    let mut out: Vec<f64> = fa[..len].iter().map(|z| (z.re / size as f64).max(0.0)).collect();
    let floor = FFT_FLOOR * out.iter().copied().fold(0.0, f64::max);
    for x in out.iter_mut() {
        if *x < floor {
            *x = 0.0;
        }
    }
    out
}

/// Splits the total n - 1 recursively between the two halves of each block.
fn split_sample<R: Rng + ?Sized>(powers: &BTreeMap<usize, Vec<f64>>, n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut seq = vec![0usize; n];
    // (block size, block sum, offset)
    let mut stack = vec![(n, n - 1, 0usize)];
    while let Some((k, s, offset)) = stack.pop() {
        if k == 1 {
            seq[offset] = s;
            continue;
        }
        let (k1, k2) = (k / 2, k - k / 2);
        let (p1, p2) = (&powers[&k1], &powers[&k2]);
        let weight = |a: usize| p1[a] * p2[s - a];
        let total: f64 = (0..=s).map(weight).sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate(format!(
                "no admissible split of sum {s} over a block of {k} (numerical underflow)"
            )));
        }
        let mut u = rng.random::<f64>() * total;
        let mut a = s;
        for x in 0..=s {
            let w = weight(x);
            if u < w {
                a = x;
                break;
            }
            u -= w;
        }
        // guard against rounding pushing past the last positive weight
        while weight(a) == 0.0 {
            a -= 1;
        }
        stack.push((k2, s - a, offset + k1));
        stack.push((k1, a, offset));
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn rotations_of_small_sequences() {
        assert_eq!(cycle_lemma_rotate(&[0, 2, 0]).unwrap(), vec![2, 0, 0]);
        assert_eq!(cycle_lemma_rotate(&[0, 0, 2]).unwrap(), vec![2, 0, 0]);
        assert_eq!(cycle_lemma_rotate(&[2, 0, 0]).unwrap(), vec![2, 0, 0]);
        assert_eq!(cycle_lemma_rotate(&[0]).unwrap(), vec![0]);
        assert!(cycle_lemma_rotate(&[1, 1]).is_err());
        assert!(is_preorder_sequence(&[1, 1, 0]));
        assert!(!is_preorder_sequence(&[0, 2, 0]));
    }

    #[test]
    fn binary_law_at_three_gives_cherry() {
        let mut rng = seeded(4);
        for method in [GwMethod::Rejection, GwMethod::Convolution] {
            let s = ConditionedGw::new(&OffspringSpec::binary(), 3, method).unwrap();
            for _ in 0..20 {
                assert_eq!(s.sample(&mut rng).unwrap().preorder_degrees(), vec![2, 0, 0]);
            }
        }
    }

    #[test]
    fn infeasible_sizes_and_laws() {
        let b = OffspringSpec::binary();
        assert!(matches!(ConditionedGw::new(&b, 4, GwMethod::Auto), Err(Error::Infeasible { .. })));
        let sup = OffspringSpec::Poisson { lambda: 2.0 };
        assert!(matches!(ConditionedGw::new(&sup, 10, GwMethod::Auto), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn rejection_cap_is_reported() {
        let s = ConditionedGw::with_cap(&OffspringSpec::Poisson { lambda: 1.0 }, 4000, GwMethod::Rejection, 1);
        let mut rng = seeded(1);
        // one attempt almost never succeeds at this size
        let mut capped = false;
        for _ in 0..5 {
            if let Err(Error::RejectionCap { cap: 1, n: 4000, .. }) = s.as_ref().unwrap().sample(&mut rng) {
                capped = true;
            }
        }
        assert!(capped);
    }

    #[test]
    fn auto_method_selection() {
        let p = OffspringSpec::Poisson { lambda: 1.0 };
        assert_eq!(ConditionedGw::new(&p, 1000, GwMethod::Auto).unwrap().method(), GwMethod::Rejection);
        assert_eq!(ConditionedGw::new(&p, 10_000, GwMethod::Auto).unwrap().method(), GwMethod::Convolution);
        let c = OffspringSpec::condensation_default();
        assert_eq!(ConditionedGw::new(&c, 100, GwMethod::Auto).unwrap().method(), GwMethod::Convolution);
    }

    #[test]
    fn large_trees_have_the_right_size() {
        let mut rng = seeded(2);
        let p = ConditionedGw::new(&OffspringSpec::Poisson { lambda: 1.0 }, 20_000, GwMethod::Convolution).unwrap();
        assert_eq!(p.sample(&mut rng).unwrap().n(), 20_000);
        let c = ConditionedGw::new(&OffspringSpec::condensation_default(), 20_001, GwMethod::Auto).unwrap();
        assert_eq!(c.sample(&mut rng).unwrap().n(), 20_001);
        let b = ConditionedGw::new(&OffspringSpec::binary(), 9_999, GwMethod::Convolution).unwrap();
        let t = b.sample(&mut rng).unwrap();
        assert!((0..t.n()).all(|v| t.outdegree(v) == 0 || t.outdegree(v) == 2));
    }
}
