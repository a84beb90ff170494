//! Distances seen from the vertex of maximal outdegree.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{quantile, total_variation_to_pmf};
use crate::dendrons::PointLaw;
use crate::error::Result;
use crate::generators::model::PreparedModel;
use crate::histogram::Histogram;
use crate::oracle::max_outdegree_vertex;
use crate::rng::replica_rng;
use crate::tree::RootedTree;

/// Empirical pmf of d(ξ, v*) over `m` uniform vertices.
pub fn condensation_profile<R: Rng + ?Sized>(tree: &RootedTree, m: usize, rng: &mut R) -> Histogram {
    let (v, _) = max_outdegree_vertex(tree);
    let dist = tree.bfs_distances(v);
    Histogram::from_samples((0..m).map(|_| dist[rng.random_range(0..tree.n())]))
}

/// Exact pmf of d(ξ, v*) for a uniform vertex ξ.
pub fn exact_condensation_profile(tree: &RootedTree) -> Histogram {
    let (v, _) = max_outdegree_vertex(tree);
    Histogram::from_samples(tree.bfs_distances(v))
}

/// Labels every vertex with its component of the tree minus v*
/// (`usize::MAX` for v* itself).
fn components(tree: &RootedTree, v: usize) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; tree.n()];
    let mut count = 0;
    for &u in tree.preorder() {
        if u == v {
            continue;
        }
        label[u] = match tree.parent(u) {
            Some(p) if p != v && label[p] != usize::MAX => label[p],
            _ => {
                count += 1;
                count - 1
            }
        };
    }
    // the component above v* is entered at the root, which preorder visits first
    (label, count)
}

/// Exact P(d(ξ₁, ξ₂) ≠ d(ξ₁, v*) + d(ξ₂, v*)). The geodesic misses v*
/// exactly when both points fall in the same component of the tree
/// with v* removed, so the probability is Σ c²/n² over component sizes c.
pub fn exact_additivity_failure(tree: &RootedTree) -> f64 {
    let (v, _) = max_outdegree_vertex(tree);
    let (label, count) = components(tree, v);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        if l != usize::MAX {
            sizes[l] += 1;
        }
    }
    let n = tree.n() as f64;
    sizes.iter().map(|&c| (c as f64).powi(2)).sum::<f64>() / (n * n)
}

/// Monte Carlo frequency of the same event over `m` pairs.
pub fn additivity_failure<R: Rng + ?Sized>(tree: &RootedTree, m: usize, rng: &mut R) -> f64 {
    let (v, _) = max_outdegree_vertex(tree);
    let (label, _) = components(tree, v);
    let n = tree.n();
    let hits = (0..m)
        .filter(|_| {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            label[a] != usize::MAX && label[a] == label[b]
        })
        .count();
    hits as f64 / m as f64
}

/// One tree's condensation summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeCondensation {
    pub n: usize,
    pub max_degree: usize,
    /// TV between the exact per-tree law of d(ξ, v*) and the target.
    pub tv_exact: f64,
    pub additivity_exact: f64,
    pub additivity_empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensationStudy {
    pub kappa: f64,
    pub trees: Vec<TreeCondensation>,
    /// Pooled empirical law of d(ξ, v*).
    pub profile: Histogram,
    pub tv_pooled: f64,
    pub additivity_pooled: f64,
    pub degree_fraction: f64,
}

impl CondensationStudy {
    pub fn tv_quantile(&self, level: f64) -> f64 {
        let mut tvs: Vec<f64> = self.trees.iter().map(|t| t.tv_exact).collect();
        tvs.sort_by(f64::total_cmp);
        quantile(&tvs, level)
    }
}

/// Per-tree and pooled comparison of d(ξ, v*) with Ge(1 - κ) on {1, 2, …}.
pub fn condensation_study(
    model: &PreparedModel,
    kappa: f64,
    m_trees: usize,
    m_samples: usize,
    seed: u64,
) -> Result<CondensationStudy> {
    let target = PointLaw::Geometric1 { q: 1.0 - kappa };
    target.validate()?;
    let horizon = 200;
    let rows: Vec<(TreeCondensation, Histogram)> = (0..m_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i as u64);
            let tree = model.sample(&mut rng)?;
            let (_, max_degree) = max_outdegree_vertex(&tree);
            let profile = condensation_profile(&tree, m_samples, &mut rng);
            let summary = TreeCondensation {
                n: tree.n(),
                max_degree,
                tv_exact: total_variation_to_pmf(&exact_condensation_profile(&tree), |k| target.pmf(k), horizon),
                additivity_exact: exact_additivity_failure(&tree),
                additivity_empirical: additivity_failure(&tree, m_samples, &mut rng),
            };
            Ok((summary, profile))
        })
        .collect::<Result<_>>()?;
    let mut profile = Histogram::new();
    for (_, h) in &rows {
        profile.merge(h);
    }
    let trees: Vec<TreeCondensation> = rows.into_iter().map(|(t, _)| t).collect();
    let k = trees.len() as f64;
    Ok(CondensationStudy {
        kappa,
        tv_pooled: total_variation_to_pmf(&profile, |j| target.pmf(j), horizon),
        additivity_pooled: trees.iter().map(|t| t.additivity_empirical).sum::<f64>() / k,
        degree_fraction: trees.iter().map(|t| t.max_degree as f64 / t.n as f64).sum::<f64>() / k,
        profile,
        trees,
    })
}
