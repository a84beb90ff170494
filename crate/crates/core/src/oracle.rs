//! Exact brute-force quantities used as ground truth.

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::tree::RootedTree;

/// Largest tree accepted by the quadratic oracles.
pub const EXACT_PMF_LIMIT: usize = 2000;

/// Mean of d(ξ₁, ξ₂) for independent uniform vertices, via edge cuts.
pub fn exact_mean_distance(tree: &RootedTree) -> f64 {
    let n = tree.n() as f64;
    let sizes = tree.subtree_sizes();
    let cut: f64 = (0..tree.n())
        .filter(|&v| v != tree.root())
        .map(|v| {
            let s = sizes[v] as f64;
            s * (n - s)
        })
        .sum();
    2.0 * cut / (n * n)
}

/// Exact pmf of d(ξ₁, ξ₂), including the atom at 0 of mass 1/n.
pub fn exact_distance_distribution(tree: &RootedTree) -> Result<Histogram> {
    let n = tree.n();
    if n > EXACT_PMF_LIMIT {
        return Err(Error::SizeGuard { n, limit: EXACT_PMF_LIMIT });
    }
    let mut counts = vec![0.0; n];
    for v in 0..n {
        for d in tree.bfs_distances(v) {
            counts[d] += 1.0;
        }
    }
    Ok(Histogram::from_weights(counts.into_iter().map(|c| c / (n * n) as f64).collect()))
}

/// Vertex of maximum outdegree, ties going to the earliest in preorder.
pub fn max_outdegree_vertex(tree: &RootedTree) -> (usize, usize) {
    let mut best = (tree.root(), tree.outdegree(tree.root()));
    for &v in tree.preorder() {
        let d = tree.outdegree(v);
        if d > best.1 {
            best = (v, d);
        }
    }
    best
}

/// Exact pmf of the depth of ξ₁ ∧ ξ₂. A vertex z is the meet with
/// probability (s_z² − Σ_children s_c²)/n².
pub fn exact_lca_depth_distribution(tree: &RootedTree) -> Histogram {
    let n = tree.n() as f64;
    let sizes = tree.subtree_sizes();
    let mut h = Histogram::new();
    for z in 0..tree.n() {
        let s = sizes[z] as f64;
        let below: f64 = tree.children(z).iter().map(|&c| (sizes[c] as f64).powi(2)).sum();
        h.add(tree.depth(z), (s * s - below) / (n * n));
    }
    h
}

/// Exact pmf of the depth of a uniform vertex.
pub fn exact_depth_distribution(tree: &RootedTree) -> Histogram {
    Histogram::from_samples(tree.depths().iter().map(|&d| d as usize))
}
