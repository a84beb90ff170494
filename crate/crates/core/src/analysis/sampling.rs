//! Monte Carlo sampling of scaled pair distances over independent trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scaling::Scaling;
use super::stats::{fit_line, mean, quantile, std_error, LineFit};
use super::tau::EmpiricalTau;
use crate::error::{Error, Result};
use crate::generators::model::{ModelSpec, PreparedModel};
use crate::histogram::Histogram;
use crate::lca::LcaIndex;
use crate::metric::DistanceMatrix;
use crate::rng::{derive_seed, replica_rng, TreeRng};
use crate::tree::RootedTree;

/// Envelope growth tolerated by [`tightness_report`].
pub const TIGHTNESS_TOLERANCE: f64 = 0.25;

/// Pair-distance queries on one tree. Shallow trees with few queries are
/// answered by climbing parent pointers; otherwise an Euler-tour index is
/// built.
pub enum Distances<'a> {
    Climb(&'a RootedTree),
    Index(LcaIndex),
}

impl<'a> Distances<'a> {
    pub fn new(tree: &'a RootedTree, queries: usize) -> Self {
        if queries.saturating_mul(tree.height()) <= 4 * tree.n() {
            Distances::Climb(tree)
        } else {
            Distances::Index(LcaIndex::new(tree))
        }
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        match self {
            Distances::Climb(t) => t.climb_lca(u, v),
            Distances::Index(idx) => idx.lca(u, v),
        }
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        match self {
            Distances::Climb(t) => t.climb_distance(u, v),
            Distances::Index(idx) => idx.distance(u, v),
        }
    }
}

/// Runs `f` on independent trees. Replica i draws from
/// `replica_rng(seed, i)`, so results do not depend on thread scheduling.
/// Deterministic families are sampled once and handed all the work.
fn over_trees<T, F>(model: &PreparedModel, m_trees: usize, per_tree: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RootedTree, usize, &mut TreeRng) -> T + Sync,
{
    if m_trees == 0 || per_tree == 0 {
        return Err(Error::InvalidSpec("m_trees and the per-tree sample count must be positive".into()));
    }
    if model.spec().is_deterministic() {
        let mut rng = replica_rng(seed, 0);
        let tree = model.sample(&mut rng)?;
        return Ok(vec![f(&tree, m_trees * per_tree, &mut rng)]);
    }
    (0..m_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i as u64);
            let tree = model.sample(&mut rng)?;
            Ok(f(&tree, per_tree, &mut rng))
        })
        .collect()
}

/// Scaled pair distances c·d(ξ₁, ξ₂), grouped by tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSamples {
    pub n: usize,
    pub scale: f64,
    pub per_tree: Vec<Vec<f64>>,
    pub vertex_counts: Vec<usize>,
}

impl DistanceSamples {
    /// The annealed sample: all trees pooled.
    pub fn pooled(&self) -> Vec<f64> {
        self.per_tree.concat()
    }

    pub fn mean_vertices(&self) -> f64 {
        self.vertex_counts.iter().sum::<usize>() as f64 / self.vertex_counts.len() as f64
    }

    pub fn per_tree_means(&self) -> Vec<f64> {
        self.per_tree.iter().map(|xs| mean(xs)).collect()
    }

    /// Standard error of the pooled mean, with trees as the independent
    /// units when there are several of them.
    pub fn mean_stderr(&self) -> f64 {
        if self.per_tree.len() >= 2 {
            std_error(&self.per_tree_means())
        } else {
            std_error(&self.pooled())
        }
    }

    /// Unscaled distances as a histogram.
    pub fn histogram(&self) -> Histogram {
        Histogram::from_samples(self.per_tree.iter().flatten().map(|x| (x / self.scale).round() as usize))
    }
}

pub fn scaled_distance_samples(
    model: &PreparedModel,
    scale: f64,
    m_trees: usize,
    m_pairs: usize,
    seed: u64,
) -> Result<DistanceSamples> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidSpec(format!("scale must be positive, got {scale}")));
    }
    let rows = over_trees(model, m_trees, m_pairs, seed, |tree, pairs, rng| {
        let n = tree.n();
        let dist = Distances::new(tree, pairs);
        let xs: Vec<f64> = (0..pairs)
            .map(|_| {
                let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
                scale * dist.distance(u, v) as f64
            })
            .collect();
        (xs, n)
    })?;
    let (per_tree, vertex_counts) = rows.into_iter().unzip();
    Ok(DistanceSamples { n: model.n(), scale, per_tree, vertex_counts })
}

/// Pooled histogram of the depth of ξ₁ ∧ ξ₂.
pub fn lca_depth_profile(model: &PreparedModel, m_trees: usize, m_pairs: usize, seed: u64) -> Result<Histogram> {
    let parts = over_trees(model, m_trees, m_pairs, seed, |tree, pairs, rng| {
        let n = tree.n();
        let dist = Distances::new(tree, pairs);
        Histogram::from_samples((0..pairs).map(|_| {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            tree.depth(dist.lca(u, v))
        }))
    })?;
    let mut total = Histogram::new();
    for h in &parts {
        total.merge(h);
    }
    Ok(total)
}

/// Draws of the r×r scaled distance matrix, `m_draws` per tree.
pub fn rho_r_samples(
    model: &PreparedModel,
    r: usize,
    scale: f64,
    m_trees: usize,
    m_draws: usize,
    seed: u64,
) -> Result<EmpiricalTau> {
    if r == 0 {
        return Err(Error::InvalidSpec("r must be positive".into()));
    }
    let parts = over_trees(model, m_trees, m_draws, seed, |tree, draws, rng| {
        let n = tree.n();
        let dist = Distances::new(tree, draws * r * r);
        (0..draws)
            .map(|_| {
                let pts: Vec<usize> = (0..r).map(|_| rng.random_range(0..n)).collect();
                DistanceMatrix::from_fn(r, |i, j| scale * dist.distance(pts[i], pts[j]) as f64)
            })
            .collect::<Vec<_>>()
    })?;
    EmpiricalTau::new(r, parts.concat())
}

/// Mean unscaled distance at one grid size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub mean_vertices: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub points: Vec<GridPoint>,
    /// Mean distance regressed on ln(mean vertex count).
    pub fit: LineFit,
}

pub fn check_grid(grid: &[usize], min_points: usize) -> Result<()> {
    if grid.len() < min_points {
        return Err(Error::Degenerate(format!("grid needs at least {min_points} points, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(Error::Degenerate("grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Stream seed for grid size n.
pub fn grid_seed(seed: u64, n: usize) -> u64 {
    derive_seed(seed, n as u64)
}

/// Least-squares slope of the mean distance against ln n. For a
/// logarithmic limit with constant a the slope estimates 2a.
pub fn slope_vs_logn(model: &ModelSpec, grid: &[usize], m_trees: usize, m_pairs: usize, seed: u64) -> Result<SlopeFit> {
    check_grid(grid, 3)?;
    if (grid[grid.len() - 1] as f64) < 100.0 * grid[0] as f64 {
        return Err(Error::Degenerate("grid must span at least two decades".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &n in grid {
        let s = scaled_distance_samples(&model.prepare(n)?, 1.0, m_trees, m_pairs, grid_seed(seed, n))?;
        points.push(GridPoint {
            n,
            mean_vertices: s.mean_vertices(),
            mean: mean(&s.pooled()),
            stderr: s.mean_stderr(),
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.mean_vertices.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean).collect();
    Ok(SlopeFit { fit: fit_line(&x, &y)?, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub n: usize,
    /// Quantiles of the scaled distance at the requested levels.
    pub quantiles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub scaling: Scaling,
    pub levels: Vec<f64>,
    pub rows: Vec<TightnessRow>,
    /// max over n of the top quantile, divided by its value at the first n.
    pub envelope_ratio: f64,
    pub tolerance: f64,
    pub tight: bool,
}

/// Upper quantiles of c_n·d(ξ₁, ξ₂) across the grid. The sequence is
/// judged tight-consistent when the top quantile stays within
/// `1 + TIGHTNESS_TOLERANCE` of its value at the smallest n.
pub fn tightness_report(
    model: &ModelSpec,
    scaling: Scaling,
    grid: &[usize],
    levels: &[f64],
    m_trees: usize,
    m_pairs: usize,
    seed: u64,
) -> Result<TightnessReport> {
    check_grid(grid, 2)?;
    if levels.is_empty() || levels.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::InvalidSpec("quantile levels must lie in (0, 1]".into()));
    }
    let mut levels = levels.to_vec();
    levels.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(grid.len());
    for &n in grid {
        let s = scaled_distance_samples(&model.prepare(n)?, scaling.factor(n), m_trees, m_pairs, grid_seed(seed, n))?;
        let mut xs = s.pooled();
        xs.sort_by(f64::total_cmp);
        rows.push(TightnessRow { n, quantiles: levels.iter().map(|&l| quantile(&xs, l)).collect() });
    }
    Ok(tightness_from_rows(scaling, levels, rows))
}

/// Envelope verdict for precomputed quantile rows (levels ascending).
pub fn tightness_from_rows(scaling: Scaling, levels: Vec<f64>, rows: Vec<TightnessRow>) -> TightnessReport {
    let top = |row: &TightnessRow| *row.quantiles.last().unwrap();
    let first = top(&rows[0]);
    let peak = rows.iter().map(top).fold(f64::NEG_INFINITY, f64::max);
    let envelope_ratio = if first > 0.0 {
        peak / first
    } else if peak > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    TightnessReport {
        scaling,
        levels,
        rows,
        envelope_ratio,
        tolerance: TIGHTNESS_TOLERANCE,
        tight: envelope_ratio <= 1.0 + TIGHTNESS_TOLERANCE,
    }
}
