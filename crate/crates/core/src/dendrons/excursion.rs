//! Real trees coded by nonnegative excursions on a uniform grid.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rmq::RangeMin;

/// Grid values g(k/m), k = 0..=m, with g(0) = g(1) = 0 and g ≥ 0.
#[derive(Debug, Clone)]
pub struct ExcursionTree {
    values: RangeMin<f64>,
    /// Cyclic shift that turned the underlying bridge into this excursion.
    shift: usize,
}

impl ExcursionTree {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::with_shift(values, 0)
    }

    fn with_shift(values: Vec<f64>, shift: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSpec("an excursion needs at least two grid points".into()));
        }
        if values[0] != 0.0 || *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidSpec("excursion must vanish at both endpoints".into()));
        }
        if let Some(k) = values.iter().position(|&g| !(g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidSpec(format!("excursion value at grid point {k} is {}", values[k])));
        }
        Ok(ExcursionTree { values: RangeMin::new(values), shift })
    }

    /// Vervaat transform of the bridge built from the given walk increments:
    /// the bridge is rotated to start at its first minimum and scaled by 1/√m.
    pub fn from_walk_increments(increments: &[f64]) -> Result<Self> {
        let m = increments.len();
        if m < 2 {
            return Err(Error::InvalidSpec(format!("need m ≥ 2 increments, got {m}")));
        }
        let bridge = bridge_from_increments(increments);
        let shift = first_argmin(&bridge[..m]);
        let base = bridge[shift];
        let scale = 1.0 / (m as f64).sqrt();
        let mut values: Vec<f64> = (0..=m).map(|j| (bridge[(shift + j) % m] - base).max(0.0) * scale).collect();
        values[m] = 0.0;
        Self::with_shift(values, shift)
    }

    /// Number of grid intervals.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn max(&self) -> f64 {
        self.values().iter().copied().fold(0.0, f64::max)
    }

    /// c·g, keeping the shift.
    pub fn scaled(&self, factor: f64) -> ExcursionTree {
        let values = self.values().iter().map(|g| g * factor).collect();
        ExcursionTree { values: RangeMin::new(values), shift: self.shift }
    }

    /// g(i) + g(j) - 2 min g over grid points between i and j.
    pub fn grid_distance(&self, i: usize, j: usize) -> f64 {
        let g = self.values();
        (g[i] + g[j] - 2.0 * self.values.min(i, j)).max(0.0)
    }

    /// Grid point nearest to t ∈ [0, 1].
    pub fn snap(&self, t: f64) -> usize {
        ((t.clamp(0.0, 1.0) * self.m() as f64).round() as usize).min(self.m())
    }

    /// Tree distance between the points coded by s and t.
    pub fn excursion_distance(&self, s: f64, t: f64) -> f64 {
        self.grid_distance(self.snap(s), self.snap(t))
    }

    /// Grid index in this excursion of bridge-frame index `i`.
    pub fn from_bridge_index(&self, i: usize) -> usize {
        let m = self.m();
        (i % m + m - self.shift) % m
    }

    /// A uniform grid point; 0 and m code the same tree point so m is skipped.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.m())
    }

    /// `t,g` rows with a header.
    pub fn to_csv(&self) -> String {
        let m = self.m() as f64;
        let mut out = String::from("t,g\n");
        for (k, g) in self.values().iter().enumerate() {
            writeln!(out, "{},{}", k as f64 / m, g).unwrap();
        }
        out
    }
}

/// B_k = W_k - (k/m) W_m for k = 0..=m.
fn bridge_from_increments(increments: &[f64]) -> Vec<f64> {
    let m = increments.len();
    let mut walk = Vec::with_capacity(m + 1);
    walk.push(0.0);
    let mut acc = 0.0;
    for &x in increments {
        acc += x;
        walk.push(acc);
    }
    let end = walk[m];
    walk.iter().enumerate().map(|(k, w)| w - end * k as f64 / m as f64).collect()
}

fn first_argmin(xs: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in xs.iter().enumerate() {
        if x < xs[best] {
            best = k;
        }
    }
    best
}

/// Grid approximation of the standard Brownian excursion with m steps.
pub fn sample_brownian_excursion<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<ExcursionTree> {
    let increments: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    ExcursionTree::from_walk_increments(&increments)
}

/// Two excursions driven by the same Gaussian walk: one with m steps and
/// one with m/2 steps whose increments are normalised pair sums of the
/// first. Used for grid-refinement checks with common random numbers.
pub fn sample_coupled_excursions<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<(ExcursionTree, ExcursionTree)> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!("coupled excursions need an even m ≥ 4, got {m}")));
    }
    let fine: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
    let coarse: Vec<f64> = fine.chunks(2).map(|c| (c[0] + c[1]) * std::f64::consts::FRAC_1_SQRT_2).collect();
    Ok((ExcursionTree::from_walk_increments(&fine)?, ExcursionTree::from_walk_increments(&coarse)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn triangle(m: usize) -> ExcursionTree {
        let values = (0..=m).map(|k| 1.0 - (2.0 * k as f64 / m as f64 - 1.0).abs()).collect();
        ExcursionTree::from_values(values).unwrap()
    }

    #[test]
    fn triangle_distances() {
        let t = triangle(8);
        assert_eq!(t.excursion_distance(0.3, 0.3), 0.0);
        assert!((t.excursion_distance(0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!(t.excursion_distance(0.25, 0.75).abs() < 1e-15);
        assert!((t.excursion_distance(0.75, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ExcursionTree::from_values(vec![0.0, 1.0]).is_err());
        assert!(ExcursionTree::from_values(vec![0.0, -1.0, 0.0]).is_err());
        assert!(ExcursionTree::from_values(vec![0.0]).is_err());
    }

    #[test]
    fn excursion_invariants() {
        let mut rng = seeded(9);
        for m in [2usize, 3, 64, 1024] {
            let e = sample_brownian_excursion(m, &mut rng).unwrap();
            let g = e.values();
            assert_eq!(g.len(), m + 1);
            assert_eq!((g[0], g[m]), (0.0, 0.0));
            assert!(g.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn pseudometric_on_random_triples() {
        let mut rng = seeded(10);
        let e = sample_brownian_excursion(4096, &mut rng).unwrap();
        for _ in 0..20_000 {
            let (i, j, k) = (e.sample_index(&mut rng), e.sample_index(&mut rng), e.sample_index(&mut rng));
            assert_eq!(e.grid_distance(i, j), e.grid_distance(j, i));
            assert!(e.grid_distance(i, k) <= e.grid_distance(i, j) + e.grid_distance(j, k) + 1e-12);
        }
    }

    #[test]
    fn bridge_frame_mapping() {
        let mut rng = seeded(11);
        let (fine, coarse) = sample_coupled_excursions(1024, &mut rng).unwrap();
        assert_eq!(fine.m(), 1024);
        assert_eq!(coarse.m(), 512);
        assert_eq!(fine.values()[fine.from_bridge_index(fine.shift())], 0.0);
        assert_eq!(coarse.from_bridge_index(coarse.shift()), 0);
    }

    #[test]
    fn csv_export() {
        let csv = triangle(2).to_csv();
        assert_eq!(csv, "t,g\n0,0\n0.5,1\n1,0\n");
    }
}
