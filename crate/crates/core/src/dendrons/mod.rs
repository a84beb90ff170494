//! Long dendrons as samplers of augmented points and their distances.
//!
//! A point is a base point in a real tree plus an extra length; two points
//! with distinct indices are at distance d(x, y) + a + b.

pub mod excursion;
pub mod point_law;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
pub use excursion::{sample_brownian_excursion, sample_coupled_excursions, ExcursionTree};
pub use point_law::PointLaw;

/// Default excursion grid size.
pub const DEFAULT_GRID: usize = 1 << 16;

#[derive(Debug, Clone)]
pub enum Dendron {
    /// One-point base; all of the distance sits in the extra lengths.
    Point(PointLaw),
    /// The segment [0, length] with uniform measure.
    Interval { length: f64 },
    /// The real tree coded by an excursion, with uniform grid measure.
    Excursion(Arc<ExcursionTree>),
}

/// A sampled point: base position (interval coordinate or grid index)
/// plus the extra length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DendronPoint {
    pub base: f64,
    pub extra: f64,
}

impl Dendron {
    /// Ω_a.
    pub fn constant(a: f64) -> Self {
        Dendron::Point(PointLaw::Dirac { a })
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DendronPoint {
        match self {
            Dendron::Point(nu) => DendronPoint { base: 0.0, extra: nu.sample(rng) },
            Dendron::Interval { length } => DendronPoint { base: rng.random::<f64>() * length, extra: 0.0 },
            Dendron::Excursion(e) => DendronPoint { base: e.sample_index(rng) as f64, extra: 0.0 },
        }
    }

    /// d_D between two points carrying distinct indices.
    pub fn distance(&self, x: &DendronPoint, y: &DendronPoint) -> f64 {
        let base = match self {
            Dendron::Point(_) => 0.0,
            Dendron::Interval { .. } => (x.base - y.base).abs(),
            Dendron::Excursion(e) => e.grid_distance(x.base as usize, y.base as usize),
        };
        base + x.extra + y.extra
    }

    /// Distance between two independent points.
    pub fn pair_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.sample_point(rng);
        let y = self.sample_point(rng);
        self.distance(&x, &y)
    }

    /// One draw of the r×r distance matrix of independent points.
    pub fn rho_r<R: Rng + ?Sized>(&self, r: usize, rng: &mut R) -> DistanceMatrix {
        let pts: Vec<DendronPoint> = (0..r).map(|_| self.sample_point(rng)).collect();
        DistanceMatrix::from_fn(r, |i, j| self.distance(&pts[i], &pts[j]))
    }
}

pub fn pair_distance<R: Rng + ?Sized>(d: &Dendron, rng: &mut R) -> f64 {
    d.pair_distance(rng)
}

pub fn rho_r_dendron<R: Rng + ?Sized>(d: &Dendron, r: usize, rng: &mut R) -> DistanceMatrix {
    d.rho_r(r, rng)
}

/// The excursion tree of (2/σ)·B^ex on an m-step grid.
pub fn crt_dendron<R: Rng + ?Sized>(sigma: f64, m: usize, rng: &mut R) -> Result<Dendron> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSpec(format!("sigma must be positive, got {sigma}")));
    }
    let e = sample_brownian_excursion(m, rng)?;
    Ok(Dendron::Excursion(Arc::new(e.scaled(2.0 / sigma))))
}

/// Serializable dendron description, e.g.
/// `{"kind":"point","nu":{"kind":"geometric1","q":0.4447}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DendronSpec {
    Point {
        nu: PointLaw,
    },
    Interval {
        length: f64,
    },
    /// A fresh CRT excursion per realization.
    Crt {
        sigma: f64,
        #[serde(default = "default_grid")]
        m: usize,
    },
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

impl DendronSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DendronSpec::Point { nu } => nu.validate(),
            DendronSpec::Interval { length } if !(*length > 0.0 && length.is_finite()) => {
                Err(Error::InvalidSpec(format!("interval length must be positive, got {length}")))
            }
            DendronSpec::Crt { sigma, m } if !(*sigma > 0.0) || *m < 2 => {
                Err(Error::InvalidSpec(format!("crt needs sigma > 0 and m ≥ 2, got {sigma}, {m}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether each realization is itself random.
    pub fn is_random(&self) -> bool {
        matches!(self, DendronSpec::Crt { .. })
    }

    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dendron> {
        self.validate()?;
        Ok(match self {
            DendronSpec::Point { nu } => Dendron::Point(nu.clone()),
            DendronSpec::Interval { length } => Dendron::Interval { length: *length },
            DendronSpec::Crt { sigma, m } => crt_dendron(*sigma, *m, rng)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn constant_dendron_matrices() {
        let mut rng = seeded(1);
        let d = Dendron::constant(1.0);
        assert_eq!(d.pair_distance(&mut rng), 2.0);
        let m = d.rho_r(5, &mut rng);
        assert!(m.upper().all(|x| x == 2.0));
        assert_eq!(d.rho_r(1, &mut rng), DistanceMatrix::zeros(1));
    }

    #[test]
    fn geometric_point_dendron() {
        let mut rng = seeded(2);
        let d = Dendron::Point(PointLaw::Geometric1 { q: 0.5 });
        let m = 200_000;
        let xs: Vec<f64> = (0..m).map(|_| d.pair_distance(&mut rng)).collect();
        assert!(xs.iter().all(|&x| x >= 2.0));
        let p2 = xs.iter().filter(|&&x| x == 2.0).count() as f64 / m as f64;
        let mean = xs.iter().sum::<f64>() / m as f64;
        assert!((p2 - 0.25).abs() < 0.005, "{p2}");
        assert!((mean - 4.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn point_matrices_are_additive() {
        let mut rng = seeded(3);
        let d = Dendron::Point(PointLaw::Geometric1 { q: 0.3 });
        for _ in 0..100 {
            let a = d.rho_r(5, &mut rng);
            for i in 0..5 {
                let others: Vec<usize> = (0..5).filter(|&j| j != i).collect();
                let x = 0.5 * (a.get(i, others[0]) + a.get(i, others[1]) - a.get(others[0], others[1]));
                for &j in &others {
                    for &k in &others {
                        if j != k {
                            assert_eq!(0.5 * (a.get(i, j) + a.get(i, k) - a.get(j, k)), x);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interval_mean_is_a_third() {
        let mut rng = seeded(4);
        let d = Dendron::Interval { length: 1.0 };
        let m = 1_000_000;
        let mean = (0..m).map(|_| d.pair_distance(&mut rng)).sum::<f64>() / m as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.002, "{mean}");
    }

    #[test]
    fn crt_scaling_is_linear() {
        let e = Arc::new(sample_brownian_excursion(1024, &mut seeded(5)).unwrap());
        let d1 = Dendron::Excursion(Arc::new(e.scaled(2.0)));
        let d2 = Dendron::Excursion(Arc::new(e.scaled(1.0)));
        let (mut r1, mut r2) = (seeded(6), seeded(6));
        for _ in 0..100 {
            let (a, b) = (d1.pair_distance(&mut r1), d2.pair_distance(&mut r2));
            assert!((b - 0.5 * a).abs() < 1e-12);
        }
        let mut rng = seeded(7);
        let d = crt_dendron(1.0, 4096, &mut rng).unwrap();
        for _ in 0..100 {
            assert!(d.rho_r(3, &mut rng).is_tree_metric(1e-9));
        }
    }

    #[test]
    fn spec_json() {
        let s: DendronSpec = serde_json::from_str(r#"{"kind":"point","nu":{"kind":"geometric1","q":0.4447}}"#).unwrap();
        assert_eq!(s, DendronSpec::Point { nu: PointLaw::Geometric1 { q: 0.4447 } });
        let c: DendronSpec = serde_json::from_str(r#"{"kind":"crt","sigma":1.0}"#).unwrap();
        assert_eq!(c, DendronSpec::Crt { sigma: 1.0, m: DEFAULT_GRID });
        assert!(DendronSpec::Interval { length: 0.0 }.realize(&mut seeded(1)).is_err());
    }
}
