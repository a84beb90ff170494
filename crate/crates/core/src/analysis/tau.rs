//! Empirical sampling measures: bags of distance-matrix draws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// m draws of the r×r distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTau {
    pub r: usize,
    pub draws: Vec<DistanceMatrix>,
}

impl EmpiricalTau {
    pub fn new(r: usize, draws: Vec<DistanceMatrix>) -> Result<Self> {
        let tau = EmpiricalTau { r, draws };
        tau.validate()?;
        Ok(tau)
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws.is_empty() {
            return Err(Error::Degenerate("an empirical tau needs at least one draw".into()));
        }
        for d in &self.draws {
            if d.r() != self.r {
                return Err(Error::DimensionMismatch { expected: self.r, found: d.r() });
            }
            d.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let tau: EmpiricalTau = serde_json::from_str(text)?;
        tau.validate()?;
        Ok(tau)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Restriction of every draw to its first k points.
    pub fn restrict(&self, k: usize) -> Result<EmpiricalTau> {
        if k == 0 || k > self.r {
            return Err(Error::DimensionMismatch { expected: self.r, found: k });
        }
        Ok(EmpiricalTau { r: k, draws: self.draws.iter().map(|d| d.restrict(k)).collect() })
    }

    /// Entry (i, j) across draws.
    pub fn entries(&self, i: usize, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d.get(i, j)).collect()
    }
}

fn mean_cross(a: &[DistanceMatrix], b: &[DistanceMatrix]) -> f64 {
    let mut total = 0.0;
    for x in a {
        for y in b {
            total += x.upper_distance(y);
        }
    }
    total / (a.len() * b.len()) as f64
}

/// Energy distance 2E‖X−Y‖ − E‖X−X′‖ − E‖Y−Y′‖ between the two bags
/// (V-statistic form), with ‖·‖ the Euclidean norm of the strictly
/// upper-triangular entries.
pub fn energy_distance_tau(a: &EmpiricalTau, b: &EmpiricalTau) -> Result<f64> {
    if a.r != b.r {
        return Err(Error::DimensionMismatch { expected: a.r, found: b.r });
    }
    let e = 2.0 * mean_cross(&a.draws, &b.draws) - mean_cross(&a.draws, &a.draws) - mean_cross(&b.draws, &b.draws);
    Ok(e.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrons::Dendron;
    use crate::rng::seeded;

    fn bag(d: &Dendron, r: usize, m: usize, seed: u64) -> EmpiricalTau {
        let mut rng = seeded(seed);
        EmpiricalTau::new(r, (0..m).map(|_| d.rho_r(r, &mut rng)).collect()).unwrap()
    }

    #[test]
    fn constant_dendrons_at_r2() {
        let a = bag(&Dendron::constant(1.0), 2, 10, 1);
        let b = bag(&Dendron::constant(2.0), 2, 7, 2);
        assert!((energy_distance_tau(&a, &b).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(energy_distance_tau(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn r1_is_zero_and_mismatch_errors() {
        let a = bag(&Dendron::Interval { length: 1.0 }, 1, 5, 3);
        let b = bag(&Dendron::constant(3.0), 1, 5, 4);
        assert_eq!(energy_distance_tau(&a, &b).unwrap(), 0.0);
        let c = bag(&Dendron::constant(3.0), 2, 5, 4);
        assert!(energy_distance_tau(&a, &c).is_err());
    }

    #[test]
    fn halves_of_one_bag_are_close() {
        let d = Dendron::Interval { length: 1.0 };
        let all = bag(&d, 3, 800, 5);
        let (x, y) = all.draws.split_at(400);
        let e =
            energy_distance_tau(&EmpiricalTau::new(3, x.to_vec()).unwrap(), &EmpiricalTau::new(3, y.to_vec()).unwrap())
                .unwrap();
        let far = energy_distance_tau(&all, &bag(&Dendron::constant(0.5), 3, 100, 6)).unwrap();
        assert!(e < 0.02, "{e}");
        assert!(far > 10.0 * e);
    }

    #[test]
    fn json_roundtrip_and_malformed() {
        let a = bag(&Dendron::constant(1.0), 2, 3, 1);
        assert_eq!(EmpiricalTau::from_json(&a.to_json()).unwrap(), a);
        assert!(EmpiricalTau::from_json(r#"{"r":2,"draws":[[[0.0]]]}"#).is_err());
        assert!(EmpiricalTau::from_json("not json").is_err());
    }
}
