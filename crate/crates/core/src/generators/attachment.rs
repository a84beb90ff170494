//! Preferential attachment with affine weights χ·outdeg + ρ.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{RootedTree, NO_PARENT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttachmentSpec {
    pub chi: f64,
    pub rho: f64,
}

impl AttachmentSpec {
    pub fn new(chi: f64, rho: f64) -> Self {
        AttachmentSpec { chi, rho }
    }
    /// Random recursive tree.
    pub fn rrt() -> Self {
        Self::new(0.0, 1.0)
    }
    /// Plane-oriented recursive tree.
    pub fn port() -> Self {
        Self::new(1.0, 1.0)
    }
    /// Binary search tree.
    pub fn bst() -> Self {
        Self::new(-1.0, 2.0)
    }
    /// Random b-ary increasing tree.
    pub fn bary(b: usize) -> Self {
        Self::new(-1.0, b as f64)
    }

    pub fn rate(&self, outdegree: usize) -> f64 {
        self.chi * outdegree as f64 + self.rho
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite() && self.chi.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "attachment needs rho > 0, got chi = {}, rho = {}",
                self.chi, self.rho
            )));
        }
        Ok(())
    }
}

/// Binary indexed tree over f64 weights.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick { tree: vec![0.0; len + 1] }
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(self.tree.len() - 2)
    }
}

/// Grows a tree from a single root to n vertices; each new vertex picks
/// its parent with probability proportional to χ·outdeg + ρ.
pub fn sample_preferential_attachment<R: Rng + ?Sized>(
    spec: AttachmentSpec,
    n: usize,
    rng: &mut R,
) -> Result<RootedTree> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    let mut parent = vec![NO_PARENT; n];
    if spec.chi == 0.0 {
        for (v, p) in parent.iter_mut().enumerate().skip(1) {
            *p = rng.random_range(0..v);
        }
        return RootedTree::from_parent_vec(parent);
    }
    let mut outdeg = vec![0usize; n];
    let mut weights = Fenwick::new(n);
    let mut total = spec.rho;
    weights.add(0, spec.rho);
    for v in 1..n {
        let u = loop {
            let u = weights.find(rng.random::<f64>() * total);
            // rounding can land on a saturated vertex; draw again
            if u < v && spec.rate(outdeg[u]) > 0.0 {
                break u;
            }
        };
        parent[v] = u;
        let old = spec.rate(outdeg[u]);
        outdeg[u] += 1;
        let mut new = spec.rate(outdeg[u]);
        if new < 0.0 {
            if new > -1e-9 * spec.rho {
                new = 0.0;
            } else {
                return Err(Error::WeightUnderflow { vertex: u, rate: new });
            }
        }
        weights.add(u, new - old);
        weights.add(v, spec.rho);
        total += new - old + spec.rho;
    }
    RootedTree::from_parent_vec(parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn fenwick_search() {
        let mut f = Fenwick::new(5);
        for (i, w) in [1.0, 0.0, 2.0, 0.5, 1.5].iter().enumerate() {
            f.add(i, *w);
        }
        assert_eq!(f.find(0.0), 0);
        assert_eq!(f.find(0.99), 0);
        assert_eq!(f.find(1.0), 2);
        assert_eq!(f.find(3.2), 3);
        assert_eq!(f.find(4.9), 4);
    }

    #[test]
    fn bounded_outdegree_for_negative_chi() {
        let mut rng = seeded(5);
        for b in [2usize, 3] {
            let t = sample_preferential_attachment(AttachmentSpec::bary(b), 5000, &mut rng).unwrap();
            assert!((0..t.n()).all(|v| t.outdegree(v) <= b));
        }
    }

    #[test]
    fn non_integer_saturation_underflows() {
        let mut rng = seeded(5);
        let r = sample_preferential_attachment(AttachmentSpec::new(-1.0, 1.5), 50, &mut rng);
        assert!(matches!(r, Err(Error::WeightUnderflow { .. })));
    }

    #[test]
    fn third_vertex_law_for_rrt_and_port() {
        let mut rng = seeded(6);
        let m = 40_000;
        for (spec, p_root) in [(AttachmentSpec::rrt(), 0.5), (AttachmentSpec::port(), 2.0 / 3.0)] {
            let hits = (0..m)
                .filter(|_| sample_preferential_attachment(spec, 3, &mut rng).unwrap().parent(2) == Some(0))
                .count();
            let f = hits as f64 / m as f64;
            assert!((f - p_root).abs() < 0.01, "{spec:?}: {f}");
        }
    }
}
