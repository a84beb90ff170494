//! Split trees: balls routed down a b-ary tree by random split vectors.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{RootedTree, NO_PARENT};

/// Law of the split vector (V_1, …, V_b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Splitter {
    /// Dirichlet with the given parameters; `[1, 1]` is (U, 1 - U).
    Dirichlet { alpha: Vec<f64> },
    /// The same vector at every vertex.
    Fixed { v: Vec<f64> },
}

impl Splitter {
    pub fn uniform2() -> Self {
        Splitter::Dirichlet { alpha: vec![1.0, 1.0] }
    }

    pub fn symmetric_dirichlet(b: usize, alpha: f64) -> Self {
        Splitter::Dirichlet { alpha: vec![alpha; b] }
    }

    pub fn b(&self) -> usize {
        match self {
            Splitter::Dirichlet { alpha } => alpha.len(),
            Splitter::Fixed { v } => v.len(),
        }
    }

    /// Fills `out` with one split vector.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Splitter::Dirichlet { alpha } => {
                let mut total = 0.0;
                for (o, &a) in out.iter_mut().zip(alpha) {
                    *o = Gamma::new(a, 1.0).expect("validated").sample(rng);
                    total += *o;
                }
                for o in out.iter_mut() {
                    *o /= total;
                }
            }
            Splitter::Fixed { v } => out.copy_from_slice(v),
        }
    }

    /// True when max V_i = 1 almost surely, so balls never spread out.
    pub fn is_trivial(&self) -> bool {
        match self {
            Splitter::Dirichlet { .. } => false,
            Splitter::Fixed { v } => v.iter().any(|&x| x >= 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Splitter::Dirichlet { alpha } if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) => {
                Err(Error::InvalidSpec(format!("Dirichlet parameters must be positive: {alpha:?}")))
            }
            Splitter::Fixed { v } => {
                let total: f64 = v.iter().sum();
                if v.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                    Err(Error::InvalidSpec(format!("split vector {v:?} is not on the simplex")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub b: usize,
    /// Capacity of a leaf.
    pub s: usize,
    /// Balls kept by a vertex when it splits.
    pub s0: usize,
    /// Balls sent to every child when a vertex splits. Nonzero values are
    /// experimental; all presets use 0.
    #[serde(default)]
    pub s1: usize,
    pub splitter: Splitter,
}

impl SplitSpec {
    /// One ball per vertex, (U, 1 - U) splits: the binary search tree.
    pub fn bst() -> Self {
        SplitSpec { b: 2, s: 1, s0: 1, s1: 0, splitter: Splitter::uniform2() }
    }

    /// One ball per vertex with symmetric Dirichlet(α) splits.
    pub fn dirichlet(b: usize, alpha: f64) -> Self {
        SplitSpec { b, s: 1, s0: 1, s1: 0, splitter: Splitter::symmetric_dirichlet(b, alpha) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.b < 2 {
            return bad(format!("branch factor must be at least 2, got {}", self.b));
        }
        if self.splitter.b() != self.b {
            return bad(format!("splitter has {} parts but b = {}", self.splitter.b(), self.b));
        }
        if self.s == 0 || self.s0 > self.s {
            return bad(format!("need s ≥ 1 and s0 ≤ s, got s = {}, s0 = {}", self.s, self.s0));
        }
        if self.s0 + self.b * self.s1 > self.s + 1 {
            return bad(format!("s0 + b·s1 = {} exceeds s + 1 = {}", self.s0 + self.b * self.s1, self.s + 1));
        }
        self.splitter.validate()?;
        if self.splitter.is_trivial() {
            return bad("split vector puts all mass on one child".into());
        }
        Ok(())
    }
}

/// A split tree with the number of balls each vertex retains.
#[derive(Debug, Clone)]
pub struct SplitTree {
    pub tree: RootedTree,
    pub balls: Vec<usize>,
}

/// Inserts `n_balls` balls one at a time from the root.
pub fn sample_split_tree<R: Rng + ?Sized>(spec: &SplitSpec, n_balls: usize, rng: &mut R) -> Result<SplitTree> {
    spec.validate()?;
    if n_balls == 0 {
        return Err(Error::EmptyTree);
    }
    let b = spec.b;
    let mut g = Growth {
        b,
        parent: vec![NO_PARENT],
        slot: vec![0],
        balls: vec![0],
        internal: vec![false],
        kids: vec![usize::MAX; b],
        split: vec![0.0; b],
    };
    spec.splitter.sample_into(rng, &mut g.split[..b]);
    let mut pending: Vec<usize> = Vec::new();
    for _ in 0..n_balls {
        pending.push(0);
        while let Some(start) = pending.pop() {
            let mut v = start;
            while g.internal[v] {
                let i = g.route(v, rng.random());
                v = g.child(v, i, spec, rng);
            }
            if g.balls[v] < spec.s {
                g.balls[v] += 1;
                continue;
            }
            // overflow: s + 1 balls at a leaf
            g.internal[v] = true;
            g.balls[v] = spec.s0;
            for i in 0..b {
                for _ in 0..spec.s1 {
                    let c = g.child(v, i, spec, rng);
                    pending.push(c);
                }
            }
            for _ in 0..spec.s + 1 - spec.s0 - b * spec.s1 {
                pending.push(v);
            }
        }
    }
    let balls = g.balls;
    let tree = RootedTree::from_parent_vec_keyed(g.parent, &g.slot)?;
    Ok(SplitTree { tree, balls })
}

struct Growth {
    b: usize,
    parent: Vec<usize>,
    slot: Vec<usize>,
    balls: Vec<usize>,
    internal: Vec<bool>,
    kids: Vec<usize>,
    split: Vec<f64>,
}

impl Growth {
    fn route(&self, v: usize, u: f64) -> usize {
        let v_split = &self.split[v * self.b..(v + 1) * self.b];
        let mut acc = 0.0;
        for (i, &x) in v_split.iter().enumerate() {
            acc += x;
            if u < acc {
                return i;
            }
        }
        // rounding: last child with positive share
        v_split.iter().rposition(|&x| x > 0.0).unwrap_or(self.b - 1)
    }

    fn child<R: Rng + ?Sized>(&mut self, v: usize, i: usize, spec: &SplitSpec, rng: &mut R) -> usize {
        let c = self.kids[v * self.b + i];
        if c != usize::MAX {
            return c;
        }
        let c = self.parent.len();
        self.parent.push(v);
        self.slot.push(i);
        self.balls.push(0);
        self.internal.push(false);
        self.kids.extend(std::iter::repeat_n(usize::MAX, self.b));
        let start = self.split.len();
        self.split.resize(start + self.b, 0.0);
        spec.splitter.sample_into(rng, &mut self.split[start..]);
        self.kids[v * self.b + i] = c;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn single_ball_is_a_root() {
        let t = sample_split_tree(&SplitSpec::bst(), 1, &mut seeded(1)).unwrap();
        assert_eq!(t.tree.n(), 1);
        assert_eq!(t.balls, vec![1]);
    }

    #[test]
    fn balls_are_conserved() {
        let mut rng = seeded(2);
        let specs = [
            SplitSpec::bst(),
            SplitSpec::dirichlet(3, 1.0),
            SplitSpec { b: 2, s: 4, s0: 1, s1: 0, splitter: Splitter::uniform2() },
            SplitSpec { b: 2, s: 3, s0: 0, s1: 1, splitter: Splitter::Fixed { v: vec![0.3, 0.7] } },
        ];
        for spec in &specs {
            let st = sample_split_tree(spec, 2000, &mut rng).unwrap();
            assert_eq!(st.balls.iter().sum::<usize>(), 2000, "{spec:?}");
            // every subtree holds a ball
            let t = &st.tree;
            let mut held = st.balls.clone();
            for &v in t.preorder().iter().rev() {
                if let Some(p) = t.parent(v) {
                    held[p] += held[v];
                }
            }
            assert!(held.iter().all(|&h| h > 0), "{spec:?}");
            assert!((0..t.n()).all(|v| t.outdegree(v) <= spec.b));
        }
    }

    #[test]
    fn one_ball_per_vertex_presets() {
        let st = sample_split_tree(&SplitSpec::dirichlet(3, 1.0), 500, &mut seeded(3)).unwrap();
        assert_eq!(st.tree.n(), 500);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = SplitSpec::bst();
        s.splitter = Splitter::Fixed { v: vec![1.0, 0.0] };
        assert!(s.validate().is_err());
        let s = SplitSpec { b: 2, s: 1, s0: 1, s1: 1, splitter: Splitter::uniform2() };
        assert!(s.validate().is_err());
        let s = SplitSpec { b: 3, s: 1, s0: 1, s1: 0, splitter: Splitter::uniform2() };
        assert!(s.validate().is_err());
    }
}
