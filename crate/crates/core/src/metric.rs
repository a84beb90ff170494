//! Distance matrices between sampled points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lca::LcaIndex;
use crate::tree::RootedTree;

/// One draw of the r×r matrix of pairwise distances, stored row-major.
/// Symmetric, nonnegative, zero on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DistanceMatrix {
    r: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn zeros(r: usize) -> Self {
        DistanceMatrix { r, entries: vec![0.0; r * r] }
    }

    /// Builds the matrix with `f(i, j)` above the diagonal, mirrored below.
    pub fn from_fn(r: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(r);
        for i in 0..r {
            for j in i + 1..r {
                let d = f(i, j);
                m.entries[i * r + j] = d;
                m.entries[j * r + i] = d;
            }
        }
        m
    }

    /// Validates a row-major buffer.
    pub fn from_entries(r: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != r * r {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for r = {r}, found {}",
                r * r,
                entries.len()
            )));
        }
        let m = DistanceMatrix { r, entries };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r;
        for i in 0..r {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..r {
                let d = self.get(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {d}")));
                }
                if d != self.get(j, i) {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.r + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Strictly upper-triangular entries, row by row.
    pub fn upper(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.r).flat_map(move |i| (i + 1..self.r).map(move |j| self.get(i, j)))
    }

    /// Top-left `k×k` corner: the restriction to the first `k` points.
    pub fn restrict(&self, k: usize) -> DistanceMatrix {
        assert!(k <= self.r);
        DistanceMatrix::from_fn(k, |i, j| self.get(i, j))
    }

    /// Euclidean distance between the upper triangles of two matrices.
    pub fn upper_distance(&self, other: &DistanceMatrix) -> f64 {
        self.upper().zip(other.upper()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn satisfies_triangle(&self, tol: f64) -> bool {
        let r = self.r;
        (0..r).all(|i| (0..r).all(|j| (0..r).all(|k| self.get(i, k) <= self.get(i, j) + self.get(j, k) + tol)))
    }

    /// Four-point condition: for every quadruple the two largest of the
    /// three pairing sums agree. Holds exactly for tree-realizable metrics.
    pub fn satisfies_four_point(&self, tol: f64) -> bool {
        let r = self.r;
        for i in 0..r {
            for j in i + 1..r {
                for k in j + 1..r {
                    for l in k + 1..r {
                        let mut s = [
                            self.get(i, j) + self.get(k, l),
                            self.get(i, k) + self.get(j, l),
                            self.get(i, l) + self.get(j, k),
                        ];
                        s.sort_by(f64::total_cmp);
                        if s[2] - s[1] > tol {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Triangle inequality plus four-point condition.
    pub fn is_tree_metric(&self, tol: f64) -> bool {
        self.satisfies_triangle(tol) && self.satisfies_four_point(tol)
    }
}

impl TryFrom<Vec<Vec<f64>>> for DistanceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if rows.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        Self::from_entries(r, rows.into_iter().flatten().collect())
    }
}

impl From<DistanceMatrix> for Vec<Vec<f64>> {
    fn from(m: DistanceMatrix) -> Self {
        m.entries.chunks(m.r.max(1)).take(m.r).map(<[f64]>::to_vec).collect()
    }
}

/// `r` i.i.d. uniform vertices, with replacement.
pub fn sample_vertices<R: Rng + ?Sized>(tree: &RootedTree, r: usize, rng: &mut R) -> Vec<usize> {
    let n = tree.n();
    (0..r).map(|_| rng.random_range(0..n)).collect()
}

/// Scaled distance matrix of the given vertices. The diagonal is zero by
/// definition; repeated vertices off the diagonal give genuine zeros.
pub fn rho_r(index: &LcaIndex, vertices: &[usize], scale: f64) -> Result<DistanceMatrix> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidSpec(format!("scale must be positive, got {scale}")));
    }
    for &v in vertices {
        if v >= index.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: index.n() });
        }
    }
    Ok(DistanceMatrix::from_fn(vertices.len(), |i, j| scale * index.distance(vertices[i], vertices[j]) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::deterministic::{complete_bary, path};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_rho() {
        let t = path(5);
        let idx = LcaIndex::new(&t);
        // vertices 1, 3, 5 in one-based labels
        let m = rho_r(&idx, &[0, 2, 4], 1.0).unwrap();
        assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (2.0, 4.0, 2.0));
        assert!(m.is_tree_metric(0.0));
    }

    #[test]
    fn single_point_is_zero_matrix() {
        let t = path(3);
        let idx = LcaIndex::new(&t);
        assert_eq!(rho_r(&idx, &[1], 1.0).unwrap(), DistanceMatrix::zeros(1));
    }

    #[test]
    fn sibling_leaves_in_binary_tree() {
        let t = complete_bary(2, 3);
        let idx = LcaIndex::new(&t);
        let leaf = (0..t.n()).find(|&v| t.depth(v) == 3).unwrap();
        let parent = t.parent(leaf).unwrap();
        let sibling = t.children(parent).iter().copied().find(|&c| c != leaf).unwrap();
        let m = rho_r(&idx, &[leaf, sibling], 1.0 / 3.0).unwrap();
        assert!((m.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_vertex_keeps_zero_diagonal() {
        let t = path(4);
        let idx = LcaIndex::new(&t);
        let m = rho_r(&idx, &[2, 2, 0], 0.5).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 2), 1.0);
        assert!(rho_r(&idx, &[0], 0.0).is_err());
        assert!(rho_r(&idx, &[9], 1.0).is_err());
    }

    #[test]
    fn sampling_is_seeded_and_uniform() {
        let t = path(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_vertices(&t, 10, &mut rng).iter().all(|&v| v == 0));

        let a = sample_vertices(&path(50), 20, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_vertices(&path(50), 20, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);

        let two = path(2);
        let draws = sample_vertices(&two, 100_000, &mut rng);
        let freq = draws.iter().filter(|&&v| v == 0).count() as f64 / 1e5;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn four_point_detects_non_tree_metric() {
        // the 4-cycle metric is not tree-like
        let m = DistanceMatrix::from_fn(4, |i, j| {
            let d = (j - i) % 4;
            d.min(4 - d) as f64
        });
        assert!(m.satisfies_triangle(0.0));
        assert!(!m.satisfies_four_point(1e-12));
    }

    #[test]
    fn serde_as_nested_rows() {
        let m = DistanceMatrix::from_fn(2, |_, _| 3.0);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[0.0,3.0],[3.0,0.0]]");
        let back: DistanceMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<DistanceMatrix>("[[0.0,1.0],[2.0,0.0]]").is_err());
        assert!(serde_json::from_str::<DistanceMatrix>("[[1.0]]").is_err());
    }
}
