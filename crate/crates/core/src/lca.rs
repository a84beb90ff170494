//! Lowest common ancestors via an Euler tour and a range-minimum structure.

use crate::error::Result;
use crate::rmq::RangeMin;
use crate::tree::RootedTree;

/// O(n) build, O(1) queries. Immutable once built; share freely across threads.
#[derive(Debug, Clone)]
pub struct LcaIndex {
    first: Vec<u32>,
    depth: Vec<u32>,
    /// Euler tour entries packed as `depth << 32 | vertex`, so the minimum
    /// entry of a tour window is the shallowest vertex in it.
    tour: RangeMin<u64>,
}

impl LcaIndex {
    pub fn new(tree: &RootedTree) -> Self {
        let n = tree.n();
        assert!(n < u32::MAX as usize, "tree too large for the LCA index");
        let depth = tree.depths().to_vec();
        let mut first = vec![0u32; n];
        let mut tour = Vec::with_capacity(2 * n - 1);
        let pack = |v: usize| ((depth[v] as u64) << 32) | v as u64;
        // (vertex, index of next child to descend into)
        let mut stack: Vec<(usize, usize)> = vec![(tree.root(), 0)];
        first[tree.root()] = 0;
        tour.push(pack(tree.root()));
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            let kids = tree.children(v);
            if next < kids.len() {
                top.1 += 1;
                let c = kids[next];
                first[c] = tour.len() as u32;
                tour.push(pack(c));
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    tour.push(pack(p));
                }
            }
        }
        LcaIndex { first, depth, tour: RangeMin::new(tour) }
    }

    pub fn n(&self) -> usize {
        self.first.len()
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let entry = self.tour.min(self.first[u] as usize, self.first[v] as usize);
        (entry & 0xFFFF_FFFF) as usize
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    /// Graph distance `h(u) + h(v) - 2 h(u ∧ v)`.
    pub fn distance(&self, u: usize, v: usize) -> usize {
        let w = self.lca(u, v);
        (self.depth[u] + self.depth[v] - 2 * self.depth[w]) as usize
    }

    pub fn checked_distance(&self, u: usize, v: usize) -> Result<usize> {
        for x in [u, v] {
            if x >= self.n() {
                return Err(crate::Error::VertexOutOfRange { vertex: x, n: self.n() });
            }
        }
        Ok(self.distance(u, v))
    }
}

/// Reference LCA by walking parent pointers; used as a test oracle.
pub fn naive_lca(tree: &RootedTree, mut u: usize, mut v: usize) -> usize {
    while tree.depth(u) > tree.depth(v) {
        u = tree.parent(u).unwrap();
    }
    while tree.depth(v) > tree.depth(u) {
        v = tree.parent(v).unwrap();
    }
    while u != v {
        u = tree.parent(u).unwrap();
        v = tree.parent(v).unwrap();
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distances() {
        let t = RootedTree::from_parents(&[None, Some(0), Some(1), Some(2), Some(3)]).unwrap();
        let idx = LcaIndex::new(&t);
        assert_eq!(idx.distance(2, 4), 2);
        assert_eq!(idx.lca(2, 4), 2);
        assert_eq!(idx.distance(3, 3), 0);
        assert!(idx.checked_distance(0, 9).is_err());
    }

    #[test]
    fn star_leaves_are_two_apart() {
        let t = RootedTree::from_parents(&[None, Some(0), Some(0), Some(0), Some(0)]).unwrap();
        let idx = LcaIndex::new(&t);
        for a in 1..5 {
            for b in 1..5 {
                assert_eq!(idx.distance(a, b), if a == b { 0 } else { 2 });
            }
        }
    }

    #[test]
    fn single_vertex() {
        let t = RootedTree::from_parents(&[None]).unwrap();
        let idx = LcaIndex::new(&t);
        assert_eq!(idx.lca(0, 0), 0);
        assert_eq!(idx.distance(0, 0), 0);
    }
}
