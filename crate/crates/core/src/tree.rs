//! Finite rooted ordered trees.
//!
//! Vertices are `0..n`. Children are kept in a compressed adjacency layout
//! (one offset array plus one flat child list) so that trees with millions
//! of vertices stay cheap to build and to share between workers.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Parent sentinel stored for the root.
pub const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<usize>,
    child_start: Vec<usize>,
    child_list: Vec<usize>,
    depth: Vec<u32>,
    preorder: Vec<usize>,
}

/// Serialized form: `{"n": 5, "parent": [-1, 0, 0, 1, 1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub n: usize,
    pub parent: Vec<i64>,
}

impl RootedTree {
    /// Validates a parent array (`None` marks the root) and builds the tree.
    /// Children of each vertex are ordered by increasing index.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let mut root = None;
        let mut parent = Vec::with_capacity(n);
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => match root {
                    None => {
                        root = Some(v);
                        parent.push(NO_PARENT);
                    }
                    Some(first) => return Err(Error::MultipleRoots { first, second: v }),
                },
                Some(p) if p >= n => return Err(Error::DanglingParent { vertex: v, parent: p, n }),
                Some(p) => parent.push(p),
            }
        }
        let root = root.ok_or(Error::NoRoot)?;
        Self::assemble(root, parent)
    }

    /// Builds from a raw parent vector with [`NO_PARENT`] at the root,
    /// validating it like [`RootedTree::from_parents`].
    pub fn from_parent_vec(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let mut root = None;
        for (v, &p) in parent.iter().enumerate() {
            if p == NO_PARENT {
                if let Some(first) = root {
                    return Err(Error::MultipleRoots { first, second: v });
                }
                root = Some(v);
            } else if p >= n {
                return Err(Error::DanglingParent { vertex: v, parent: p, n });
            }
        }
        let root = root.ok_or(Error::NoRoot)?;
        Self::assemble(root, parent)
    }

    /// Like [`RootedTree::from_parent_vec`], but children of each vertex are
    /// ordered by `key` instead of by index.
    pub fn from_parent_vec_keyed(parent: Vec<usize>, key: &[usize]) -> Result<Self> {
        let mut tree = Self::from_parent_vec(parent)?;
        if key.len() != tree.n() {
            return Err(Error::InvalidSpec("child-order key has wrong length".into()));
        }
        for v in 0..tree.n() {
            let (a, b) = (tree.child_start[v], tree.child_start[v + 1]);
            tree.child_list[a..b].sort_by_key(|&c| (key[c], c));
        }
        let (depth, preorder, _) = traverse(tree.root, &tree.child_start, &tree.child_list);
        tree.depth = depth;
        tree.preorder = preorder;
        Ok(tree)
    }

    fn assemble(root: usize, parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        let mut child_start = vec![0usize; n + 1];
        for &p in &parent {
            if p != NO_PARENT {
                child_start[p + 1] += 1;
            }
        }
        for v in 0..n {
            child_start[v + 1] += child_start[v];
        }
        let mut fill = child_start.clone();
        let mut child_list = vec![0usize; n - 1];
        for (v, &p) in parent.iter().enumerate() {
            if p != NO_PARENT {
                child_list[fill[p]] = v;
                fill[p] += 1;
            }
        }
        let (depth, preorder, visited) = traverse(root, &child_start, &child_list);
        if preorder.len() != n {
            let vertex = visited.iter().position(|&seen| !seen).unwrap_or(0);
            return Err(Error::Cycle { vertex });
        }
        Ok(RootedTree { root, parent, child_start, child_list, depth, preorder })
    }

    /// Decodes a preorder outdegree sequence (a Łukasiewicz path).
    /// Vertex labels of the result equal preorder positions.
    pub fn from_preorder_degrees(degrees: &[usize]) -> Result<Self> {
        let n = degrees.len();
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let total: usize = degrees.iter().sum();
        if total != n - 1 {
            return Err(Error::InvalidPreorder(format!("degree sum {total} differs from n - 1 = {}", n - 1)));
        }
        let mut parent = vec![NO_PARENT; n];
        // (vertex, children still to attach)
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (v, &d) in degrees.iter().enumerate() {
            if v > 0 {
                let Some(top) = open.last_mut() else {
                    return Err(Error::InvalidPreorder(format!("path reaches -1 at step {v} before the end")));
                };
                parent[v] = top.0;
                top.1 -= 1;
                if top.1 == 0 {
                    open.pop();
                }
            }
            if d > 0 {
                open.push((v, d));
            }
        }
        debug_assert!(open.is_empty());
        Self::assemble(0, parent)
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.child_list[self.child_start[v]..self.child_start[v + 1]]
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.child_start[v + 1] - self.child_start[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Lowest common ancestor by climbing parent pointers, O(height).
    /// Cheaper than building an [`LcaIndex`](crate::LcaIndex) when only a
    /// few queries are made on a shallow tree.
    pub fn climb_lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
        }
        u
    }

    pub fn climb_distance(&self, u: usize, v: usize) -> usize {
        let w = self.climb_lca(u, v);
        (self.depth[u] + self.depth[v] - 2 * self.depth[w]) as usize
    }

    /// Vertices in preorder (children visited in stored order).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    pub fn preorder_degrees(&self) -> Vec<usize> {
        self.preorder.iter().map(|&v| self.outdegree(v)).collect()
    }

    /// Number of vertices in the fringe subtree of every vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.n()];
        for &v in self.preorder.iter().rev() {
            if let Some(p) = self.parent(v) {
                size[p] += size[v];
            }
        }
        size
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Graph distances from `source` to every vertex, by breadth-first search.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            let mut visit = |w: usize| {
                if dist[w] == usize::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            };
            if let Some(p) = self.parent(u) {
                visit(p);
            }
            for &c in self.children(u) {
                visit(c);
            }
        }
        dist
    }

    pub fn to_record(&self) -> TreeRecord {
        TreeRecord {
            n: self.n(),
            parent: self.parent.iter().map(|&p| if p == NO_PARENT { -1 } else { p as i64 }).collect(),
        }
    }

    pub fn from_record(record: &TreeRecord) -> Result<Self> {
        if record.parent.len() != record.n {
            return Err(Error::Parse(format!(
                "record declares n = {} but has {} parent entries",
                record.n,
                record.parent.len()
            )));
        }
        let parents = record
            .parent
            .iter()
            .map(|&p| match p {
                -1 => Ok(None),
                p if p >= 0 => Ok(Some(p as usize)),
                p => Err(Error::Parse(format!("invalid parent index {p}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parents(&parents)
    }

    /// Single-line JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("tree record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: TreeRecord = serde_json::from_str(text)?;
        Self::from_record(&record)
    }
}

/// Iterative preorder walk; returns depths, the preorder and a visited mask.
fn traverse(root: usize, child_start: &[usize], child_list: &[usize]) -> (Vec<u32>, Vec<usize>, Vec<bool>) {
    let n = child_start.len() - 1;
    let mut depth = vec![0u32; n];
    let mut visited = vec![false; n];
    let mut preorder = Vec::with_capacity(n);
    let mut stack = vec![root];
    visited[root] = true;
    while let Some(v) = stack.pop() {
        preorder.push(v);
        let kids = &child_list[child_start[v]..child_start[v + 1]];
        for &c in kids.iter().rev() {
            if visited[c] {
                // only reachable through a malformed parent array
                continue;
            }
            visited[c] = true;
            depth[c] = depth[v] + 1;
            stack.push(c);
        }
    }
    (depth, preorder, visited)
}
