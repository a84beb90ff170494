//! Binary search trees built by inserting a uniform random permutation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::tree::{RootedTree, NO_PARENT};

/// Inserts the keys of a uniform permutation of `0..n`; vertex i holds the
/// i-th inserted key. Children are ordered left before right.
pub fn sample_bst<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RootedTree {
    assert!(n >= 1);
    let mut keys: Vec<usize> = (0..n).collect();
    keys.shuffle(rng);
    // node for each key slot; gaps between inserted keys are found through
    // the predecessor/successor structure of a balanced set
    let mut parent = vec![NO_PARENT; n];
    let mut vertex_of_key = vec![usize::MAX; n];
    let mut left = vec![usize::MAX; n];
    let mut right = vec![usize::MAX; n];
    vertex_of_key[keys[0]] = 0;
    let mut set = std::collections::BTreeSet::new();
    set.insert(keys[0]);
    for (v, &k) in keys.iter().enumerate().skip(1) {
        // the new key hangs below whichever neighbour was inserted later
        let pred = set.range(..k).next_back().copied();
        let succ = set.range(k..).next().copied();
        let p = match (pred, succ) {
            (Some(a), Some(b)) => {
                if vertex_of_key[a] > vertex_of_key[b] {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let pv = vertex_of_key[p];
        parent[v] = pv;
        if k < p {
            left[pv] = v;
        } else {
            right[pv] = v;
        }
        vertex_of_key[k] = v;
        set.insert(k);
    }
    let key: Vec<usize> = (0..n).map(|v| if parent[v] != NO_PARENT && left[parent[v]] == v { 0 } else { 1 }).collect();
    RootedTree::from_parent_vec_keyed(parent, &key).expect("bst is a tree")
}
