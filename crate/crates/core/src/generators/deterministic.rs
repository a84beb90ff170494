//! Deterministic families: paths, stars, complete b-ary trees, superstars.

use crate::error::{Error, Result};
use crate::tree::{RootedTree, NO_PARENT};

/// Path on n vertices rooted at an endpoint.
pub fn path(n: usize) -> RootedTree {
    assert!(n >= 1);
    let parent = (0..n).map(|v| if v == 0 { NO_PARENT } else { v - 1 }).collect();
    RootedTree::from_parent_vec(parent).expect("path is a tree")
}

/// Star with n vertices rooted at the centre.
pub fn star(n: usize) -> RootedTree {
    assert!(n >= 1);
    let parent = (0..n).map(|v| if v == 0 { NO_PARENT } else { 0 }).collect();
    RootedTree::from_parent_vec(parent).expect("star is a tree")
}

/// Complete b-ary tree of height h, labelled in breadth-first order.
pub fn complete_bary(b: usize, h: usize) -> RootedTree {
    assert!(b >= 1);
    let n: usize = (0..=h).map(|k| b.pow(k as u32)).sum();
    let parent = (0..n).map(|v| if v == 0 { NO_PARENT } else { (v - 1) / b }).collect();
    RootedTree::from_parent_vec(parent).expect("complete tree is a tree")
}

/// Centre with `arms[k - 1]` pendant paths of k edges each.
pub fn superstar(arms: &[usize]) -> RootedTree {
    let mut parent = vec![NO_PARENT];
    for (i, &count) in arms.iter().enumerate() {
        let len = i + 1;
        for _ in 0..count {
            let mut prev = 0;
            for _ in 0..len {
                parent.push(prev);
                prev = parent.len() - 1;
            }
        }
    }
    RootedTree::from_parent_vec(parent).expect("superstar is a tree")
}

/// Arm counts N_k summing to `arms` with N_k ≈ arms·p_k (largest remainders).
pub fn superstar_profile(p: &[f64], arms: usize) -> Result<Vec<usize>> {
    let total: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(format!("arm-length profile {p:?} is not a pmf")));
    }
    let exact: Vec<f64> = p.iter().map(|&x| x * arms as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())).then(i.cmp(&j)));
    let missing = arms - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    Ok(counts)
}
