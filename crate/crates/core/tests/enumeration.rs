//! Exact small-n laws checked by χ² against brute-force enumeration.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use treelimit::generators::gw::{is_preorder_sequence, ConditionedGw, GwMethod};
use treelimit::generators::offspring::OffspringSpec;
use treelimit::generators::simply_generated::{SimplyGenerated, WeightSpec};
use treelimit::rng::seeded;
use treelimit::RootedTree;

const DRAWS: usize = 10_000;

/// All preorder degree sequences of ordered trees on n vertices.
fn ordered_trees(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            if is_preorder_sequence(prefix) {
                out.push(prefix.clone());
            }
            return;
        }
        for d in 0..n {
            prefix.push(d);
            extend(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), n, &mut out);
    out
}

/// Pearson statistic against expected probabilities; panics above the
/// 0.999 quantile of the matching χ² law.
fn chi_square<K: Ord>(observed: &BTreeMap<K, usize>, expected: &BTreeMap<K, f64>) {
    assert!(observed.keys().all(|k| expected.contains_key(k)), "observed an impossible outcome");
    let total: usize = observed.values().sum();
    let stat: f64 = expected
        .iter()
        .map(|(k, p)| {
            let e = p * total as f64;
            let o = *observed.get(k).unwrap_or(&0) as f64;
            (o - e).powi(2) / e
        })
        .sum();
    let dof = (expected.len() - 1) as f64;
    let limit = ChiSquared::new(dof).unwrap().inverse_cdf(0.999);
    assert!(stat <= limit, "chi-square {stat} above {limit} with {dof} degrees of freedom");
}

fn uniform_over(shapes: &[Vec<usize>]) -> BTreeMap<Vec<usize>, f64> {
    shapes.iter().map(|s| (s.clone(), 1.0 / shapes.len() as f64)).collect()
}

fn tally(mut draw: impl FnMut() -> RootedTree) -> BTreeMap<Vec<usize>, usize> {
    let mut counts = BTreeMap::new();
    for _ in 0..DRAWS {
        *counts.entry(draw().preorder_degrees()).or_insert(0) += 1;
    }
    counts
}

#[test]
fn enumeration_counts() {
    assert_eq!(ordered_trees(5).len(), 14);
    assert_eq!(ordered_trees(6).len(), 42);
}

#[test]
fn critical_binary_gw_is_uniform_on_full_binary_trees() {
    let full: Vec<Vec<usize>> = ordered_trees(5).into_iter().filter(|s| s.iter().all(|&d| d == 0 || d == 2)).collect();
    assert_eq!(full.len(), 2);
    for method in [GwMethod::Rejection, GwMethod::Convolution] {
        let gw = ConditionedGw::new(&OffspringSpec::binary(), 5, method).unwrap();
        let mut rng = seeded(1);
        chi_square(&tally(|| gw.sample(&mut rng).unwrap()), &uniform_over(&full));
    }
    let sg = SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0, 0.0, 1.0] }, 5).unwrap();
    let mut rng = seeded(2);
    chi_square(&tally(|| sg.sample(&mut rng).unwrap()), &uniform_over(&full));
}

#[test]
fn geometric_gw_root_degree() {
    // geometric weights make every ordered tree on n vertices equally likely
    let shapes = ordered_trees(5);
    let mut expected = BTreeMap::new();
    for s in &shapes {
        *expected.entry(s[0]).or_insert(0.0) += 1.0 / shapes.len() as f64;
    }
    for method in [GwMethod::Rejection, GwMethod::Convolution] {
        let gw = ConditionedGw::new(&OffspringSpec::Geometric { p: 0.5 }, 5, method).unwrap();
        let mut rng = seeded(3);
        let mut observed = BTreeMap::new();
        for _ in 0..DRAWS {
            let t = gw.sample(&mut rng).unwrap();
            *observed.entry(t.outdegree(t.root())).or_insert(0) += 1;
        }
        chi_square(&observed, &expected);
    }
}

#[test]
fn unit_weights_are_uniform_on_ordered_trees() {
    let shapes = ordered_trees(6);
    let sg = SimplyGenerated::new(&WeightSpec::Explicit { w: vec![1.0; 6] }, 6).unwrap();
    let mut rng = seeded(4);
    chi_square(&tally(|| sg.sample(&mut rng).unwrap()), &uniform_over(&shapes));
    let gw = ConditionedGw::new(&OffspringSpec::Geometric { p: 0.5 }, 6, GwMethod::Auto).unwrap();
    let mut rng = seeded(5);
    chi_square(&tally(|| gw.sample(&mut rng).unwrap()), &uniform_over(&shapes));
}

#[test]
fn factorial_weights_condense_at_the_root() {
    let n = 200;
    let sg = SimplyGenerated::new(&WeightSpec::Factorial { alpha: 1.0 }, n).unwrap();
    let mut rng = seeded(6);
    let big = (0..200).filter(|_| sg.sample(&mut rng).unwrap().outdegree(0) >= n - 10).count();
    assert!(big as f64 / 200.0 >= 0.95, "{big}");
}
