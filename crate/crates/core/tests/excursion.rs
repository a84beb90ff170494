use std::f64::consts::PI;

use treelimit::dendrons::{sample_brownian_excursion, sample_coupled_excursions};
use treelimit::rng::replica_rng;

#[test]
fn mean_height_of_excursion() {
    let (m, reps) = (1 << 16, 10_000);
    let total: f64 = (0..reps).map(|i| sample_brownian_excursion(m, &mut replica_rng(11, i)).unwrap().max()).sum();
    let mean = total / reps as f64;
    let target = (PI / 2.0).sqrt();
    assert!((mean / target - 1.0).abs() < 0.01, "E[max] ≈ {mean}, expected {target}");
}

#[test]
fn coupled_grids_share_their_shape() {
    // the coarse excursion is the fine one seen at every other step, up to
    // the rotation offset
    let (fine, coarse) = sample_coupled_excursions(1 << 12, &mut replica_rng(12, 0)).unwrap();
    assert_eq!(fine.m(), 2 * coarse.m());
    assert!((fine.max() - coarse.max()).abs() < 0.1);
}
