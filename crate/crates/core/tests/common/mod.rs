#![allow(dead_code)]

use sylvlike::{Complex64, Matrix};

pub fn rel(got: &Matrix, want: &Matrix) -> f64 {
    (got - want).norm_fro() / want.norm_fro().max(f64::MIN_POSITIVE)
}

pub fn chordal(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

/// Worst chordal distance of a greedy one-to-one matching; infinite when the
/// lengths differ.
pub fn match_multisets(got: &[Complex64], want: &[Complex64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; got.len()];
    let mut worst: f64 = 0.0;
    for &w in want {
        let (i, d) = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &g)| (i, chordal(g, w)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        used[i] = true;
        worst = worst.max(d);
    }
    worst
}

/// Fixed-seed configuration so failures reproduce across runs.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Default::default()
    }
}
