//! Haar statistics of sampled CUE coins.

use chaoswalk::coin::cue_matrix;
use chaoswalk::matkernel::{matmul, C64};
use chaoswalk::observables::ks_against_cdf;

const M: usize = 32;
const SAMPLES: u64 = 2000;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn matrix_element_and_trace_moments() {
    let mut u00 = Vec::new();
    let mut trace = Vec::new();
    for seed in 0..SAMPLES {
        let u = cue_matrix(M, seed);
        u00.push(u[(0, 0)].norm_sqr());
        trace.push(u.trace().norm_sqr());
    }
    let (mean, se) = mean_and_se(&u00);
    assert!((mean - 1.0 / M as f64).abs() < 3.0 * se, "E|u00|^2 = {mean} ± {se}");
    let (mean, se) = mean_and_se(&trace);
    assert!((mean - 1.0).abs() < 3.0 * se, "E|Tr U|^2 = {mean} ± {se}");
}

/// `|u_00|²` of a Haar unitary follows Beta(1, M−1): `P(x ≤ s) = 1 − (1−s)^{M−1}`.
#[test]
fn element_modulus_distribution() {
    let xs: Vec<f64> = (0..SAMPLES).map(|s| cue_matrix(M, s)[(0, 0)].norm_sqr()).collect();
    let d = ks_against_cdf(&xs, |s| 1.0 - (1.0 - s.clamp(0.0, 1.0)).powi(M as i32 - 1));
    // 1% critical value for n = 2000
    assert!(d < 1.63 / (SAMPLES as f64).sqrt(), "KS = {d}");
}

/// Left multiplication by a fixed unitary leaves the ensemble unchanged.
#[test]
fn left_invariance() {
    let w = cue_matrix(M, 999_999);
    let stat = |u: &chaoswalk::matkernel::CMatrix| (u[(0, 0)] + u[(1, 1)] * C64::new(0.0, 1.0)).norm_sqr();
    let plain: Vec<f64> = (0..SAMPLES).map(|s| stat(&cue_matrix(M, s))).collect();
    let rotated: Vec<f64> = (SAMPLES..2 * SAMPLES).map(|s| stat(&matmul(&w, &cue_matrix(M, s)).unwrap())).collect();
    let mut sorted = plain.clone();
    sorted.sort_by(f64::total_cmp);
    let empirical = |x: f64| sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64;
    let d = ks_against_cdf(&rotated, empirical);
    // two-sample 1% critical value for equal sizes n: 1.63·sqrt(2/n)
    assert!(d < 1.63 * (2.0 / SAMPLES as f64).sqrt(), "two-sample KS = {d}");
}
