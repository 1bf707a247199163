use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{CVector, C64};

/// Precomputed unitary DFT of a fixed length, in both directions.
///
/// `apply(x, sign)` computes `y_n = (1/√dim) Σ_k x_k exp(sign · 2πi kn/dim)`.
#[derive(Clone)]
pub struct DftPlan {
    dim: usize,
    scale: f64,
    // exp(-2πi kn/dim): sign = -1
    negative: Arc<dyn Fft<f64>>,
    // exp(+2πi kn/dim): sign = +1
    positive: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DftPlan").field("dim", &self.dim).finish()
    }
}

impl DftPlan {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "DFT length must be positive");
        let mut planner = FftPlanner::new();
        DftPlan {
            dim,
            scale: 1.0 / (dim as f64).sqrt(),
            negative: planner.plan_fft_forward(dim),
            positive: planner.plan_fft_inverse(dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// In-place transform of a buffer of length `dim`.
    pub fn apply(&self, buf: &mut [C64], sign: i32) {
        assert_eq!(buf.len(), self.dim);
        if sign >= 0 {
            self.positive.process(buf);
        } else {
            self.negative.process(buf);
        }
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
    }
}

pub fn dft_in_place(buf: &mut [C64], sign: i32) {
    DftPlan::new(buf.len()).apply(buf, sign);
}

pub fn dft(x: &CVector, sign: i32) -> CVector {
    let mut out = x.clone();
    dft_in_place(out.as_mut_slice(), sign);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::ONE;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn direct_sum(x: &[C64], sign: i32) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|out| {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &xk) in x.iter().enumerate() {
                    let angle = sign as f64 * 2.0 * PI * (k * out) as f64 / n as f64;
                    acc += xk * C64::from_polar(1.0, angle);
                }
                acc / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn delta_maps_to_flat_vector() {
        for sign in [-1, 1] {
            let y = dft(&CVector::basis(4, 0), sign);
            for z in y.as_slice() {
                assert!((z - C64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn flat_vector_inverts_to_delta() {
        let flat = CVector(vec![C64::new(0.5, 0.0); 4]);
        let y = dft(&flat, -1);
        assert!(y.max_abs_diff(&CVector::basis(4, 0)) < 1e-15);
    }

    #[test]
    fn matches_direct_summation() {
        let x: Vec<C64> = (0..8).map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos() - 0.2)).collect();
        for sign in [-1, 1] {
            let fast = dft(&CVector(x.clone()), sign);
            let slow = direct_sum(&x, sign);
            for (a, b) in fast.as_slice().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_point_is_identity() {
        assert_eq!(dft(&CVector(vec![ONE]), 1), CVector(vec![ONE]));
    }

    proptest! {
        #[test]
        fn roundtrip_and_norm(parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40)) {
            let x = CVector(parts.iter().map(|&(re, im)| C64::new(re, im)).collect());
            let y = dft(&x, 1);
            prop_assert!((y.norm() - x.norm()).abs() < 1e-12);
            let back = dft(&y, -1);
            prop_assert!(back.max_abs_diff(&x) < 1e-12);
        }
    }
}
