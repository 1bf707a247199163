//! Independent reference implementations used for cross-validation:
//! brute-force evolution in the full `M·N` space and the sum over classical
//! paths.

use crate::coin::CoinUnitary;
use crate::error::{Error, Result};
use crate::matkernel::{matmul, matvec, CMatrix, CVector, C64, ONE, ZERO};

use super::{PositionDistribution, WalkConfig};

/// Largest `M·N` accepted by [`full_space_evolve`].
pub const FULL_SPACE_LIMIT: usize = 4096;
/// Largest `t` accepted by [`path_sum_distribution`].
pub const PATH_SUM_MAX_T: usize = 20;

/// Global state index of coin state `a` at site `n`.
#[inline]
pub fn full_index(a: usize, n: usize, n_sites: usize) -> usize {
    a * n_sites + n
}

/// The walk unitary `(P_R ⊗ T + P_L ⊗ T†)(U_C ⊗ 1_N)` with `T|n⟩ = |n+1⟩`.
pub fn full_space_unitary(coin: &CoinUnitary, n_sites: usize) -> Result<CMatrix> {
    let m = coin.dim();
    if m * n_sites > FULL_SPACE_LIMIT {
        return Err(Error::SizeGuard(format!(
            "full-space oracle limited to M*N <= {FULL_SPACE_LIMIT}, got {}",
            m * n_sites
        )));
    }
    let p_left = CMatrix::from_fn(m, m, |a, b| if a == b && a < m / 2 { ONE } else { ZERO });
    let p_right = CMatrix::from_fn(m, m, |a, b| if a == b && a >= m / 2 { ONE } else { ZERO });
    let shift = CMatrix::from_fn(n_sites, n_sites, |i, j| if i == (j + 1) % n_sites { ONE } else { ZERO });
    let conditional = p_right.kron(&shift).add(&p_left.kron(&shift.adjoint()))?;
    matmul(&conditional, &coin.matrix().kron(&CMatrix::identity(n_sites)))
}

/// The global state after `steps` applications of the assembled walk unitary.
pub fn full_space_evolve(config: &WalkConfig, steps: usize) -> Result<CVector> {
    let n = config.n_sites();
    let u = full_space_unitary(config.coin(), n)?;
    let mut psi = CVector::basis(config.coin_dim() * n, full_index(config.initial_coin(), config.initial_site(), n));
    for _ in 0..steps {
        psi = matvec(&u, &psi)?;
    }
    Ok(psi)
}

/// `Tr_W |ψ⟩⟨ψ|`.
pub fn full_space_coin_density(psi: &CVector, m: usize, n_sites: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |a, b| {
        (0..n_sites).map(|n| psi[full_index(a, n, n_sites)] * psi[full_index(b, n, n_sites)].conj()).sum()
    })
}

/// `Tr_C |ψ⟩⟨ψ|` in the position basis.
pub fn full_space_walker_density(psi: &CVector, m: usize, n_sites: usize) -> CMatrix {
    CMatrix::from_fn(n_sites, n_sites, |x, y| {
        (0..m).map(|a| psi[full_index(a, x, n_sites)] * psi[full_index(a, y, n_sites)].conj()).sum()
    })
}

pub fn full_space_position_distribution(psi: &CVector, m: usize, n_sites: usize) -> Vec<f64> {
    (0..n_sites).map(|x| (0..m).map(|a| psi[full_index(a, x, n_sites)].norm_sqr()).sum()).collect()
}

/// `p(n, t) = ⟨0(n,t)|0(n,t)⟩` where `|0(n,t)⟩` sums `u_{σ_t} ⋯ u_{σ_1}|0⟩`
/// over all step strings with net displacement `n (mod N)`, using
/// `u_{+1} = P_R U_C` and `u_{-1} = P_L U_C`. The walk starts at site 0 in
/// coin state `|0⟩`. Enumerates all `2^t` strings.
pub fn path_sum_distribution(coin: &CoinUnitary, n_sites: usize, t: usize) -> Result<PositionDistribution> {
    if t > PATH_SUM_MAX_T {
        return Err(Error::SizeGuard(format!("path enumeration limited to t <= {PATH_SUM_MAX_T}, got {t}")));
    }
    if n_sites == 0 {
        return Err(Error::InvalidArgument("lattice needs at least one site".into()));
    }
    let m = coin.dim();
    let u = coin.matrix();
    let mut amplitudes = vec![CVector::zeros(m); n_sites];
    let start = CVector::basis(m, 0);
    enumerate_paths(u, &start, 0, t, n_sites, &mut amplitudes);
    let probs = amplitudes.iter().map(CVector::norm_sqr).collect();
    PositionDistribution::from_raw(t, 0, probs)
}

fn enumerate_paths(u: &CMatrix, v: &CVector, displacement: i64, remaining: usize, n_sites: usize, acc: &mut [CVector]) {
    if remaining == 0 {
        let site = displacement.rem_euclid(n_sites as i64) as usize;
        for (a, z) in acc[site].as_mut_slice().iter_mut().zip(v.as_slice()) {
            *a += z;
        }
        return;
    }
    let m = u.rows();
    let full = matvec(u, v).expect("coin dimension");
    for sigma in [1i64, -1] {
        let projected: Vec<C64> = full
            .as_slice()
            .iter()
            .enumerate()
            .map(|(a, &z)| if (a >= m / 2) == (sigma == 1) { z } else { ZERO })
            .collect();
        enumerate_paths(u, &CVector(projected), displacement + sigma, remaining - 1, n_sites, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::sample_cue;

    #[test]
    fn zero_steps_is_product_state() {
        let cfg = WalkConfig::with_initial(sample_cue(4, 1).unwrap(), 5, 1, 3).unwrap();
        let psi = full_space_evolve(&cfg, 0).unwrap();
        assert_eq!(psi, CVector::basis(20, full_index(1, 3, 5)));
    }

    #[test]
    fn assembled_unitary_is_unitary() {
        let u = full_space_unitary(&sample_cue(4, 2).unwrap(), 6).unwrap();
        assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn size_guard() {
        let cfg = WalkConfig::new(sample_cue(64, 1).unwrap(), 65).unwrap();
        assert!(matches!(full_space_evolve(&cfg, 1), Err(Error::SizeGuard(_))));
        assert!(matches!(path_sum_distribution(cfg.coin(), 5, 21), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn one_step_two_paths() {
        let coin = sample_cue(4, 6).unwrap();
        let p = path_sum_distribution(&coin, 7, 1).unwrap();
        let u = coin.matrix();
        let right: f64 = (2..4).map(|a| u[(a, 0)].norm_sqr()).sum();
        let left: f64 = (0..2).map(|a| u[(a, 0)].norm_sqr()).sum();
        assert!((p.probs[1] - right).abs() < 1e-15);
        assert!((p.probs[6] - left).abs() < 1e-15);
        assert!(p.probs[0] == 0.0 && p.probs[2..6].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn even_ring_wrong_parity_is_exactly_zero() {
        let coin = sample_cue(4, 9).unwrap();
        for t in 1..=8 {
            let p = path_sum_distribution(&coin, 6, t).unwrap();
            for (n, &pn) in p.probs.iter().enumerate() {
                if (n + t) % 2 == 1 {
                    assert_eq!(pn, 0.0, "t={t} n={n}");
                }
            }
        }
    }
}
