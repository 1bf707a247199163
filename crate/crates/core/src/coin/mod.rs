//! Coin unitaries: the quantized kicked Harper map, Haar-random (CUE)
//! unitaries and file-loaded matrices, plus the classical Harper map.

mod classical;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{read_cmx, write_cmx, CMatrix, DftPlan, C64};
use crate::par::{self, Execution};

pub use classical::{
    classical_step, classical_step_inverse, lyapunov_estimate, phase_portrait, torus_coverage, HarperParams, Orbit,
    PhasePoint,
};

/// Unitarity tolerance applied to matrices coming from outside the library.
pub const LOAD_UNITARITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    Harper { g: f64, tau: f64 },
    Cue { seed: u64 },
    Custom { source: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Harper { g, tau } => write!(f, "harper(g={g}, tau={tau})"),
            Provenance::Cue { seed } => write!(f, "cue(seed={seed})"),
            Provenance::Custom { source } => write!(f, "custom({source})"),
        }
    }
}

/// An even-dimensional unitary coin together with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinUnitary {
    matrix: CMatrix,
    provenance: Provenance,
}

impl CoinUnitary {
    /// Wraps an externally built matrix, checking shape, parity and unitarity.
    pub fn custom(matrix: CMatrix, source: impl Into<String>) -> Result<Self> {
        validate_coin_matrix(&matrix)?;
        Ok(CoinUnitary { matrix, provenance: Provenance::Custom { source: source.into() } })
    }

    /// The two-dimensional Hadamard coin.
    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let matrix = CMatrix::new(2, 2, vec![h, h, h, -h]).expect("2x2");
        CoinUnitary { matrix, provenance: Provenance::Custom { source: "hadamard".into() } }
    }

    /// Coin dimension M.
    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Scaled Planck constant h = 1/M.
    pub fn planck(&self) -> f64 {
        1.0 / self.dim() as f64
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    #[inline]
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

fn validate_coin_matrix(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.rows().is_multiple_of(2) {
        return Err(Error::OddDimension(m.rows()));
    }
    let deviation = m.unitarity_error();
    if !(deviation <= LOAD_UNITARITY_TOLERANCE) {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(())
}

/// Quantized kicked Harper coin in the momentum basis,
/// `U_C = exp[-iτgM cos(2πq̂)] · exp[-iτM cos(2πp̂)]`.
///
/// The momentum factor is diagonal. The kick is diagonal in position and is
/// brought into the momentum basis by conjugation with the unitary DFT, using
/// `⟨m|q_j⟩ = exp(-2πi jm/M)/√M`.
pub fn build_harper(m: usize, params: HarperParams) -> Result<CoinUnitary> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    let mf = m as f64;
    let (g, tau) = (params.g(), params.tau());
    let kinetic: Vec<C64> =
        (0..m).map(|j| C64::from_polar(1.0, -tau * mf * (2.0 * PI * j as f64 / mf).cos())).collect();
    let kick: Vec<C64> =
        (0..m).map(|j| C64::from_polar(1.0, -tau * g * mf * (2.0 * PI * j as f64 / mf).cos())).collect();

    let plan = DftPlan::new(m);
    let mut matrix = CMatrix::zeros(m, m);
    let mut column = vec![C64::new(0.0, 0.0); m];
    for col in 0..m {
        column.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        column[col] = C64::new(1.0, 0.0);
        // momentum -> position amplitudes ⟨q_j|m'⟩, kick, back to momentum
        plan.apply(&mut column, 1);
        for (z, k) in column.iter_mut().zip(&kick) {
            *z *= k;
        }
        plan.apply(&mut column, -1);
        for (row, z) in column.iter().enumerate() {
            matrix[(row, col)] = z * kinetic[col];
        }
    }
    Ok(CoinUnitary { matrix, provenance: Provenance::Harper { g, tau } })
}

/// Haar-random unitary of any dimension: QR of a complex Ginibre matrix with
/// the phases of `diag(R)` folded back into `Q`.
pub fn cue_matrix(m: usize, seed: u64) -> CMatrix {
    assert!(m >= 1, "CUE dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(m * m);
    for _ in 0..m * m {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        entries.push(C64::new(re * scale, im * scale));
    }
    let ginibre = DMatrix::from_row_slice(m, m, &entries);
    let qr = ginibre.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<C64> = (0..m)
        .map(|j| {
            let d = r[(j, j)];
            if d.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    CMatrix::from_fn(m, m, |i, j| q[(i, j)] * phases[j])
}

/// CUE coin; deterministic for a fixed seed.
pub fn sample_cue(m: usize, seed: u64) -> Result<CoinUnitary> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    Ok(CoinUnitary { matrix: cue_matrix(m, seed), provenance: Provenance::Cue { seed } })
}

/// `count` CUE coins with seeds split from `master` (see [`par::split_seed`]).
pub fn sample_cue_ensemble(m: usize, master: u64, count: usize, exec: Execution) -> Result<Vec<CoinUnitary>> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    Ok(par::map_range(exec, count, |i| {
        let seed = par::split_seed(master, i as u64);
        CoinUnitary { matrix: cue_matrix(m, seed), provenance: Provenance::Cue { seed } }
    }))
}

pub fn load_coin(path: impl AsRef<Path>) -> Result<CoinUnitary> {
    let path = path.as_ref();
    let matrix = read_cmx(path)?;
    CoinUnitary::custom(matrix, path.display().to_string())
}

pub fn save_coin(coin: &CoinUnitary, path: impl AsRef<Path>) -> Result<()> {
    write_cmx(path, coin.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{matmul, write_cmx};

    /// Direct O(M²)-per-entry evaluation of the momentum-basis matrix elements.
    fn harper_direct(m: usize, g: f64, tau: f64) -> CMatrix {
        let mf = m as f64;
        CMatrix::from_fn(m, m, |row, col| {
            let mut sum = C64::new(0.0, 0.0);
            for k in 0..m {
                let kick = -tau * g * mf * (2.0 * PI * k as f64 / mf).cos();
                let fourier = 2.0 * PI * k as f64 * (col as f64 - row as f64) / mf;
                sum += C64::from_polar(1.0, kick + fourier);
            }
            let kinetic = C64::from_polar(1.0, -tau * mf * (2.0 * PI * col as f64 / mf).cos());
            kinetic * sum / mf
        })
    }

    #[test]
    fn harper_without_kick_is_diagonal() {
        let coin = build_harper(4, HarperParams::new(0.0, 1.0).unwrap()).unwrap();
        let expected = [C64::from_polar(1.0, -4.0), C64::new(1.0, 0.0), C64::from_polar(1.0, 4.0), C64::new(1.0, 0.0)];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { C64::new(0.0, 0.0) };
                assert!((coin.matrix()[(i, j)] - want).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn harper_matches_direct_summation_grid() {
        for m in [2, 4, 6, 8, 16, 32, 64] {
            for g in [0.0, 0.01, 0.05, 0.4] {
                let coin = build_harper(m, HarperParams::new(g, 1.0).unwrap()).unwrap();
                let direct = harper_direct(m, g, 1.0);
                let err = coin.matrix().sub(&direct).unwrap().max_abs();
                assert!(err < 1e-10, "m={m} g={g} err={err}");
                assert!(coin.matrix().unitarity_error() < 1e-12);
            }
        }
    }

    #[test]
    fn harper_unitary_for_odd_tau() {
        let coin = build_harper(50, HarperParams::new(0.73, 0.37).unwrap()).unwrap();
        assert!(coin.matrix().unitarity_error() < 1e-12);
        let uu = matmul(coin.matrix(), &coin.matrix().adjoint()).unwrap();
        assert!(uu.sub(&CMatrix::identity(50)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn odd_dimensions_rejected() {
        let p = HarperParams::default();
        assert!(matches!(build_harper(5, p), Err(Error::OddDimension(5))));
        assert!(matches!(sample_cue(3, 1), Err(Error::OddDimension(3))));
    }

    #[test]
    fn cue_is_unitary_and_deterministic() {
        for seed in [0, 1, 7, u64::MAX] {
            let a = sample_cue(64, seed).unwrap();
            assert!(a.matrix().unitarity_error() < 1e-12);
            assert_eq!(a, sample_cue(64, seed).unwrap());
        }
        assert!(cue_matrix(256, 3).unitarity_error() < 1e-12);
        assert!(cue_matrix(5, 3).unitarity_error() < 1e-12);
        assert_ne!(sample_cue(8, 1).unwrap(), sample_cue(8, 2).unwrap());
    }

    #[test]
    fn save_load_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("coin.cmx");
        let coin = build_harper(16, HarperParams::new(0.4, 1.0).unwrap()).unwrap();
        save_coin(&coin, &path).unwrap();
        let back = load_coin(&path).unwrap();
        assert_eq!(back.matrix(), coin.matrix());
        assert!(matches!(back.provenance(), Provenance::Custom { .. }));
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let rect = dir.path().join("rect.cmx");
        write_cmx(&rect, &CMatrix::zeros(3, 4)).unwrap();
        assert!(matches!(load_coin(&rect), Err(Error::NonSquare { rows: 3, cols: 4 })));

        let scaled = dir.path().join("scaled.cmx");
        write_cmx(&scaled, &CMatrix::identity(2).scale(C64::new(2.0, 0.0))).unwrap();
        assert!(matches!(load_coin(&scaled), Err(Error::NonUnitary { .. })));

        let odd = dir.path().join("odd.cmx");
        write_cmx(&odd, &CMatrix::identity(3)).unwrap();
        assert!(matches!(load_coin(&odd), Err(Error::OddDimension(3))));

        let junk = dir.path().join("junk.cmx");
        std::fs::write(&junk, b"hello world\n").unwrap();
        assert!(matches!(load_coin(&junk), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn ensemble_uses_split_seeds() {
        let coins = sample_cue_ensemble(4, 10, 3, Execution::default()).unwrap();
        for (i, c) in coins.iter().enumerate() {
            assert_eq!(c.provenance(), &Provenance::Cue { seed: par::split_seed(10, i as u64) });
        }
        let seq = sample_cue_ensemble(4, 10, 3, Execution::Sequential).unwrap();
        assert_eq!(coins, seq);
    }
}
