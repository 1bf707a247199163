//! Exact evolution of the coined walk on an `N`-site ring in the
//! momentum-sector decomposition.
//!
//! Conventions used throughout:
//! - coin indices `0..M/2` span `P_L`, `M/2..M` span `P_R`;
//! - the walker shift is `T|n⟩ = |n+1⟩`, applied to the `P_R` half;
//! - momentum states satisfy `⟨n|k̃⟩ = exp(+2πi kn/N)/√N`, so
//!   `T|k̃⟩ = exp(-2πi k/N)|k̃⟩` and sector `k` evolves with
//!   `U_k = diag(e^{+2πik/N} on P_L, e^{-2πik/N} on P_R) · U_C`.
//!
//! With these choices a `P_R` component moves the walker to `n + 1`.

mod checkpoint;
pub mod oracle;

use std::f64::consts::PI;

use log::warn;

use crate::coin::CoinUnitary;
use crate::error::{Error, Result};
use crate::matkernel::{CMatrix, CVector, DftPlan, C64, ZERO};
use crate::par::{self, Execution};

pub use oracle::{full_space_evolve, path_sum_distribution, FULL_SPACE_LIMIT, PATH_SUM_MAX_T};

/// Sign of the exponent in the momentum -> position transform.
pub const MOMENTUM_TO_POSITION_SIGN: i32 = 1;

/// Probabilities below zero but above this are clamped to zero.
const NEGATIVE_CLAMP: f64 = -1e-12;
/// Probabilities below this are a hard failure.
const NEGATIVE_FAIL: f64 = -1e-9;

#[derive(Clone, Debug)]
pub struct WalkConfig {
    coin: CoinUnitary,
    n_sites: usize,
    initial_coin: usize,
    initial_site: usize,
}

impl WalkConfig {
    /// Walk starting from coin state `|0⟩` at site 0.
    pub fn new(coin: CoinUnitary, n_sites: usize) -> Result<Self> {
        Self::with_initial(coin, n_sites, 0, 0)
    }

    pub fn with_initial(coin: CoinUnitary, n_sites: usize, initial_coin: usize, initial_site: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one site".into()));
        }
        if initial_coin >= coin.dim() {
            return Err(Error::InvalidArgument(format!(
                "initial coin index {initial_coin} out of range for M = {}",
                coin.dim()
            )));
        }
        if initial_site >= n_sites {
            return Err(Error::InvalidArgument(format!("initial site {initial_site} out of range for N = {n_sites}")));
        }
        Ok(WalkConfig { coin, n_sites, initial_coin, initial_site })
    }

    #[inline]
    pub fn coin(&self) -> &CoinUnitary {
        &self.coin
    }

    #[inline]
    pub fn coin_dim(&self) -> usize {
        self.coin.dim()
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn initial_coin(&self) -> usize {
        self.initial_coin
    }

    #[inline]
    pub fn initial_site(&self) -> usize {
        self.initial_site
    }
}

/// Phase `exp(2πi k/N)` with `k` reduced mod N.
fn unit_phase(k: i64, n: usize) -> C64 {
    let k = k.rem_euclid(n as i64);
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    if 2 * k == n as i64 {
        return C64::new(-1.0, 0.0);
    }
    C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// The sector unitaries `U_k = D_k · U_C`, kept in factored form.
#[derive(Clone, Debug)]
pub struct SectorBlocks {
    coin: CMatrix,
    n_sites: usize,
}

impl SectorBlocks {
    pub fn new(config: &WalkConfig) -> Self {
        SectorBlocks { coin: config.coin.matrix().clone(), n_sites: config.n_sites }
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn coin_dim(&self) -> usize {
        self.coin.rows()
    }

    /// `(phase on P_L, phase on P_R)` for sector `k`.
    #[inline]
    pub fn phases(&self, k: usize) -> (C64, C64) {
        (unit_phase(k as i64, self.n_sites), unit_phase(-(k as i64), self.n_sites))
    }

    pub fn matrix(&self, k: usize) -> CMatrix {
        let m = self.coin_dim();
        let (left, right) = self.phases(k);
        CMatrix::from_fn(m, m, |a, b| if a < m / 2 { left } else { right } * self.coin[(a, b)])
    }

    pub fn to_matrices(&self) -> Vec<CMatrix> {
        (0..self.n_sites).map(|k| self.matrix(k)).collect()
    }
}

/// All `N` sector blocks `U_k` as explicit matrices.
pub fn sector_blocks(config: &WalkConfig) -> Vec<CMatrix> {
    SectorBlocks::new(config).to_matrices()
}

/// `chi[k] = U_k^t |initial_coin⟩` for every momentum sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    t: usize,
    initial_site: usize,
    chi: Vec<CVector>,
}

impl SectorState {
    pub fn initial(config: &WalkConfig) -> Self {
        let chi = vec![CVector::basis(config.coin_dim(), config.initial_coin); config.n_sites];
        SectorState { t: 0, initial_site: config.initial_site, chi }
    }

    pub(crate) fn from_parts(t: usize, initial_site: usize, chi: Vec<CVector>) -> Self {
        SectorState { t, initial_site, chi }
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.chi.len()
    }

    #[inline]
    pub fn coin_dim(&self) -> usize {
        self.chi[0].dim()
    }

    #[inline]
    pub fn initial_site(&self) -> usize {
        self.initial_site
    }

    #[inline]
    pub fn chi(&self) -> &[CVector] {
        &self.chi
    }

    /// Largest `|‖chi[k]‖ − 1|` over sectors.
    pub fn max_norm_deviation(&self) -> f64 {
        self.chi.iter().map(|c| (c.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Advances every sector by `steps` applications of its block.
    pub fn advance(&mut self, blocks: &SectorBlocks, steps: usize, exec: Execution) {
        assert_eq!(blocks.n_sites(), self.n_sites());
        assert_eq!(blocks.coin_dim(), self.coin_dim());
        if steps == 0 {
            return;
        }
        let m = self.coin_dim();
        let half = m / 2;
        par::for_each_mut(exec, &mut self.chi, |k, chi| {
            let (left, right) = blocks.phases(k);
            let mut x = std::mem::take(&mut chi.0);
            let mut y = vec![ZERO; m];
            for _ in 0..steps {
                blocks.coin.matvec_into(&x, &mut y);
                for z in &mut y[..half] {
                    *z *= left;
                }
                for z in &mut y[half..] {
                    *z *= right;
                }
                std::mem::swap(&mut x, &mut y);
            }
            chi.0 = x;
        });
        self.t += steps;
    }
}

/// Returns the state after `steps` further applications of each `U_k`.
pub fn evolve(state: &SectorState, blocks: &SectorBlocks, steps: usize) -> SectorState {
    let mut next = state.clone();
    next.advance(blocks, steps, Execution::default());
    next
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Coin,
    WalkerMomentum,
    WalkerPosition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkerBasis {
    Momentum,
    Position,
}

/// Reduced density matrix of one subsystem.
#[derive(Clone, Debug)]
pub struct ReducedDensity {
    pub subsystem: Subsystem,
    pub matrix: CMatrix,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let raw = crate::matkernel::eigh(&self.matrix)?.values;
        let min = raw.first().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let clamp = raw.iter().map(|&v| if v < 0.0 { -v } else { (v - 1.0).max(0.0) }).fold(0.0, f64::max);
        if clamp > 1e-9 {
            warn!("clamped density-matrix eigenvalue by {clamp:.3e}");
        }
        Ok(raw.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }
}

/// `ρ_C = (1/N) Σ_k |chi_k⟩⟨chi_k|`.
pub fn coin_density(state: &SectorState) -> ReducedDensity {
    coin_density_with(state, Execution::default())
}

pub fn coin_density_with(state: &SectorState, exec: Execution) -> ReducedDensity {
    let m = state.coin_dim();
    let inv_n = 1.0 / state.n_sites() as f64;
    let rows = par::map_range(exec, m, |a| {
        let mut row = vec![ZERO; m];
        for chi in &state.chi {
            let ca = chi[a];
            for (r, cb) in row.iter_mut().zip(chi.as_slice()) {
                *r += ca * cb.conj();
            }
        }
        row.iter_mut().for_each(|z| *z *= inv_n);
        row
    });
    let matrix = CMatrix::new(m, m, rows.concat()).expect("square");
    ReducedDensity { subsystem: Subsystem::Coin, matrix }
}

/// Gram matrix `G[k][l] = ⟨chi_l|chi_k⟩` (the echo amplitudes), Hermitian.
pub(crate) fn sector_gram(state: &SectorState, exec: Execution) -> CMatrix {
    let n = state.n_sites();
    let upper = par::map_range(exec, n, |k| (k..n).map(|l| state.chi[l].inner(&state.chi[k])).collect::<Vec<_>>());
    let mut g = CMatrix::zeros(n, n);
    for (k, row) in upper.into_iter().enumerate() {
        for (offset, z) in row.into_iter().enumerate() {
            let l = k + offset;
            g[(k, l)] = z;
            g[(l, k)] = z.conj();
        }
    }
    g
}

/// Walker reduced density matrix in the momentum or position basis.
pub fn walker_density(state: &SectorState, basis: WalkerBasis) -> ReducedDensity {
    walker_density_with(state, basis, Execution::default())
}

pub fn walker_density_with(state: &SectorState, basis: WalkerBasis, exec: Execution) -> ReducedDensity {
    let n = state.n_sites();
    let inv_n = C64::new(1.0 / n as f64, 0.0);
    let gram = sector_gram(state, exec).scale(inv_n);
    match basis {
        WalkerBasis::Momentum => {
            let s = state.initial_site as i64;
            let matrix = if s == 0 {
                gram
            } else {
                // the walker starts at |s⟩ = Σ_k exp(-2πi ks/N)/√N |k̃⟩
                CMatrix::from_fn(n, n, |k, l| gram[(k, l)] * unit_phase(-(k as i64 - l as i64) * s, n))
            };
            ReducedDensity { subsystem: Subsystem::WalkerMomentum, matrix }
        }
        WalkerBasis::Position => {
            let origin = momentum_to_position(&gram);
            let s = state.initial_site;
            let matrix = CMatrix::from_fn(n, n, |a, b| origin[((a + n - s) % n, (b + n - s) % n)]);
            ReducedDensity { subsystem: Subsystem::WalkerPosition, matrix }
        }
    }
}

/// `F ρ F†` with `F_{nk} = exp(+2πi kn/N)/√N`.
fn momentum_to_position(rho: &CMatrix) -> CMatrix {
    let n = rho.rows();
    let plan = DftPlan::new(n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|l| rho.column(l).0).collect();
    for c in &mut cols {
        plan.apply(c, MOMENTUM_TO_POSITION_SIGN);
    }
    let mut out = CMatrix::zeros(n, n);
    let mut row = vec![ZERO; n];
    for a in 0..n {
        for (l, z) in row.iter_mut().enumerate() {
            *z = cols[l][a];
        }
        plan.apply(&mut row, -MOMENTUM_TO_POSITION_SIGN);
        for (b, z) in row.iter().enumerate() {
            out[(a, b)] = *z;
        }
    }
    out
}

/// Walker site probabilities at time `t`, indexed by absolute site.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    pub t: usize,
    /// Site the walk started from; centered labels are relative to it.
    pub origin: usize,
    pub probs: Vec<f64>,
}

impl PositionDistribution {
    /// Validates raw probabilities: values in `[-1e-12, 0)` are clamped to
    /// zero, anything below `-1e-9` is an error.
    pub fn from_raw(t: usize, origin: usize, mut probs: Vec<f64>) -> Result<Self> {
        for (site, p) in probs.iter_mut().enumerate() {
            if *p < 0.0 {
                if *p < NEGATIVE_FAIL {
                    return Err(Error::NegativeProbability { site, value: *p });
                }
                if *p < NEGATIVE_CLAMP {
                    warn!("clamping probability {p:.3e} at site {site}");
                }
                *p = 0.0;
            }
        }
        Ok(PositionDistribution { t, origin, probs })
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.probs.len()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Site label relative to the origin, in `[-⌊N/2⌋, ⌈N/2⌉)`.
    pub fn centered_label(&self, site: usize) -> i64 {
        centered_label(site, self.origin, self.n_sites())
    }

    /// Absolute site for a centered label.
    pub fn site_of(&self, label: i64) -> usize {
        let n = self.n_sites() as i64;
        (self.origin as i64 + label).rem_euclid(n) as usize
    }

    /// `(label, p)` pairs sorted by label.
    pub fn centered(&self) -> Vec<(i64, f64)> {
        let mut out: Vec<(i64, f64)> =
            self.probs.iter().enumerate().map(|(s, &p)| (self.centered_label(s), p)).collect();
        out.sort_by_key(|&(label, _)| label);
        out
    }
}

pub(crate) fn centered_label(site: usize, origin: usize, n: usize) -> i64 {
    let n_i = n as i64;
    let d = (site as i64 - origin as i64).rem_euclid(n_i);
    if d >= n_i - n_i / 2 {
        d - n_i
    } else {
        d
    }
}

/// `p(n, t)`: the diagonal of the position-basis walker density, computed
/// from the coin-resolved position amplitudes.
pub fn position_distribution(state: &SectorState) -> Result<PositionDistribution> {
    position_distribution_with(state, &DftPlan::new(state.n_sites()))
}

/// As [`position_distribution`] with a reusable DFT plan of length `N`.
pub fn position_distribution_with(state: &SectorState, plan: &DftPlan) -> Result<PositionDistribution> {
    let n = state.n_sites();
    let m = state.coin_dim();
    assert_eq!(plan.dim(), n);
    let inv_n = 1.0 / n as f64;
    let mut origin_frame = vec![0.0; n];
    let mut buf = vec![ZERO; n];
    for a in 0..m {
        for (z, chi) in buf.iter_mut().zip(&state.chi) {
            *z = chi[a];
        }
        plan.apply(&mut buf, MOMENTUM_TO_POSITION_SIGN);
        for (p, z) in origin_frame.iter_mut().zip(&buf) {
            *p += z.norm_sqr() * inv_n;
        }
    }
    let s = state.initial_site;
    let mut probs = vec![0.0; n];
    for (site, p) in origin_frame.into_iter().enumerate() {
        probs[(site + s) % n] = p;
    }
    PositionDistribution::from_raw(state.t, s, probs)
}
