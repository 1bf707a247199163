//! Derived quantities of a walk and the analytic reference curves they are
//! compared against.

use std::f64::consts::PI;

use log::warn;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::classical::dyadic_to_f64;
use crate::error::{Error, Result};
use crate::matkernel::CMatrix;
use crate::par::{self, Execution};
use crate::walk::{sector_gram, PositionDistribution, ReducedDensity, SectorState};

/// `Σ p n² − (Σ p n)²` over site labels centered on the origin.
pub fn variance(dist: &PositionDistribution) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (site, &p) in dist.probs.iter().enumerate() {
        let n = dist.centered_label(site) as f64;
        m1 += p * n;
        m2 += p * n * n;
    }
    m2 - m1 * m1
}

/// Echo amplitudes `f[l][k] = ⟨0|U_l^{-t} U_k^t|0⟩` between momentum sectors.
#[derive(Clone, Debug)]
pub struct FidelityMatrix {
    pub t: usize,
    /// Entry `(l, k)` holds `f[l][k]`.
    pub f: CMatrix,
}

impl FidelityMatrix {
    pub fn n_sites(&self) -> usize {
        self.f.rows()
    }

    /// `f[l][l + delta]`, indices mod N.
    pub fn echo(&self, l: usize, delta: i64) -> num_complex::Complex64 {
        let n = self.n_sites() as i64;
        self.f[(l, (l as i64 + delta).rem_euclid(n) as usize)]
    }

    /// `(1/N) Σ_l f[l][l + delta]`: the echo for sector offset `delta`,
    /// averaged over the N equivalent starting sectors.
    pub fn sector_average(&self, delta: i64) -> num_complex::Complex64 {
        let n = self.n_sites();
        (0..n).map(|l| self.echo(l, delta)).sum::<num_complex::Complex64>() / n as f64
    }
}

pub fn fidelity_matrix(state: &SectorState) -> FidelityMatrix {
    // gram[(k, l)] = ⟨chi_l|chi_k⟩ = f[l][k]
    let gram = sector_gram(state, Execution::default());
    let n = gram.rows();
    FidelityMatrix { t: state.t(), f: CMatrix::from_fn(n, n, |l, k| gram[(k, l)]) }
}

/// `(cos^t(2πΔ/N), exp(-2π²Δ²t/N²))`.
pub fn fgr_fidelity(delta: i64, n_sites: usize, t: usize) -> (f64, f64) {
    let n = n_sites as f64;
    let d = delta as f64;
    let cosine = (2.0 * PI * d / n).cos().powi(t as i32);
    let exponential = (-2.0 * PI * PI * d * d * t as f64 / (n * n)).exp();
    (cosine, exponential)
}

/// Integer weights `Σ_r C(t,r) [2r − t − n ≡ 0 mod N]` over `2^t`.
pub fn binomial_numerators(n_sites: usize, t: usize) -> Vec<BigUint> {
    let ring = n_sites as i64;
    let mut out = vec![BigUint::zero(); n_sites];
    let mut coefficient = BigUint::from(1u32);
    for r in 0..=t {
        let site = (2 * r as i64 - t as i64).rem_euclid(ring) as usize;
        out[site] += &coefficient;
        coefficient = coefficient * (t - r) / (r + 1);
    }
    out
}

/// Wrapped binomial law of the classical walker on the ring, started at site 0.
pub fn binomial_prediction(n_sites: usize, t: usize) -> PositionDistribution {
    let probs = binomial_numerators(n_sites, t).iter().map(|x| dyadic_to_f64(x, t)).collect();
    PositionDistribution { t, origin: 0, probs }
}

/// Gaussian limit `½[1 + (−1)^{n+t}] √(2/πt) exp(−n²/2t)`, wrapped on the
/// ring by summing images and renormalized.
pub fn normal_prediction(n_sites: usize, t: usize) -> Result<PositionDistribution> {
    if t == 0 {
        return Err(Error::InvalidArgument("normal prediction needs t >= 1".into()));
    }
    let tf = t as f64;
    let ring = n_sites as i64;
    let images = ((12.0 * tf.sqrt()) / n_sites as f64).ceil() as i64 + 1;
    let amplitude = (2.0 / (PI * tf)).sqrt();
    let mut probs = vec![0.0; n_sites];
    for (site, p) in probs.iter_mut().enumerate() {
        let label = crate::walk::centered_label(site, 0, n_sites);
        for j in -images..=images {
            let m = label + j * ring;
            if (m + t as i64).rem_euclid(2) == 0 {
                *p += amplitude * (-(m * m) as f64 / (2.0 * tf)).exp();
            }
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(PositionDistribution { t, origin: 0, probs })
}

/// `−Σ λ ln λ` over the (clamped) eigenvalues, in nats.
pub fn von_neumann_entropy(rho: &ReducedDensity) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    0.0 - values.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// `−Σ p ln p`, in nats.
pub fn shannon_entropy(dist: &PositionDistribution) -> f64 {
    entropy_of_spectrum(&dist.probs)
}

/// Large-t entropy of the classical walker, `½ ln(πet/2)`.
pub fn classical_entropy_asymptote(t: f64) -> f64 {
    0.5 * (PI * std::f64::consts::E * t / 2.0).ln()
}

fn ordered_dims(n1: usize, n2: usize, what: &str) -> (f64, f64) {
    if n1 > n2 {
        warn!("{what}: swapping arguments so that n1 <= n2 ({n1} > {n2})");
        (n2 as f64, n1 as f64)
    } else {
        (n1 as f64, n2 as f64)
    }
}

/// Mean entanglement entropy of Haar-random states, `ln n1 − n1/(2 n2)`.
pub fn page_value(n1: usize, n2: usize) -> f64 {
    let (a, b) = ordered_dims(n1, n2, "page_value");
    a.ln() - a / (2.0 * b)
}

/// Support `(λ_min, λ_max) = (1/n1)(1 + 1/Q ∓ 2/√Q)` with `Q = n2/n1`.
pub fn mp_support(n1: usize, n2: usize) -> (f64, f64) {
    let (a, b) = ordered_dims(n1, n2, "mp_support");
    let q = b / a;
    let lo = ((1.0 + 1.0 / q - 2.0 / q.sqrt()) / a).max(0.0);
    let hi = (1.0 + 1.0 / q + 2.0 / q.sqrt()) / a;
    (lo, hi)
}

/// Marchenko–Pastur density `(n1 Q / 2π) √((λ−λ_min)(λ_max−λ)) / λ`;
/// zero off support. In this variable the law already has unit mass.
pub fn mp_density(lambda: f64, n1: usize, n2: usize) -> f64 {
    let (lo, hi) = mp_support(n1, n2);
    if !(lambda > lo && lambda < hi) {
        return 0.0;
    }
    let (a, b) = ordered_dims(n1, n2, "mp_density");
    let q = b / a;
    a * q / (2.0 * PI) * ((lambda - lo) * (hi - lambda)).sqrt() / lambda
}

/// [`mp_density`] scaled to total mass `min(n1, n2)`, one unit per eigenvalue.
pub fn mp_density_counting(lambda: f64, n1: usize, n2: usize) -> f64 {
    mp_density(lambda, n1, n2) * n1.min(n2) as f64
}

const MP_CDF_INTERVALS: usize = 512;

/// Cumulative distribution of the Marchenko–Pastur law.
///
/// Integrates in `θ` with `λ = λ_min + (λ_max − λ_min)(1 − cos θ)/2`, which
/// removes the square-root endpoints and leaves a smooth integrand.
pub fn mp_cdf(lambda: f64, n1: usize, n2: usize) -> f64 {
    let (lo, hi) = mp_support(n1, n2);
    if lambda <= lo {
        return 0.0;
    }
    if lambda >= hi {
        return 1.0;
    }
    let (_, b) = ordered_dims(n1, n2, "mp_cdf");
    let scale = b / (2.0 * PI);
    let half_width = 0.5 * (hi - lo);
    let theta_end = (1.0 - (lambda - lo) / half_width).clamp(-1.0, 1.0).acos();
    let integrand = |theta: f64| {
        let s = theta.sin();
        let lam = lo + half_width * (1.0 - theta.cos());
        if lam <= 0.0 {
            // λ_min = 0 and θ = 0: sin²θ/λ → 2/half_width
            return scale * 2.0 * half_width;
        }
        scale * half_width * half_width * s * s / lam
    };
    simpson(integrand, 0.0, theta_end, MP_CDF_INTERVALS).clamp(0.0, 1.0)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_against_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMetric {
    TotalVariation,
    KolmogorovSmirnov,
}

/// Distance between two distributions on the same ring. The KS CDFs run over
/// sites ordered by centered label.
pub fn distribution_distance(
    a: &PositionDistribution,
    b: &PositionDistribution,
    metric: DistanceMetric,
) -> Result<f64> {
    if a.n_sites() != b.n_sites() {
        return Err(Error::ShapeMismatch(format!("{} vs {} sites", a.n_sites(), b.n_sites())));
    }
    let ordered = |d: &PositionDistribution| d.centered().into_iter().map(|(_, p)| p).collect::<Vec<_>>();
    sequence_distance(&ordered(a), &ordered(b), metric)
}

/// Distance between two probability vectors given on the same ordered support.
pub fn sequence_distance(a: &[f64], b: &[f64], metric: DistanceMetric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("support sizes {} vs {}", a.len(), b.len())));
    }
    Ok(match metric {
        DistanceMetric::TotalVariation => 0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>(),
        DistanceMetric::KolmogorovSmirnov => {
            let (mut fa, mut fb, mut d) = (0.0f64, 0.0f64, 0.0f64);
            for (pa, pb) in a.iter().zip(b) {
                fa += pa;
                fb += pb;
                d = d.max((fa - fb).abs());
            }
            d
        }
    })
}

/// Smallest `t` at which the variance leaves the diffusive line.
///
/// The line has unit slope; its intercept is the mean of `var − t` over
/// `t ∈ [1, FIT_END]`. A departure is a relative deviation above 20% that
/// persists for 5 consecutive samples; the first of those samples is
/// returned. `None` means the series never departs.
pub fn diffusive_time(series: &[(usize, f64)]) -> Option<usize> {
    const FIT_END: usize = 5;
    const RELATIVE: f64 = 0.2;
    const PERSIST: usize = 5;
    let fit: Vec<f64> = series.iter().filter(|(t, _)| (1..=FIT_END).contains(t)).map(|&(t, v)| v - t as f64).collect();
    let intercept = if fit.is_empty() { 0.0 } else { fit.iter().sum::<f64>() / fit.len() as f64 };
    let mut run_start = None;
    let mut run = 0;
    for &(t, v) in series.iter().filter(|(t, _)| *t >= 1) {
        let line = t as f64 + intercept;
        if line > 0.0 && ((v - line) / line).abs() > RELATIVE {
            if run == 0 {
                run_start = Some(t);
            }
            run += 1;
            if run >= PERSIST {
                return run_start;
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Median of per-seed diffusive times; a seed that never departs counts as
/// larger than any finite value. `None` if the median itself never departs.
pub fn median_diffusive_time(values: &[Option<usize>]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by_key(|v| v.unwrap_or(usize::MAX));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid].map(|t| t as f64)
    } else {
        Some((sorted[mid - 1]? + sorted[mid]?) as f64 / 2.0)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `Σ_{n≠m} |ρ_nm|` relative to the trace.
pub fn off_diagonal_mass(rho: &ReducedDensity) -> f64 {
    let n = rho.dim();
    let mut off = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                off += rho.matrix[(a, b)].norm();
            }
        }
    }
    off / rho.trace()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EntropySeries {
    pub times: Vec<usize>,
    pub s_quantum: Vec<f64>,
    pub s_classical: Vec<f64>,
}

impl EntropySeries {
    pub fn push(&mut self, t: usize, quantum: f64, classical: f64) {
        self.times.push(t);
        self.s_quantum.push(quantum);
        self.s_classical.push(classical);
    }

    /// Mean quantum entropy over samples with `t` in `[start, end]`.
    pub fn mean_quantum(&self, start: usize, end: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.s_quantum)
            .filter(|(t, _)| (start..=end).contains(*t))
            .map(|(_, &s)| s)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Eigenvalues pooled over the snapshots of a time window, sorted ascending.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPool {
    pub window: (usize, usize),
    pub eigenvalues: Vec<f64>,
}

impl SpectralPool {
    /// KS distance to the normalized Marchenko–Pastur law for `n1 × n2`.
    pub fn ks_to_mp(&self, n1: usize, n2: usize) -> f64 {
        ks_against_cdf(&self.eigenvalues, |x| mp_cdf(x, n1, n2))
    }
}

/// Pools the spectra of the densities sampled at times inside `window`.
/// Each density should be the smaller-subsystem one.
pub fn pool_spectra(samples: &[(usize, ReducedDensity)], window: (usize, usize)) -> Result<SpectralPool> {
    let (start, end) = window;
    let selected: Vec<&ReducedDensity> =
        samples.iter().filter(|(t, _)| (start..=end).contains(t)).map(|(_, r)| r).collect();
    let spectra = par::map_slice(Execution::default(), &selected, |rho| rho.eigenvalues());
    let mut eigenvalues = Vec::new();
    for s in spectra {
        eigenvalues.extend(s?);
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SpectralPool { window, eigenvalues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::C64;
    use crate::walk::Subsystem;

    fn dist(probs: Vec<f64>) -> PositionDistribution {
        PositionDistribution { t: 0, origin: 0, probs }
    }

    fn density(diag: &[f64]) -> ReducedDensity {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        ReducedDensity { subsystem: Subsystem::Coin, matrix: CMatrix::from_diag(&d) }
    }

    #[test]
    fn variance_examples() {
        let mut delta = vec![0.0; 11];
        delta[0] = 1.0;
        assert_eq!(variance(&dist(delta)), 0.0);
        let mut two = vec![0.0; 11];
        two[0] = 0.5;
        two[2] = 0.25;
        two[9] = 0.25;
        assert!((variance(&dist(two)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fgr_forms() {
        assert_eq!(fgr_fidelity(0, 101, 37), (1.0, 1.0));
        let (c, e) = fgr_fidelity(1, 101, 40);
        assert!((c - 0.92548).abs() < 1e-4, "{c}");
        assert!((e - 0.92546).abs() < 1e-4, "{e}");
        assert!((c - 0.925_472_325_531).abs() < 1e-11);
        assert!((e - 0.925_518_578_062).abs() < 1e-11);
        for t in 0..6 {
            let (c, _) = fgr_fidelity(10, 20, t);
            assert!((c - if t % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn fgr_small_perturbation_agreement() {
        let n = 101;
        for delta in 0..=3i64 {
            assert!(2.0 * PI * (delta as f64) / (n as f64) < 0.2);
            for t in 0..=100 {
                let (c, e) = fgr_fidelity(delta, n, t);
                assert!((c - e).abs() < 0.01, "delta={delta} t={t}");
            }
        }
    }

    #[test]
    fn binomial_small_cases() {
        let p2 = binomial_prediction(101, 2);
        assert_eq!((p2.probs[0], p2.probs[2], p2.probs[99]), (0.5, 0.25, 0.25));
        let p1 = binomial_prediction(101, 1);
        assert_eq!((p1.probs[1], p1.probs[100]), (0.5, 0.5));
        for t in [0, 5, 40, 300] {
            assert_eq!(binomial_prediction(13, t).total(), 1.0);
        }
    }

    #[test]
    fn normal_prediction_properties() {
        let even = normal_prediction(400, 41).unwrap();
        for site in 0..400 {
            if (even.centered_label(site) + 41).rem_euclid(2) == 1 {
                assert_eq!(even.probs[site], 0.0);
            }
        }
        let n = 401;
        let p = normal_prediction(n, 40).unwrap();
        let wrong: f64 = (0..n).filter(|&s| (p.centered_label(s) + 40).rem_euclid(2) == 1).map(|s| p.probs[s]).sum();
        assert!(wrong < 1e-200);
        let tv = distribution_distance(&p, &binomial_prediction(n, 40), DistanceMetric::TotalVariation).unwrap();
        assert!(tv < 0.01, "{tv}");
        for t in 20..=100 {
            let v = variance(&normal_prediction(n, t).unwrap());
            assert!((v / t as f64 - 1.0).abs() < 0.03, "t={t} var={v}");
        }
        assert!(normal_prediction(n, 0).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&density(&[1.0, 0.0, 0.0])).unwrap().abs() < 1e-15);
        let mixed = von_neumann_entropy(&density(&[0.25; 4])).unwrap();
        assert!((mixed - 4f64.ln()).abs() < 1e-12);
        let s = von_neumann_entropy(&density(&[0.25, 0.75])).unwrap();
        assert!((s - 0.5623).abs() < 5e-5, "{s}");
        assert!(matches!(von_neumann_entropy(&density(&[1.1, -0.1])), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn shannon_examples() {
        let mut delta = vec![0.0; 101];
        delta[3] = 1.0;
        assert_eq!(shannon_entropy(&dist(delta)), 0.0);
        let uniform = shannon_entropy(&dist(vec![1.0 / 101.0; 101]));
        assert!((uniform - 101f64.ln()).abs() < 1e-12);
        let s = shannon_entropy(&binomial_prediction(401, 40));
        let asymptote = classical_entropy_asymptote(40.0);
        assert!((asymptote - 2.571).abs() < 1e-3);
        assert!((s / asymptote - 1.0).abs() < 0.05);
    }

    #[test]
    fn page_examples() {
        assert!((page_value(7, 7) - (7f64.ln() - 0.5)).abs() < 1e-15);
        assert!((page_value(21, 100) - 2.9395).abs() < 1e-4);
        assert!((page_value(30, 60) - (30f64.ln() - 0.25)).abs() < 1e-15);
        assert_eq!(page_value(100, 21), page_value(21, 100));
    }

    #[test]
    fn mp_support_examples() {
        let (lo, hi) = mp_support(10, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.4).abs() < 1e-15);
        let (lo, hi) = mp_support(21, 100);
        assert!((lo - 0.01398).abs() < 1e-5 && (hi - 0.10126).abs() < 1e-5, "{lo} {hi}");
        assert_eq!(mp_density(0.5, 21, 100), 0.0);
    }

    /// Midpoint rule in λ on a fine grid, independent of the θ substitution.
    fn midpoint_mass(n1: usize, n2: usize, upto: f64) -> f64 {
        let (lo, hi) = mp_support(n1, n2);
        let end = upto.min(hi);
        let steps = 2_000_000;
        let h = (end - lo) / steps as f64;
        (0..steps).map(|i| mp_density(lo + (i as f64 + 0.5) * h, n1, n2) * h).sum()
    }

    #[test]
    fn mp_normalization_by_quadrature() {
        for (n1, n2) in [(21, 100), (20, 101), (70, 71)] {
            let mass = midpoint_mass(n1, n2, f64::INFINITY);
            // the square geometry has λ_min near zero and a sharp 1/λ peak
            let tol = if n2 - n1 < 5 { 1e-5 } else { 1e-6 };
            assert!((mass - 1.0).abs() < tol, "{n1}x{n2}: {mass}");
            assert!((mp_cdf(1.0, n1, n2) - 1.0).abs() < 1e-12);
            let (lo, hi) = mp_support(n1, n2);
            let mid = 0.5 * (lo + hi);
            assert!((mp_cdf(mid, n1, n2) - midpoint_mass(n1, n2, mid)).abs() < 1e-5);
        }
        let (_, hi) = mp_support(30, 30);
        assert!((mp_cdf(hi * 0.999_999, 30, 30) - 1.0).abs() < 1e-6);
        assert!(mp_cdf(hi * 0.5, 30, 30) > 0.5);
        let x = 0.03;
        assert!((mp_density_counting(x, 21, 100) - 21.0 * mp_density(x, 21, 100)).abs() < 1e-12);
    }

    #[test]
    fn diffusive_time_examples() {
        let classical: Vec<(usize, f64)> = (0..=300).map(|t| (t, t as f64)).collect();
        assert_eq!(diffusive_time(&classical), None);
        let synthetic: Vec<(usize, f64)> =
            (0..=300).map(|t| (t, if t < 50 { t as f64 } else { 0.04 * (t * t) as f64 })).collect();
        let td = diffusive_time(&synthetic).unwrap();
        assert!((45..=55).contains(&td), "{td}");
    }

    #[test]
    fn median_of_diffusive_times() {
        assert_eq!(median_diffusive_time(&[Some(3), None, Some(1)]), Some(3.0));
        assert_eq!(median_diffusive_time(&[Some(3), None, None]), None);
        assert_eq!(median_diffusive_time(&[Some(4), Some(2)]), Some(3.0));
        assert_eq!(median_diffusive_time(&[]), None);
    }

    #[test]
    fn distance_examples() {
        let a = binomial_prediction(21, 6);
        assert_eq!(distribution_distance(&a, &a, DistanceMetric::TotalVariation).unwrap(), 0.0);
        assert_eq!(distribution_distance(&a, &a, DistanceMetric::KolmogorovSmirnov).unwrap(), 0.0);
        let mut x = vec![0.0; 5];
        let mut y = vec![0.0; 5];
        x[0] = 1.0;
        y[3] = 1.0;
        assert_eq!(
            distribution_distance(&dist(x.clone()), &dist(y.clone()), DistanceMetric::TotalVariation).unwrap(),
            1.0
        );
        assert_eq!(distribution_distance(&dist(x), &dist(y), DistanceMetric::KolmogorovSmirnov).unwrap(), 1.0);
        assert!(distribution_distance(&a, &binomial_prediction(22, 6), DistanceMetric::TotalVariation).is_err());
    }

    #[test]
    fn pure_state_pool() {
        let mut d = vec![0.0; 6];
        d[2] = 1.0;
        let pool = pool_spectra(&[(5, density(&d)), (50, density(&[0.5; 2]))], (0, 10)).unwrap();
        assert_eq!(pool.eigenvalues.len(), 6);
        assert!((pool.eigenvalues[5] - 1.0).abs() < 1e-15);
        assert!(pool.eigenvalues[..5].iter().all(|&x| x.abs() < 1e-15));
    }
}
