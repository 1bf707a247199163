use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Kick strength `g` and kick period `tau` of the Harper map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarperParams {
    g: f64,
    tau: f64,
}

impl HarperParams {
    pub fn new(g: f64, tau: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidArgument(format!("kick strength g must be >= 0, got {g}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("kick period tau must be > 0, got {tau}")));
        }
        Ok(HarperParams { g, tau })
    }

    /// `tau = 1`.
    pub fn with_g(g: f64) -> Result<Self> {
        Self::new(g, 1.0)
    }

    #[inline]
    pub fn g(&self) -> f64 {
        self.g
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

impl Default for HarperParams {
    fn default() -> Self {
        HarperParams { g: 0.0, tau: 1.0 }
    }
}

/// A point on the unit torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q: wrap_unit(q), p: wrap_unit(p) }
    }
}

#[inline]
fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// One period of the classical kicked Harper map. The momentum update uses
/// the already updated position.
#[inline]
pub fn classical_step(pt: PhasePoint, params: HarperParams) -> PhasePoint {
    let q = wrap_unit(pt.q - params.tau * (2.0 * PI * pt.p).sin());
    let p = wrap_unit(pt.p + params.tau * params.g * (2.0 * PI * q).sin());
    PhasePoint { q, p }
}

/// Exact inverse of [`classical_step`].
#[inline]
pub fn classical_step_inverse(pt: PhasePoint, params: HarperParams) -> PhasePoint {
    let p = wrap_unit(pt.p - params.tau * params.g * (2.0 * PI * pt.q).sin());
    let q = wrap_unit(pt.q + params.tau * (2.0 * PI * p).sin());
    PhasePoint { q, p }
}

/// Tangent map of one step at `pt`, applied to `(dq, dp)`.
#[inline]
fn tangent_step(pt: PhasePoint, next: PhasePoint, params: HarperParams, v: (f64, f64)) -> (f64, f64) {
    let a = 2.0 * PI * params.tau * (2.0 * PI * pt.p).cos();
    let b = 2.0 * PI * params.tau * params.g * (2.0 * PI * next.q).cos();
    let dq = v.0 - a * v.1;
    let dp = v.1 + b * dq;
    (dq, dp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub id: usize,
    pub points: Vec<PhasePoint>,
}

/// `n_orbits` orbits from uniformly drawn initial conditions; each orbit holds
/// its initial point followed by `n_steps - 1` iterates.
pub fn phase_portrait(params: HarperParams, n_orbits: usize, n_steps: usize, seed: u64) -> Vec<Orbit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<PhasePoint> =
        (0..n_orbits).map(|_| PhasePoint::new(rng.random::<f64>(), rng.random::<f64>())).collect();
    par::map_range(Execution::default(), n_orbits, |id| {
        let mut points = Vec::with_capacity(n_steps);
        let mut pt = starts[id];
        for _ in 0..n_steps {
            points.push(pt);
            pt = classical_step(pt, params);
        }
        Orbit { id, points }
    })
}

/// Fraction of cells of a `cells × cells` grid on the torus visited by `orbits`.
pub fn torus_coverage(orbits: &[Orbit], cells: usize) -> f64 {
    let mut seen = vec![false; cells * cells];
    let cell = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    for pt in orbits.iter().flat_map(|o| &o.points) {
        seen[cell(pt.q) * cells + cell(pt.p)] = true;
    }
    seen.iter().filter(|&&s| s).count() as f64 / seen.len() as f64
}

/// Largest Lyapunov exponent (nats per step) from tangent-map iteration with
/// renormalization every step. The first 10% of steps are discarded.
pub fn lyapunov_estimate(params: HarperParams, pt0: PhasePoint, n_steps: usize) -> Result<f64> {
    if n_steps < 1000 {
        return Err(Error::InvalidArgument(format!("lyapunov_estimate needs >= 1000 steps, got {n_steps}")));
    }
    let burn_in = n_steps / 10;
    let mut pt = pt0;
    let mut v = (1.0f64, 1.0f64);
    let norm0 = v.0.hypot(v.1);
    v = (v.0 / norm0, v.1 / norm0);
    let mut sum = 0.0;
    for step in 0..n_steps {
        let next = classical_step(pt, params);
        v = tangent_step(pt, next, params, v);
        let norm = v.0.hypot(v.1);
        v = (v.0 / norm, v.1 / norm);
        if step >= burn_in {
            sum += norm.ln();
        }
        pt = next;
    }
    Ok(sum / (n_steps - burn_in) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus_dist(a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        d.min(1.0 - d)
    }

    #[test]
    fn zero_momentum_leaves_position_fixed() {
        let params = HarperParams::new(0.3, 1.0).unwrap();
        let next = classical_step(PhasePoint::new(0.3, 0.0), params);
        assert!((next.q - 0.3).abs() < 1e-15);
        let want = wrap_unit(0.3 * (0.6 * PI).sin());
        assert!((next.p - want).abs() < 1e-15);
    }

    #[test]
    fn no_kick_conserves_momentum() {
        let params = HarperParams::default();
        let mut pt = PhasePoint::new(0.123, 0.777);
        for _ in 0..1000 {
            pt = classical_step(pt, params);
            assert_eq!(pt.p, 0.777);
        }
    }

    #[test]
    fn tangent_map_has_unit_determinant() {
        let params = HarperParams::new(0.4, 1.0).unwrap();
        let pt = PhasePoint::new(0.21, 0.67);
        let next = classical_step(pt, params);
        let c1 = tangent_step(pt, next, params, (1.0, 0.0));
        let c2 = tangent_step(pt, next, params, (0.0, 1.0));
        let det = c1.0 * c2.1 - c2.0 * c1.1;
        assert!((det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(HarperParams::new(-0.1, 1.0).is_err());
        assert!(HarperParams::new(0.1, 0.0).is_err());
        assert!(HarperParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn lyapunov_requires_long_run() {
        assert!(lyapunov_estimate(HarperParams::default(), PhasePoint::new(0.1, 0.2), 999).is_err());
    }

    #[test]
    fn integrable_lyapunov_vanishes() {
        let lam = lyapunov_estimate(HarperParams::default(), PhasePoint::new(0.31, 0.17), 100_000).unwrap();
        assert!(lam <= 0.01, "{lam}");
    }

    #[test]
    fn unkicked_orbits_keep_momentum() {
        for orbit in phase_portrait(HarperParams::default(), 10, 200, 3) {
            let p0 = orbit.points[0].p;
            assert!(orbit.points.iter().all(|pt| pt.p == p0));
        }
    }

    #[test]
    fn portrait_is_deterministic() {
        let params = HarperParams::with_g(0.05).unwrap();
        assert_eq!(phase_portrait(params, 5, 100, 9), phase_portrait(params, 5, 100, 9));
    }

    proptest! {
        #[test]
        fn step_is_invertible(q in 0.0f64..1.0, p in 0.0f64..1.0, g in 0.0f64..1.0, tau in 0.1f64..2.0) {
            let params = HarperParams::new(g, tau).unwrap();
            let pt = PhasePoint::new(q, p);
            let back = classical_step_inverse(classical_step(pt, params), params);
            prop_assert!(torus_dist(back.q, pt.q) < 1e-12);
            prop_assert!(torus_dist(back.p, pt.p) < 1e-12);
        }

        #[test]
        fn step_stays_on_torus(q in -3.0f64..3.0, p in -3.0f64..3.0, g in 0.0f64..2.0) {
            let next = classical_step(PhasePoint::new(q, p), HarperParams::with_g(g).unwrap());
            prop_assert!((0.0..1.0).contains(&next.q) && (0.0..1.0).contains(&next.p));
        }
    }
}
