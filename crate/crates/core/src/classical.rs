//! Classical symmetric random walk on the ring: exact dyadic evolution and a
//! Monte Carlo cross-check.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::walk::PositionDistribution;

const WALKERS_PER_BLOCK: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDistribution {
    pub t: usize,
    /// Probabilities indexed by ring site; the walk starts at site 0.
    pub probs: Vec<f64>,
}

impl ClassicalDistribution {
    pub fn n_sites(&self) -> usize {
        self.probs.len()
    }

    pub fn to_position_distribution(&self) -> PositionDistribution {
        PositionDistribution { t: self.t, origin: 0, probs: self.probs.clone() }
    }
}

/// `numerator / 2^exponent` rounded to the nearest f64.
pub fn dyadic_to_f64(numerator: &BigUint, exponent: usize) -> f64 {
    if numerator.is_zero() {
        return 0.0;
    }
    let bits = numerator.bits() as i64;
    // keep 64 significant bits, the conversion below rounds to 53
    let shift = (bits - 64).max(0);
    let mantissa = (numerator >> shift as usize).to_u64().expect("64 bits") as f64;
    ldexp(mantissa, shift - exponent as i64)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Incremental exact walker: site weights are integers over `2^t`.
#[derive(Clone, Debug)]
pub struct ClassicalWalker {
    t: usize,
    numerators: Vec<BigUint>,
}

impl ClassicalWalker {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one site".into()));
        }
        let mut numerators = vec![BigUint::zero(); n_sites];
        numerators[0] = BigUint::from(1u32);
        Ok(ClassicalWalker { t: 0, numerators })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `p(n, t+1) = ½ p(n-1, t) + ½ p(n+1, t)` on the ring.
    pub fn step(&mut self) {
        let n = self.numerators.len();
        let next = (0..n).map(|site| &self.numerators[(site + n - 1) % n] + &self.numerators[(site + 1) % n]).collect();
        self.numerators = next;
        self.t += 1;
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    pub fn distribution(&self) -> ClassicalDistribution {
        let probs = self.numerators.iter().map(|x| dyadic_to_f64(x, self.t)).collect();
        ClassicalDistribution { t: self.t, probs }
    }
}

/// Exact distribution after `t` steps from the origin.
pub fn exact_evolve(n_sites: usize, t: usize) -> Result<ClassicalDistribution> {
    let mut walker = ClassicalWalker::new(n_sites)?;
    for _ in 0..t {
        walker.step();
    }
    Ok(walker.distribution())
}

/// Empirical distribution of `n_walkers` independent walkers. Walkers are
/// processed in blocks; block `b` draws from a ChaCha8 stream seeded with
/// `split_seed(seed, b)`.
pub fn mc_evolve(n_sites: usize, t: usize, n_walkers: usize, seed: u64) -> Result<ClassicalDistribution> {
    if n_sites == 0 {
        return Err(Error::InvalidArgument("lattice needs at least one site".into()));
    }
    if n_walkers == 0 {
        return Err(Error::InvalidArgument("need at least one walker".into()));
    }
    let blocks = n_walkers.div_ceil(WALKERS_PER_BLOCK);
    let ring = n_sites as i64;
    let per_block = par::map_range(Execution::default(), blocks, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::split_seed(seed, b as u64));
        let walkers = WALKERS_PER_BLOCK.min(n_walkers - b * WALKERS_PER_BLOCK);
        let mut counts = vec![0u64; n_sites];
        for _ in 0..walkers {
            let mut pos = 0i64;
            let mut left = t;
            while left > 0 {
                let take = left.min(64);
                let bits: u64 = rng.random();
                let ups = (bits & (u64::MAX >> (64 - take))).count_ones() as i64;
                pos += 2 * ups - take as i64;
                left -= take;
            }
            counts[pos.rem_euclid(ring) as usize] += 1;
        }
        counts
    });
    let mut totals = vec![0u64; n_sites];
    for counts in per_block {
        for (tot, c) in totals.iter_mut().zip(counts) {
            *tot += c;
        }
    }
    let probs = totals.into_iter().map(|c| c as f64 / n_walkers as f64).collect();
    Ok(ClassicalDistribution { t, probs })
}
