//! Monte-Carlo oracle for the missing mass.
//!
//! Each trial draws `n` IID symbols by inverse-CDF lookup and sums the mass
//! of the symbols never drawn. Trial `i` is seeded from `(seed, i)` alone, and
//! results are reduced in trial order, so estimates are bit-identical for any
//! rayon worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::{compensated_sum, CompensatedSum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationEstimate<T> {
    pub trials: u64,
    pub mean: T,
    /// Unbiased (`R - 1` denominator) sample variance of `M0`.
    pub variance: T,
    pub se_mean: T,
    /// Standard error of `variance`, from the fourth central moment.
    pub se_variance: T,
    pub seed: u64,
}

/// Cumulative mass table for inverse-CDF sampling.
#[derive(Clone, Debug)]
pub struct CumulativeTable<T> {
    cumulative: Vec<T>,
}

impl<T: Real> CumulativeTable<T> {
    pub fn new(dist: &DiscreteDistribution<T>) -> Self {
        let mut acc = CompensatedSum::new();
        let cumulative = dist
            .probs()
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.total()
            })
            .collect();
        Self { cumulative }
    }

    /// Index of the first atom whose cumulative mass exceeds `u * total`,
    /// for `u` in `[0, 1)`. Zero-mass atoms are never returned.
    pub fn lookup(&self, u: T) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        if idx < self.cumulative.len() {
            idx
        } else {
            // u * total rounded up to total: take the last atom with mass.
            let last = self.cumulative.len() - 1;
            (0..=last)
                .rev()
                .find(|&i| i == 0 || self.cumulative[i] > self.cumulative[i - 1])
                .unwrap_or(last)
        }
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index` under master `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn one_trial<T: Real>(
    dist: &DiscreteDistribution<T>,
    table: &CumulativeTable<T>,
    n: u64,
    seed: u64,
    seen: &mut [bool],
) -> T {
    seen.fill(false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let u: f64 = rng.gen();
        seen[table.lookup(T::lit(u))] = true;
    }
    compensated_sum(
        dist.probs()
            .iter()
            .zip(seen.iter())
            .filter(|(_, &s)| !s)
            .map(|(&p, _)| p),
    )
}

/// Realized missing mass of one sample of size `n`. Deterministic in
/// `(dist, n, seed)`.
pub fn sample_missing_mass<T: Real>(dist: &DiscreteDistribution<T>, n: u64, seed: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let table = CumulativeTable::new(dist);
    let mut seen = vec![false; dist.support_size()];
    Ok(one_trial(dist, &table, n, seed, &mut seen))
}

/// Runs `trials` independent replications on the current rayon pool.
pub fn estimate_variance<T: Real>(
    dist: &DiscreteDistribution<T>,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<SimulationEstimate<T>> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    if trials < 2 {
        return Err(Error::InvalidTrials(trials));
    }
    let table = CumulativeTable::new(dist);
    let m = dist.support_size();
    let samples: Vec<T> = (0..trials)
        .into_par_iter()
        .map_init(
            || vec![false; m],
            |seen, i| one_trial(dist, &table, n, derive_seed(seed, i), seen),
        )
        .collect();
    Ok(summarize(&samples, seed))
}

/// Moment summary of a sample, reduced in index order.
pub fn summarize<T: Real>(samples: &[T], seed: u64) -> SimulationEstimate<T> {
    let r = T::from_usize(samples.len()).unwrap();
    let one = T::one();
    let mean = compensated_sum(samples.iter().copied()) / r;
    let mut m2 = CompensatedSum::new();
    let mut m4 = CompensatedSum::new();
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2.add(d2);
        m4.add(d2 * d2);
    }
    let variance = (m2.total() / (r - one)).max(T::zero());
    // Central moments with 1/R, as the formula expects. Using the unbiased
    // variance here cancels the 2 sigma^4 / R term, which is all that is left
    // for two-point samples (mu4 = sigma^4).
    let mu2 = m2.total() / r;
    let mu4 = m4.total() / r;
    let three = T::lit(3.0);
    let var_of_var = (mu4 - (r - three) / (r - one) * mu2 * mu2) / r;
    SimulationEstimate {
        trials: samples.len() as u64,
        mean: mean.max(T::zero()).min(one),
        variance,
        se_mean: (variance / r).sqrt(),
        se_variance: var_of_var.max(T::zero()).sqrt(),
        seed,
    }
}
