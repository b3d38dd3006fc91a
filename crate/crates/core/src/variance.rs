//! Variance of the missing mass.
//!
//! With `xi_s` the indicator that symbol `s` is absent from the sample,
//! `M0 = sum_s p_s xi_s` and
//!
//! ```text
//! Var[M0] = sum_s p_s^2 Var[xi_s] + sum_{s != s'} p_s p_s' Cov[xi_s, xi_s']
//! Var[xi_s]        = (1-p_s)^n - (1-p_s)^(2n)
//! Cov[xi_s, xi_s'] = (1-p_s-p_s')^n - (1-p_s)^n (1-p_s')^n
//! ```
//!
//! [`exact_variance`] evaluates this identity in full. [`approx_variance`] and
//! [`poissonized_variance`] evaluate the two closed-form approximations
//! `-n (sum p^2 q)^2 + n sum p^3 q` with `q = (1-p)^n` and `q = e^{-np}`.

use rayon::prelude::*;

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::scalar::{poisson_term, survival_log, survival_pow, Real};
use crate::sum::{compensated_sum, CompensatedSum};

/// Largest support accepted by [`exact_variance`].
pub const MAX_EXACT_ATOMS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarianceMethod {
    /// Full covariance decomposition.
    Exact,
    /// `-n (sum p^2 (1-p)^n)^2 + n sum p^3 (1-p)^n`.
    Binomial,
    /// `-n (sum p^2 e^{-np})^2 + n sum p^3 e^{-np}`.
    Poissonized,
}

impl VarianceMethod {
    /// Name used on the command line and in emitted records.
    pub fn as_str(&self) -> &'static str {
        match self {
            VarianceMethod::Exact => "exact",
            VarianceMethod::Binomial => "thm1",
            VarianceMethod::Poissonized => "poisson",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceEstimate<T> {
    pub value: T,
    pub method: VarianceMethod,
    pub n: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSampleSize)
    } else {
        Ok(())
    }
}

/// `E[M0] = sum_s p_s (1-p_s)^n`.
pub fn expected_missing_mass<T: Real>(dist: &DiscreteDistribution<T>, n: u64) -> Result<T> {
    check_n(n)?;
    let nt = T::from_count(n);
    let v = compensated_sum(dist.sorted_nonzero().into_iter().map(|p| p * survival_pow(p, nt)));
    Ok(v.max(T::zero()).min(T::one()))
}

/// Exact `Var[M0]` under IID sampling of size `n`. `O(m^2)`.
///
/// Rows of the pairwise sum may be evaluated on several rayon workers; the
/// row totals are always combined in row order so the result does not depend
/// on the worker count.
pub fn exact_variance<T: Real>(dist: &DiscreteDistribution<T>, n: u64) -> Result<VarianceEstimate<T>> {
    check_n(n)?;
    if dist.support_size() > MAX_EXACT_ATOMS {
        return Err(Error::TooLarge { atoms: dist.support_size(), limit: MAX_EXACT_ATOMS });
    }
    let nt = T::from_count(n);
    let probs = dist.sorted_nonzero();
    let logs: Vec<T> = probs.iter().map(|&p| survival_log(p, nt)).collect();

    // p^2 q (1 - q), with 1 - q = -expm1(n ln(1-p)).
    let diagonal = compensated_sum(
        probs
            .iter()
            .zip(&logs)
            .map(|(&p, &l)| p * p * l.exp() * -l.exp_m1()),
    );

    let rows: Vec<T> = (0..probs.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            let (pi, li) = (probs[i], logs[i]);
            for j in (i + 1)..probs.len() {
                acc.add(pi * probs[j] * pair_covariance(pi, li, probs[j], logs[j], nt));
            }
            acc.total()
        })
        .collect();
    let off_diagonal = compensated_sum(rows);

    let value = diagonal + T::lit(2.0) * off_diagonal;
    Ok(VarianceEstimate {
        value: value.max(T::zero()),
        method: VarianceMethod::Exact,
        n,
    })
}

/// `Cov[xi_s, xi_s'] = (1-p-p')^n - (1-p)^n (1-p')^n`, always `<= 0`.
///
/// Written as `q q' expm1(n ln(1 - p p' / ((1-p)(1-p'))))`, which keeps full
/// relative precision when the two terms nearly cancel.
fn pair_covariance<T: Real>(p: T, log_q: T, p2: T, log_q2: T, n: T) -> T {
    let one = T::one();
    let qq = (log_q + log_q2).exp();
    if p + p2 >= one {
        return -qq;
    }
    let ratio = p * p2 / ((one - p) * (one - p2));
    if ratio >= one {
        return -qq;
    }
    qq * (n * (-ratio).ln_1p()).exp_m1()
}

/// `-n (sum p^2 (1-p)^n)^2 + n sum p^3 (1-p)^n`. Returned unclamped.
pub fn approx_variance<T: Real>(dist: &DiscreteDistribution<T>, n: u64) -> Result<VarianceEstimate<T>> {
    check_n(n)?;
    let nt = T::from_count(n);
    let mut second = CompensatedSum::new();
    let mut third = CompensatedSum::new();
    for p in dist.sorted_nonzero() {
        let q = survival_pow(p, nt);
        second.add(p * p * q);
        third.add(p * p * p * q);
    }
    let s2 = second.total();
    Ok(VarianceEstimate {
        value: nt * third.total() - nt * s2 * s2,
        method: VarianceMethod::Binomial,
        n,
    })
}

/// `-n (sum p^2 e^{-np})^2 + n sum p^3 e^{-np}`, each term computed as
/// `exp(k ln p - n p)`. Returned unclamped.
pub fn poissonized_variance<T: Real>(
    dist: &DiscreteDistribution<T>,
    n: u64,
) -> Result<VarianceEstimate<T>> {
    check_n(n)?;
    let nt = T::from_count(n);
    let mut second = CompensatedSum::new();
    let mut third = CompensatedSum::new();
    for p in dist.sorted_nonzero() {
        second.add(poisson_term(p, 2, nt));
        third.add(poisson_term(p, 3, nt));
    }
    let s2 = second.total();
    Ok(VarianceEstimate {
        value: nt * third.total() - nt * s2 * s2,
        method: VarianceMethod::Poissonized,
        n,
    })
}

/// Dispatches on `method`.
pub fn variance<T: Real>(
    dist: &DiscreteDistribution<T>,
    n: u64,
    method: VarianceMethod,
) -> Result<VarianceEstimate<T>> {
    match method {
        VarianceMethod::Exact => exact_variance(dist, n),
        VarianceMethod::Binomial => approx_variance(dist, n),
        VarianceMethod::Poissonized => poissonized_variance(dist, n),
    }
}
