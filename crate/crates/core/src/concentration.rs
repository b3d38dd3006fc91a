//! Variance factors used by missing-mass concentration bounds, compared with
//! the true variance.

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::scalar::{survival_log, survival_pow, Real};
use crate::sum::compensated_sum;
use crate::variance::{exact_variance, poissonized_variance};

/// Which quantity stands in for the true variance in a [`GapReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrueVarianceMode {
    Exact,
    Poissonized,
}

impl TrueVarianceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrueVarianceMode::Exact => "exact",
            TrueVarianceMode::Poissonized => "poisson",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport<T> {
    pub n: u64,
    pub mode: TrueVarianceMode,
    pub true_variance: T,
    pub subgamma_v: T,
    pub iid_major_v: T,
    /// `subgamma_v - true_variance`
    pub gap_subgamma: T,
    /// `iid_major_v - true_variance`
    pub gap_iid: T,
}

/// Sub-gamma variance factor `sum p^2 (1-p)^n + n^-1 sum p (1-p)^n`.
pub fn subgamma_v<T: Real>(dist: &DiscreteDistribution<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let nt = T::from_count(n);
    let v = compensated_sum(dist.sorted_nonzero().into_iter().map(|p| {
        let q = survival_pow(p, nt);
        p * p * q + p * q / nt
    }));
    Ok(v.max(T::zero()))
}

/// `sum p^2 ((1-p)^n - (1-p)^{2n})`: the variance with all indicator
/// covariances dropped, as under IID majorization.
pub fn iid_majorization_v<T: Real>(dist: &DiscreteDistribution<T>, n: u64) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let nt = T::from_count(n);
    let v = compensated_sum(dist.sorted_nonzero().into_iter().map(|p| {
        let l = survival_log(p, nt);
        p * p * l.exp() * -l.exp_m1()
    }));
    Ok(v.max(T::zero()))
}

pub fn gap_report<T: Real>(
    dist: &DiscreteDistribution<T>,
    n: u64,
    mode: TrueVarianceMode,
) -> Result<GapReport<T>> {
    let true_variance = match mode {
        TrueVarianceMode::Exact => exact_variance(dist, n)?.value,
        TrueVarianceMode::Poissonized => poissonized_variance(dist, n)?.value,
    };
    let subgamma = subgamma_v(dist, n)?;
    let iid = iid_majorization_v(dist, n)?;
    Ok(GapReport {
        n,
        mode,
        true_variance,
        subgamma_v: subgamma,
        iid_major_v: iid,
        gap_subgamma: subgamma - true_variance,
        gap_iid: iid - true_variance,
    })
}

/// Best point found by [`scan_subgamma_uniform_dirac`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubgammaScan<T> {
    /// `n * subgamma_v` at the best point.
    pub scaled_v: T,
    pub atom_count: u64,
    pub atom_mass: T,
    pub dirac_mass: T,
}

/// Grid search for the largest `n * subgamma_v` over Uniform+Dirac
/// distributions: `k` atoms of mass `c/n` plus a point mass `1 - k c / n`.
/// `c` runs over `grid` points of `(0, c_max]` and `k` over `grid` values of
/// `w n / c` for `w` in `[0, 1]`.
pub fn scan_subgamma_uniform_dirac<T: Real>(n: u64, c_max: T, grid: usize) -> Result<SubgammaScan<T>> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let nt = T::from_count(n);
    let g = T::from_usize(grid.max(2)).unwrap();
    let mut best: Option<SubgammaScan<T>> = None;
    for i in 1..=grid.max(2) {
        let c = c_max * T::from_usize(i).unwrap() / g;
        let p = (c / nt).min(T::one());
        let qp = survival_pow(p, nt);
        for j in 0..grid.max(2) {
            let w = T::from_usize(j).unwrap() / (g - T::one());
            let k = (w / p).floor();
            let d = (T::one() - k * p).max(T::zero());
            let qd = survival_pow(d, nt);
            let v = nt * (k * p * p * qp + d * d * qd) + (k * p * qp + d * qd);
            if best.is_none_or(|b| v > b.scaled_v) {
                best = Some(SubgammaScan {
                    scaled_v: v,
                    atom_count: k.to_u64().unwrap_or(0),
                    atom_mass: p,
                    dirac_mass: d,
                });
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}
