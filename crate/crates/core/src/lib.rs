//! Variance of the missing mass.
//!
//! The missing mass `M0 = sum_s p_s * 1{symbol s unseen}` of an IID sample of
//! size `n` is the total probability of the symbols that did not appear. This
//! crate computes its variance exactly (full pairwise covariance sum) and via
//! the binomial and poissonized `O(n^-2)` approximations, solves the reduced
//! extremal-variance program for an alphabet ratio `b = m/n`, builds the
//! Uniform+Dirac worst-case distribution, and compares the true variance
//! against the variance factors used by concentration bounds.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `f64`
//! aliases below are what the CLI uses.

// `!(x > y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod concentration;
pub mod dist;
pub mod error;
pub mod extremal;
pub mod scalar;
pub mod simulate;
pub mod sum;
pub mod variance;

pub use concentration::{gap_report, iid_majorization_v, subgamma_v, GapReport, TrueVarianceMode};
pub use dist::{AlphabetBound, DiscreteDistribution};
pub use error::{Error, Result};
pub use extremal::{
    find_cstar, objective_alpha, solve_alpha, worst_case_distribution, AlphabetRatio,
    ExtremalSolution, Regime, WorstCaseSpec,
};
pub use scalar::Real;
pub use simulate::{estimate_variance, sample_missing_mass, SimulationEstimate};
pub use sum::CompensatedSum;
pub use variance::{
    approx_variance, exact_variance, expected_missing_mass, poissonized_variance,
    VarianceEstimate, VarianceMethod, MAX_EXACT_ATOMS,
};

/// Double-precision distribution.
pub type Distribution = DiscreteDistribution<f64>;
pub type Solution = ExtremalSolution<f64>;
pub type WorstCase = WorstCaseSpec<f64>;
pub type Estimate = VarianceEstimate<f64>;
pub type Simulation = SimulationEstimate<f64>;
pub type Gap = GapReport<f64>;
