//! Discrete distributions over a finite alphabet.
//!
//! Zero-mass atoms are kept and counted in [`DiscreteDistribution::support_size`]:
//! alphabet constraints count slots, not occupied slots.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::compensated_sum;

/// Masses below this are dropped from the Dirac slot of [`DiscreteDistribution::uniform_dirac`].
pub const DIRAC_OMIT_THRESHOLD: f64 = 1e-12;

/// Validated probability vector. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution<T> {
    probs: Vec<T>,
}

/// Alphabet size `m`, possibly unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphabetBound {
    Finite(u64),
    Infinite,
}

impl AlphabetBound {
    pub fn finite(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidAlphabet(0));
        }
        Ok(AlphabetBound::Finite(m))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, AlphabetBound::Infinite)
    }
}

impl fmt::Display for AlphabetBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetBound::Finite(m) => write!(f, "{m}"),
            AlphabetBound::Infinite => f.write_str("inf"),
        }
    }
}

impl<T: Real> DiscreteDistribution<T> {
    /// Validates `values` as a probability vector, optionally dividing by
    /// their sum first.
    pub fn from_probs(values: Vec<T>, normalize: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if v < T::zero() {
                return Err(Error::NegativeMass { index, value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        let sum = compensated_sum(values.iter().copied());
        if normalize {
            if sum == T::zero() {
                return Err(Error::ZeroSum);
            }
            let probs = values.into_iter().map(|v| v / sum).collect();
            return Ok(Self { probs });
        }
        let sum_f = sum.to_f64().unwrap_or(f64::NAN);
        if (sum_f - 1.0).abs() > T::NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum: sum_f });
        }
        Ok(Self { probs: values })
    }

    /// `m` atoms of mass `1/m`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty);
        }
        let p = T::one() / T::from_usize(m).unwrap();
        Ok(Self { probs: vec![p; m] })
    }

    /// `atom_count` atoms of `atom_mass` followed by one atom of `dirac_mass`.
    /// The Dirac atom is omitted when its mass is below [`DIRAC_OMIT_THRESHOLD`].
    pub fn uniform_dirac(atom_count: usize, atom_mass: T, dirac_mass: T) -> Result<Self> {
        if atom_mass < T::zero() {
            return Err(Error::NegativeMass { index: 0, value: atom_mass.to_f64().unwrap_or(f64::NAN) });
        }
        if dirac_mass < T::zero() {
            return Err(Error::NegativeMass {
                index: atom_count,
                value: dirac_mass.to_f64().unwrap_or(f64::NAN),
            });
        }
        let total = T::from_usize(atom_count).unwrap() * atom_mass + dirac_mass;
        let total_f = total.to_f64().unwrap_or(f64::NAN);
        if !((total_f - 1.0).abs() <= T::NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { sum: total_f });
        }
        let mut probs = vec![atom_mass; atom_count];
        if dirac_mass >= T::lit(DIRAC_OMIT_THRESHOLD) {
            probs.push(dirac_mass);
        }
        if probs.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Number of stored atoms, zero-mass atoms included.
    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Atoms with strictly positive mass.
    pub fn nonzero(&self) -> impl Iterator<Item = T> + '_ {
        self.probs.iter().copied().filter(|&p| p > T::zero())
    }

    /// Positive masses in ascending order. Sums taken over this order do not
    /// depend on how the atoms were listed.
    pub fn sorted_nonzero(&self) -> Vec<T> {
        let mut v: Vec<T> = self.nonzero().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("validated masses are finite"));
        v
    }

    pub fn total_mass(&self) -> T {
        compensated_sum(self.probs.iter().copied())
    }

    /// Re-runs validation on the stored masses.
    pub fn revalidate(&self) -> Result<()> {
        Self::from_probs(self.probs.clone(), false).map(|_| ())
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }
}

/// Parses the text distribution format: one decimal probability per line,
/// `#` lines ignored, trailing blank lines ignored.
pub fn parse_probabilities(text: &str) -> Result<Vec<f64>> {
    let lines: Vec<&str> = text.lines().collect();
    let last_content = lines.iter().rposition(|l| !l.trim().is_empty());
    let Some(last_content) = last_content else {
        return Ok(Vec::new());
    };
    let mut values = Vec::new();
    for (i, raw) in lines[..=last_content].iter().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "blank line before end of data".into() });
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("not a decimal number: {line:?}"),
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Reads and validates a distribution file without renormalizing.
pub fn read_distribution(path: &Path) -> Result<DiscreteDistribution<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    DiscreteDistribution::from_probs(parse_probabilities(&text)?, false)
}
