//! The reduced extremal-variance program.
//!
//! With `w = k p` (mass of the uniform part) and `c = p n` (scaled atom mass),
//! the leading constant of the maximal variance `alpha / n` solves
//!
//! ```text
//! max  alpha(w, c) = -w^2 c^2 e^{-2c} + w c^2 e^{-c}
//! s.t. 0 <= w <= 1,  w <= b c          (b = m / n; the second row drops for m = inf)
//! ```
//!
//! The optimum sits on `w = 1` or on `w = b c`. For `b >= 1/c*` it is
//! `(1, c*)` where `c*` is the root of `2 - 2e^c + c(e^c - 2)` in `[2, 3]`;
//! below that, `w = b c` and `c` maximizes `-b^2 c^4 e^{-2c} + b c^3 e^{-c}`
//! over `(0, 1/b]`.

use std::fmt;

use crate::dist::{AlphabetBound, DiscreteDistribution, DIRAC_OMIT_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of coarse grid points scanned before golden-section refinement.
pub const COARSE_GRID_POINTS: usize = 2000;

/// Upper end of the coarse scan in `c`. `c^3 e^{-c}` is below `1e-15` here.
pub const C_SCAN_CAP: f64 = 50.0;

/// `m / n`, or unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphabetRatio<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> AlphabetRatio<T> {
    pub fn from_bound(m: AlphabetBound, n: u64) -> Self {
        match m {
            AlphabetBound::Infinite => AlphabetRatio::Infinite,
            AlphabetBound::Finite(m) => AlphabetRatio::Finite(T::from_count(m) / T::from_count(n)),
        }
    }
}

impl<T: Real> fmt::Display for AlphabetRatio<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetRatio::Finite(b) => write!(f, "{b}"),
            AlphabetRatio::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `w = 1`: the maximizer is uniform.
    Uniform,
    /// `w < 1`: uniform part plus a point mass.
    UniformDirac,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Uniform => "UNIFORM",
            Regime::UniformDirac => "UNIFORM_DIRAC",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalSolution<T> {
    pub alpha: T,
    pub w: T,
    pub c: T,
    pub regime: Regime,
    pub b: AlphabetRatio<T>,
}

/// Uniform+Dirac maximizer at a concrete `(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorstCaseSpec<T> {
    pub n: u64,
    pub m: AlphabetBound,
    pub atom_count: usize,
    pub atom_mass: T,
    pub dirac_mass: T,
    pub solution: ExtremalSolution<T>,
}

impl<T: Real> WorstCaseSpec<T> {
    pub fn to_distribution(&self) -> Result<DiscreteDistribution<T>> {
        DiscreteDistribution::uniform_dirac(self.atom_count, self.atom_mass, self.dirac_mass)
    }
}

/// `2 - 2e^c + c(e^c - 2)`. Its root is the stationary point of
/// `-c^2 e^{-2c} + c^2 e^{-c}`.
pub fn cstar_residual<T: Real>(c: T) -> T {
    let two = T::lit(2.0);
    let e = c.exp();
    two - two * e + c * (e - two)
}

/// Brent's method on a sign-changing bracket. Stops once the bracket is
/// narrower than `tol` or the residual is exactly zero.
pub fn brent_root<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa * fb < T::zero()) {
        if fa == T::zero() {
            return Ok(a);
        }
        if fb == T::zero() {
            return Ok(b);
        }
        return Err(Error::NoBracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = T::lit(2.0);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + tol / two;
        let xm = (c - b) / two;
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when a == c.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1.abs() * xm.signum() };
        fb = f(b);
    }
    Ok(b)
}

/// Root of [`cstar_residual`] in `[2, 3]`, about `2.26281`.
pub fn find_cstar<T: Real>() -> Result<T> {
    let tol = T::lit(1e-12).max(T::lit(4.0) * T::epsilon());
    brent_root(cstar_residual::<T>, T::lit(2.0), T::lit(3.0), tol)
}

/// `alpha(w, c) = -w^2 c^2 e^{-2c} + w c^2 e^{-c}`.
pub fn objective_alpha<T: Real>(w: T, c: T) -> T {
    let e = (-c).exp();
    let c2 = c * c;
    w * c2 * e - w * w * c2 * e * e
}

/// The objective on the `w = b c` boundary.
fn boundary_objective<T: Real>(b: T, c: T) -> T {
    objective_alpha(b * c, c)
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`. Returns the
/// best of the final interior point and the two endpoints.
pub fn golden_section_max<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iters = 0;
    while (b - a) > tol && iters < 400 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Maximizes `-b^2 c^4 e^{-2c} + b c^3 e^{-c}` over `(0, 1/b]`: coarse scan,
/// then golden section on the cell pair around the best grid point.
fn maximize_boundary<T: Real>(b: T) -> (T, T) {
    let hi = (T::one() / b).min(T::lit(C_SCAN_CAP));
    let steps = T::from_usize(COARSE_GRID_POINTS).unwrap();
    let at = |i: usize| hi * T::from_usize(i).unwrap() / steps;
    let mut best_i = 1;
    let mut best_v = boundary_objective(b, at(1));
    for i in 2..=COARSE_GRID_POINTS {
        let v = boundary_objective(b, at(i));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = at(best_i - 1).max(T::min_positive_value());
    let top = at((best_i + 1).min(COARSE_GRID_POINTS));
    let tol = T::lit(1e-10).max(T::lit(4.0) * T::epsilon() * top);
    golden_section_max(|c| boundary_objective(b, c), lo, top, tol)
}

/// Solves the reduced program for alphabet ratio `b`.
pub fn solve_alpha<T: Real>(b: AlphabetRatio<T>) -> Result<ExtremalSolution<T>> {
    let cstar = find_cstar::<T>()?;
    let ratio = match b {
        AlphabetRatio::Infinite => {
            return Ok(uniform_solution(cstar, b));
        }
        AlphabetRatio::Finite(r) => {
            if !(r > T::zero()) || !r.is_finite() {
                return Err(Error::InvalidRatio(r.to_f64().unwrap_or(f64::NAN)));
            }
            r
        }
    };
    // w = 1 branch: c >= 1/b, and alpha(1, .) decreases past c*.
    let c_uniform = cstar.max(T::one() / ratio);
    let uniform = uniform_solution(c_uniform, b);
    if ratio * cstar >= T::one() {
        return Ok(uniform);
    }
    let (c, alpha) = maximize_boundary(ratio);
    let w = ratio * c;
    if uniform.alpha >= alpha || w >= T::one() - T::lit(1e-9) {
        return Ok(uniform);
    }
    Ok(ExtremalSolution { alpha, w, c, regime: Regime::UniformDirac, b })
}

fn uniform_solution<T: Real>(c: T, b: AlphabetRatio<T>) -> ExtremalSolution<T> {
    ExtremalSolution {
        alpha: objective_alpha(T::one(), c),
        w: T::one(),
        c,
        regime: Regime::Uniform,
        b,
    }
}

/// Builds the Uniform+Dirac maximizer for sample size `n` and alphabet `m`.
///
/// Atom mass is `c/n` (capped at 1), the atom count `ceil(w n / c)` capped at
/// `m - 1`; if the ceiling would overshoot total mass 1 the floor is used and
/// the remainder goes to the Dirac atom.
pub fn worst_case_distribution<T: Real>(n: u64, m: AlphabetBound) -> Result<WorstCaseSpec<T>> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    if let AlphabetBound::Finite(mm) = m {
        if mm < 2 {
            return Err(Error::InvalidAlphabet(mm));
        }
    }
    let solution = solve_alpha::<T>(AlphabetRatio::from_bound(m, n))?;
    let atom_mass = (solution.c / T::from_count(n)).min(T::one());
    let k = solution.w / atom_mass;
    let nearest = k.round();
    let k = if (k - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) { nearest } else { k };
    let mut count = k.ceil();
    if count * atom_mass > T::one() {
        count = k.floor();
    }
    let mut atom_count = count.to_u64().unwrap_or(u64::MAX);
    if let AlphabetBound::Finite(mm) = m {
        atom_count = atom_count.min(mm - 1);
    }
    let atom_count = atom_count.max(1) as usize;
    let mut dirac_mass = T::one() - T::from_usize(atom_count).unwrap() * atom_mass;
    if dirac_mass < T::lit(DIRAC_OMIT_THRESHOLD) {
        dirac_mass = T::zero();
    }
    Ok(WorstCaseSpec { n, m, atom_count, atom_mass, dirac_mass, solution })
}
