use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical routines are written against.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for `|sum(p) - 1|` when validating a distribution.
    const NORMALIZATION_TOL: f64;

    /// Converts an `f64` literal. Total for both `f32` and `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }
}

impl Real for f32 {
    const NORMALIZATION_TOL: f64 = 1e-5;
}

impl Real for f64 {
    const NORMALIZATION_TOL: f64 = 1e-9;
}

/// `(1 - p)^n` as `exp(n * ln_1p(-p))`, accurate for `p` near zero and free
/// of underflow in the intermediate steps. `p` is clamped to `[0, 1]`.
pub(crate) fn survival_pow<T: Real>(p: T, n: T) -> T {
    let p = p.max(T::zero()).min(T::one());
    if p == T::one() {
        return T::zero();
    }
    (n * (-p).ln_1p()).exp()
}

/// `n * ln(1 - p)`, the exponent behind [`survival_pow`].
pub(crate) fn survival_log<T: Real>(p: T, n: T) -> T {
    let p = p.max(T::zero()).min(T::one());
    if p == T::one() {
        return T::neg_infinity();
    }
    n * (-p).ln_1p()
}

/// `p^k * exp(-n p)` evaluated in the log domain; zero for `p = 0`.
pub(crate) fn poisson_term<T: Real>(p: T, k: i32, n: T) -> T {
    if p <= T::zero() {
        return T::zero();
    }
    (T::from_i32(k).unwrap() * p.ln() - n * p).exp()
}
