//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating point type underlying the complex arithmetic: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Default relative tolerance for algebraic identities at this precision.
    const DEFAULT_TOL: f64;

    /// Converts an `f64` literal; every literal used in this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn default_tol() -> Self {
        Self::lit(Self::DEFAULT_TOL)
    }

    /// `DEFAULT_TOL` multiplied by `k`; used for the looser checks (axioms, audits).
    #[inline]
    fn tol_times(k: f64) -> Self {
        Self::lit(Self::DEFAULT_TOL * k)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_TOL: f64 = 1e-9;
}

impl Real for f32 {
    const DEFAULT_TOL: f64 = 1e-4;
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
#[cfg(test)]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}
