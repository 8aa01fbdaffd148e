//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the matrix routines are generic over.
///
/// The associated constants carry precision-dependent defaults. The `f64`
/// values are the ones the acceptance suite is pinned against; the `f32`
/// values are scaled to single precision so the same code paths stay usable.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default relative tolerance for linear algebra routines.
    const DEFAULT_TOL: Self;
    /// Absolute/relative slack used by the norm certificate sandwich check.
    const CERT_SLACK: Self;
    /// Largest admissible condition number of the norm transform.
    const MAX_KAPPA: Self;
    /// Significant digits needed for a lossless decimal round trip.
    const SIG_DIGITS: usize;
    /// Short name used in file headers.
    const NAME: &'static str;

    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite `f64` values at all, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_TOL: Self = 1e-12;
    const CERT_SLACK: Self = 1e-8;
    const MAX_KAPPA: Self = 1e12;
    const SIG_DIGITS: usize = 17;
    const NAME: &'static str = "f64";
}

impl Real for f32 {
    const DEFAULT_TOL: Self = 1e-5;
    const CERT_SLACK: Self = 1e-3;
    const MAX_KAPPA: Self = 1e5;
    const SIG_DIGITS: usize = 9;
    const NAME: &'static str = "f32";
}

/// Complex scalar over a [`Real`] component type.
pub type ComplexScalar<T> = Complex<T>;

#[inline]
pub(crate) fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
