//! Scalar abstractions: floating-point scalars for the numeric kernels and
//! coefficient rings for the cohomology algebra.

use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, Zero};
use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use crate::exact::QuadRat;

/// Floating scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Signed
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}
impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting an `f64` constant into the working scalar.
pub(crate) fn cast<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant must convert into the working scalar")
}

/// Coefficient ring of the cohomology algebra.
///
/// The structure constants of `H` and `H^c` are rational, so the only
/// embedding a ring needs is `from_ratio`. Twisted Todd classes additionally
/// need the values `4 sin²(π q)` for rational `q`; rings that cannot represent
/// a given value exactly return `None` and callers fall back to the complex
/// path.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_ratio(r: &Ratio<i64>) -> Self;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(&Ratio::from_integer(k))
    }

    /// `4 sin²(π q)` if representable in this ring.
    fn four_sin2_pi(q: &Ratio<i64>) -> Option<Self>;
}

/// `4 sin²(π p/q)` is rational exactly for denominators 1, 2, 3, 4 and 6.
/// For denominators 5 and 10 it lies in `ℚ(√5)`; both cases are returned as a
/// [`QuadRat`], with `None` for everything else.
pub(crate) fn four_sin2_pi_exact(q: &Ratio<i64>) -> Option<QuadRat> {
    let frac = q - q.floor();
    let (p, den) = (*frac.numer(), *frac.denom());
    // 4 sin²(π p/q) = 2 - 2 cos(2π p/q)
    let rational = |v: (i64, i64)| Some(QuadRat::from_ratio64(Ratio::new(v.0, v.1)));
    match (den, p) {
        (1, _) => rational((0, 1)),
        (2, _) => rational((4, 1)),
        (3, _) => rational((3, 1)),
        (4, _) => rational((2, 1)),
        (6, 1) | (6, 5) => rational((1, 1)),
        // 4 sin²(π/5) = (5-√5)/2, 4 sin²(2π/5) = (5+√5)/2
        (5, 1) | (5, 4) => Some(QuadRat::new_ratio64(Ratio::new(5, 2), Ratio::new(-1, 2))),
        (5, 2) | (5, 3) => Some(QuadRat::new_ratio64(Ratio::new(5, 2), Ratio::new(1, 2))),
        // 4 sin²(π/10) = (3-√5)/2, 4 sin²(3π/10) = (3+√5)/2
        (10, 1) | (10, 9) => Some(QuadRat::new_ratio64(Ratio::new(3, 2), Ratio::new(-1, 2))),
        (10, 3) | (10, 7) => Some(QuadRat::new_ratio64(Ratio::new(3, 2), Ratio::new(1, 2))),
        _ => None,
    }
}

impl Coeff for BigRational {
    fn from_ratio(r: &Ratio<i64>) -> Self {
        BigRational::new((*r.numer()).into(), (*r.denom()).into())
    }

    fn four_sin2_pi(q: &Ratio<i64>) -> Option<Self> {
        four_sin2_pi_exact(q).and_then(|v| v.into_rational())
    }
}

impl Coeff for QuadRat {
    fn from_ratio(r: &Ratio<i64>) -> Self {
        QuadRat::from_ratio64(*r)
    }

    fn four_sin2_pi(q: &Ratio<i64>) -> Option<Self> {
        four_sin2_pi_exact(q)
    }
}

impl<F: Real> Coeff for Complex<F> {
    fn from_ratio(r: &Ratio<i64>) -> Self {
        Complex::new(cast::<F>(*r.numer() as f64) / cast::<F>(*r.denom() as f64), F::zero())
    }

    fn four_sin2_pi(q: &Ratio<i64>) -> Option<Self> {
        let x = cast::<F>(*q.numer() as f64) / cast::<F>(*q.denom() as f64);
        let s = (F::PI() * x).sin();
        Some(Complex::new(cast::<F>(4.0) * s * s, F::zero()))
    }
}
