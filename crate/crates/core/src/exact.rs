//! Exact arithmetic in the quadratic field `ℚ(√5)`.
//!
//! Twisted Todd classes of rank-2 sectors are values `4 sin²(π p/q)`; for
//! `q ∈ {1,2,3,4,6}` they are rational and for `q ∈ {5,10}` they live in
//! `ℚ(√5)`. This covers every fan with `n ≤ 6`, which is what the exact
//! consistency checks of the Euler pairing need.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `a + b√5` with exact rational `a`, `b`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadRat {
    a: BigRational,
    b: BigRational,
}

impl QuadRat {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadRat { a, b }
    }

    pub fn new_ratio64(a: Ratio<i64>, b: Ratio<i64>) -> Self {
        QuadRat::new(big(a), big(b))
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadRat { a, b: BigRational::zero() }
    }

    pub fn from_ratio64(a: Ratio<i64>) -> Self {
        QuadRat::from_rational(big(a))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational part if the element is rational, else `None`.
    pub fn into_rational(self) -> Option<BigRational> {
        if self.b.is_zero() {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.a) + ratio_to_f64(&self.b) * 5f64.sqrt()
    }

    /// Field inverse. Panics on zero, like integer division.
    pub fn inv(&self) -> Self {
        // (a + b√5)⁻¹ = (a - b√5) / (a² - 5b²); the norm vanishes only at 0
        // since √5 is irrational.
        let five = BigRational::from_integer(BigInt::from(5));
        let norm = &self.a * &self.a - five * &self.b * &self.b;
        assert!(!norm.is_zero(), "division by zero in QuadRat");
        QuadRat { a: &self.a / &norm, b: -(&self.b / &norm) }
    }
}

fn big(r: Ratio<i64>) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn fmt_quadrat(v: &QuadRat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.b.is_zero() {
        write!(f, "{}", v.a)
    } else if v.a.is_zero() {
        write!(f, "{}*sqrt(5)", v.b)
    } else if v.b.is_negative() {
        write!(f, "{} - {}*sqrt(5)", v.a, -&v.b)
    } else {
        write!(f, "{} + {}*sqrt(5)", v.a, v.b)
    }
}

impl fmt::Debug for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_quadrat(self, f)
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_quadrat(self, f)
    }
}

impl Add for QuadRat {
    type Output = QuadRat;
    fn add(self, rhs: QuadRat) -> QuadRat {
        QuadRat { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for QuadRat {
    type Output = QuadRat;
    fn sub(self, rhs: QuadRat) -> QuadRat {
        QuadRat { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Mul for QuadRat {
    type Output = QuadRat;
    fn mul(self, rhs: QuadRat) -> QuadRat {
        let five = BigRational::from_integer(BigInt::from(5));
        QuadRat {
            a: &self.a * &rhs.a + five * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for QuadRat {
    type Output = QuadRat;
    fn div(self, rhs: QuadRat) -> QuadRat {
        self * rhs.inv()
    }
}

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat { a: -self.a, b: -self.b }
    }
}

impl Zero for QuadRat {
    fn zero() -> Self {
        QuadRat { a: BigRational::zero(), b: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadRat {
    fn one() -> Self {
        QuadRat { a: BigRational::one(), b: BigRational::zero() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> QuadRat {
        QuadRat::new_ratio64(Ratio::new(a.0, a.1), Ratio::new(b.0, b.1))
    }

    #[test]
    fn field_axioms_spot() {
        let x = q((5, 2), (-1, 2)); // 4 sin²(π/5)
        let y = q((5, 2), (1, 2)); // 4 sin²(2π/5)
        // product of the two surds is the norm: (25 - 5)/4 = 5
        assert_eq!(x.clone() * y.clone(), q((5, 1), (0, 1)));
        assert_eq!(x.clone() * x.inv(), QuadRat::one());
        assert_eq!(y.clone() - y, QuadRat::zero());
    }

    #[test]
    fn matches_float_evaluation() {
        let x = q((5, 2), (-1, 2));
        assert!((x.to_f64() - 4.0 * (std::f64::consts::PI / 5.0).sin().powi(2)).abs() < 1e-14);
    }
}
