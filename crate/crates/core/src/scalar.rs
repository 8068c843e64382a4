//! Minimal field abstraction shared by the exact and floating-point paths.

use std::cmp::Ordering;
use std::fmt::Debug;

use crate::rational::Rational;

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn total_cmp(&self, o: &Self) -> Ordering;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn lt(&self, o: &Self) -> bool {
        self.total_cmp(o) == Ordering::Less
    }

    /// Strict improvement for iterative schemes that must terminate; the
    /// float version demands a margin so rounding cannot cycle.
    fn improves_on(&self, o: &Self) -> bool {
        self.lt(o)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn total_cmp(&self, o: &Self) -> Ordering {
        f64::total_cmp(self, o)
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn improves_on(&self, o: &Self) -> bool {
        *self < o - 1e-12 * o.abs().max(1.0)
    }
}
