//! Exact rational scalars.
//!
//! [`Rational`] keeps small values inline as an `i64` fraction and only
//! spills to an arbitrary-precision fraction when a result no longer fits.
//! Every value is kept in lowest terms with a positive denominator, and a
//! value that fits the inline form is never stored in the big form, so
//! structural equality is value equality.
//!
//! [`ExtRational`] adds the two infinities used for bounds.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(v: i64) -> Self {
        Rational(Repr::Small { num: v, den: 1 })
    }

    /// Builds `num/den`. Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let neg = (num < 0) != (den < 0);
        let n = num.unsigned_abs();
        let d = den.unsigned_abs();
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if n <= i64::MAX as u128 && d <= i64::MAX as u128 {
            let n = n as i64;
            return Rational(Repr::Small {
                num: if neg { -n } else { n },
                den: d as i64,
            });
        }
        let mut bn = BigInt::from(n);
        if neg {
            bn = -bn;
        }
        Rational(Repr::Big(Box::new(BigRational::new_raw(bn, BigInt::from(d)))))
    }

    /// Takes ownership of an already reduced big fraction.
    pub fn from_big(r: BigRational) -> Self {
        // Ratio::new reduces; new_raw values may arrive unreduced from callers.
        let r = if r.denom().is_negative() || !r.denom().is_one() {
            BigRational::new(r.numer().clone(), r.denom().clone())
        } else {
            r
        };
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rational(Repr::Small { num: n, den: d });
        }
        Rational(Repr::Big(Box::new(r)))
    }

    /// Arithmetic results from `num-rational` are already in lowest terms.
    fn from_reduced(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rational(Repr::Small { num: n, den: d });
        }
        Rational(Repr::Big(Box::new(r)))
    }

    fn big(&self) -> Cow<'_, BigRational> {
        match &self.0 {
            Repr::Small { num, den } => Cow::Owned(BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))),
            Repr::Big(b) => Cow::Borrowed(b),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// True when the value is held in the inline `i64` form.
    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small { num, .. } => num.cmp(&0),
            Repr::Big(b) => {
                if b.is_negative() {
                    Ordering::Less
                } else if b.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Greatest integer not above `self`.
    pub fn floor(&self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => Rational::from_integer(num.div_euclid(*den)),
            Repr::Big(b) => Rational::from_big(BigRational::from_integer(b.numer().div_floor(b.denom()))),
        }
    }

    pub fn ceil(&self) -> Rational {
        -(-self).floor()
    }

    /// The rational with the smallest denominator strictly between `a` and
    /// `b`, breaking ties toward zero. Panics unless `a < b`.
    pub fn simplest_between(a: &Rational, b: &Rational) -> Rational {
        assert!(a < b, "empty interval");
        let one = Rational::one();
        let lo = &a.floor() + &one;
        let hi = &b.ceil() - &one;
        if lo <= hi {
            return if lo.is_positive() {
                lo
            } else if hi.is_negative() {
                hi
            } else {
                Rational::zero()
            };
        }
        // a and b share the unit interval (f, f + 1]; recurse on reciprocals
        let f = a.floor();
        let (a1, b1) = (a - &f, b - &f);
        let y = if a1.is_zero() {
            &b1.recip().floor() + &one
        } else {
            Rational::simplest_between(&b1.recip(), &a1.recip())
        };
        f + y.recip()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } => {
                assert!(*num != 0, "reciprocal of zero");
                Self::from_i128(*den as i128, *num as i128)
            }
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => b.to_f64().unwrap_or_else(|| {
                if b.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }

    /// Bit length of numerator plus denominator; a rough size measure.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small { num, den } => {
                (64 - num.unsigned_abs().leading_zeros() + 64 - den.leading_zeros()) as u64
            }
            Repr::Big(b) => b.numer().bits() + b.denom().bits(),
        }
    }

    pub fn min_of(a: Rational, b: Rational) -> Rational {
        if b < a {
            b
        } else {
            a
        }
    }

    pub fn max_of(a: Rational, b: Rational) -> Rational {
        if b > a {
            b
        } else {
            a
        }
    }

    fn add_ref(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if b == d {
                return Self::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let (Some(x), Some(y)) = ((a * d).checked_add(c * b), b.checked_mul(d)) {
                return Self::from_i128(x, y);
            }
        }
        Self::from_reduced(&*self.big() + &*rhs.big())
    }

    fn sub_ref(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if b == d {
                return Self::from_i128(*a as i128 - *c as i128, *b as i128);
            }
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let (Some(x), Some(y)) = ((a * d).checked_sub(c * b), b.checked_mul(d)) {
                return Self::from_i128(x, y);
            }
        }
        Self::from_reduced(&*self.big() - &*rhs.big())
    }

    fn mul_ref(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            return Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        if self.is_zero() || rhs.is_zero() {
            return Rational::zero();
        }
        Self::from_reduced(&*self.big() * &*rhs.big())
    }

    fn div_ref(&self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            return Self::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128);
        }
        Self::from_reduced(&*self.big() / &*rhs.big())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => {
                let (a, b) = (self.big(), other.big());
                let sign = |r: &BigRational| r.numer().sign();
                match sign(&a).cmp(&sign(&b)) {
                    Ordering::Equal if a.denom() == b.denom() => a.numer().cmp(b.numer()),
                    Ordering::Equal => (a.numer() * b.denom()).cmp(&(b.numer() * a.denom())),
                    unequal => unequal,
                }
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                self.$inner(rhs)
            }
        }
        impl<'b> $trait<&'b Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                (&self).$inner(rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$inner(&rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small { num, den } if *num != i64::MIN => Rational(Repr::Small { num: -num, den: *den }),
            _ => Rational::from_big(-self.to_big()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q` with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (t, None),
        };
        let valid = |x: &str, allow_sign: bool| {
            let digits = if allow_sign {
                x.strip_prefix(['-', '+']).unwrap_or(x)
            } else {
                x
            };
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid(n, true) || d.is_some_and(|d| !valid(d, false)) {
            return Err(err());
        }
        let num: BigInt = n.parse().map_err(|_| err())?;
        let den: BigInt = match d {
            Some(d) => d.parse().map_err(|_| err())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

/// A rational extended with both infinities.
///
/// Variant order gives the intended total order `-inf < finite < +inf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, ExtRational::PosInf)
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtRational::NegInf)
    }

    /// `c + g * self` for a strictly positive `g`.
    pub fn affine(&self, c: &Rational, g: &Rational) -> ExtRational {
        debug_assert!(g.is_positive(), "affine map needs a positive gain");
        match self {
            ExtRational::Finite(x) => ExtRational::Finite(c + g * x),
            other => other.clone(),
        }
    }

    /// `(self - c) / g` for a strictly positive `g`.
    pub fn affine_inverse(&self, c: &Rational, g: &Rational) -> ExtRational {
        debug_assert!(g.is_positive(), "affine map needs a positive gain");
        match self {
            ExtRational::Finite(x) => ExtRational::Finite((x - c) / g),
            other => other.clone(),
        }
    }

    /// [`Rational::simplest_between`] for extended endpoints.
    pub fn simplest_between(a: &ExtRational, b: &ExtRational) -> Rational {
        use ExtRational::{Finite, NegInf, PosInf};
        let zero = Rational::zero();
        match (a, b) {
            (Finite(a), Finite(b)) => Rational::simplest_between(a, b),
            (NegInf, Finite(b)) if b.is_positive() => zero,
            (NegInf, Finite(b)) => &b.ceil() - &Rational::one(),
            (Finite(a), PosInf) if a.is_negative() => zero,
            (Finite(a), PosInf) => &a.floor() + &Rational::one(),
            (NegInf, PosInf) => zero,
            _ => panic!("empty interval"),
        }
    }

    /// Sum of two extended values. `+inf + -inf` is a program error.
    pub fn add(&self, other: &ExtRational) -> ExtRational {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => panic!("undefined sum of opposite infinities"),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }

    pub fn neg(&self) -> ExtRational {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::PosInf => ExtRational::NegInf,
            ExtRational::Finite(r) => ExtRational::Finite(-r),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::NegInf => f64::NEG_INFINITY,
            ExtRational::PosInf => f64::INFINITY,
            ExtRational::Finite(r) => r.to_f64(),
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("inf"),
            ExtRational::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtRational::PosInf),
            "-inf" => Ok(ExtRational::NegInf),
            t => t.parse().map(ExtRational::Finite),
        }
    }
}

/// Shorthand used throughout tests and generators.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// A fraction that skips reduction, for long chains of `c + g * y` updates.
///
/// Reducing a big fraction costs a gcd, which dominates everything else once
/// values reach a few hundred bits. Hot loops carry values in this form and
/// reduce once at the end. Small operands keep the exact inline fast path.
#[derive(Clone, Debug)]
pub(crate) enum Fraction {
    Exact(Rational),
    /// `num / den` with `den > 0`, not necessarily in lowest terms.
    Raw(BigInt, BigInt),
}

impl Fraction {
    fn parts(&self) -> (Cow<'_, BigInt>, Cow<'_, BigInt>) {
        match self {
            Fraction::Exact(r) => match &r.0 {
                Repr::Small { num, den } => (Cow::Owned(BigInt::from(*num)), Cow::Owned(BigInt::from(*den))),
                Repr::Big(b) => (Cow::Borrowed(b.numer()), Cow::Borrowed(b.denom())),
            },
            Fraction::Raw(n, d) => (Cow::Borrowed(n), Cow::Borrowed(d)),
        }
    }

    /// `c + g * self`.
    pub(crate) fn affine(&self, c: &Rational, g: &Rational) -> Fraction {
        if let Fraction::Exact(y) = self {
            if y.is_small() && c.is_small() && g.is_small() {
                return Fraction::Exact(c + &(g * y));
            }
        }
        let (n, d) = self.parts();
        let (a, b) = (c.big(), g.big());
        let (a, b, e, f) = (a.numer(), a.denom(), b.numer(), b.denom());
        let num = a * f * &*d + e * b * &*n;
        Fraction::Raw(num, b * f * &*d)
    }

    /// `self * g`.
    pub(crate) fn scale(&self, g: &Rational) -> Fraction {
        if let Fraction::Exact(y) = self {
            if y.is_small() && g.is_small() {
                return Fraction::Exact(y * g);
            }
        }
        let (n, d) = self.parts();
        let g = g.big();
        Fraction::Raw(&*n * g.numer(), &*d * g.denom())
    }

    pub(crate) fn reduce(self) -> Rational {
        match self {
            Fraction::Exact(r) => r,
            Fraction::Raw(n, d) => Rational::from_big(BigRational::new(n, d)),
        }
    }
}

impl From<Rational> for Fraction {
    fn from(r: Rational) -> Self {
        Fraction::Exact(r)
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Fraction::Exact(a), Fraction::Exact(b)) = (self, other) {
            return a.cmp(b);
        }
        let ((a, b), (c, d)) = (self.parts(), other.parts());
        match a.sign().cmp(&c.sign()) {
            Ordering::Equal => (&*a * &*d).cmp(&(&*c * &*b)),
            unequal => unequal,
        }
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
