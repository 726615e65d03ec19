//! Scalar domains.
//!
//! All geometry and linear algebra in this crate is generic over [`Num`],
//! with two concrete domains: arbitrary-precision rationals (exact mode)
//! and `f64` (float mode). Rationals are kept in lowest terms with a
//! positive denominator by `num-rational` itself, so arithmetic never
//! rounds and never leaves canonical form.
//!
//! Float comparisons in geometric predicates must not use raw equality;
//! the hull and LP modules route every sign test through [`sign_tol`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Scalar domain for vectors, matrices, and LP data.
pub trait Num: Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True for domains whose arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Exact embedding of a finite double into the domain (every finite
    /// `f64` is a dyadic rational). `None` for non-finite inputs.
    fn from_f64(v: f64) -> Option<Self>;

    /// The value as an `i128` when it is an integer representable in one;
    /// `None` otherwise. Lets integer-only pipelines take machine-word
    /// shortcuts without changing results.
    fn to_i128(&self) -> Option<i128>;

    /// Exact embedding of an `i128`.
    fn from_i128(v: i128) -> Self {
        let hi = (v >> 64) as i64;
        let lo = v as u64;
        let b32 = Self::from_i64(1i64 << 32);
        let b64 = b32.mul(&b32);
        Self::from_i64(hi)
            .mul(&b64)
            .add(&Self::from_i64((lo >> 32) as i64).mul(&b32))
            .add(&Self::from_i64((lo & 0xFFFF_FFFF) as i64))
    }

    /// Total order for canonical sorting. Both domains used here are
    /// totally ordered on the values we produce (no NaNs).
    fn total_cmp(&self, rhs: &Self) -> Ordering;
}

impl Num for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Option<Self> {
        num_traits::FromPrimitive::from_f64(v)
    }
    fn to_i128(&self) -> Option<i128> {
        if self.is_integer() {
            ToPrimitive::to_i128(self.numer())
        } else {
            None
        }
    }
    fn total_cmp(&self, rhs: &Self) -> Ordering {
        self.cmp(rhs)
    }
}

impl Num for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_i128(&self) -> Option<i128> {
        // stay well inside the range where every integer is an exact f64
        (self.is_finite() && self.fract() == 0.0 && f64::abs(*self) <= 9.0e15)
            .then(|| *self as i128)
    }
    fn total_cmp(&self, rhs: &Self) -> Ordering {
        f64::total_cmp(self, rhs)
    }
}

/// Sign of `v` relative to a magnitude scale.
///
/// Exact domains report the true sign. Float domains treat `|v| <= eps *
/// max(1, |scale|)` as zero, the module-level tolerance policy shared by
/// the Graham-scan cross products and the LP separation threshold.
pub fn sign_tol<T: Num>(v: &T, eps: f64, scale: &T) -> i8 {
    if T::EXACT {
        let z = T::zero();
        return match v.total_cmp(&z) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
    }
    let vf = v.to_f64();
    let s = scale.to_f64().abs().max(1.0);
    if vf.abs() <= eps * s {
        0
    } else if vf > 0.0 {
        1
    } else {
        -1
    }
}

/// Tolerance-aware equality with the same policy as [`sign_tol`].
pub fn eq_tol<T: Num>(a: &T, b: &T, eps: f64) -> bool {
    if T::EXACT {
        return a == b;
    }
    let d = a.sub(b);
    sign_tol(&d, eps, &a.abs().add(&b.abs())) == 0
}

/// Parses a scalar from the instance-file syntax: either an integer /
/// decimal literal or an exact `"p/q"` fraction.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let neg = int.starts_with('-');
        let int: BigInt = int.parse().ok()?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = frac.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rational::new(num, den);
        let whole = Rational::from_integer(int);
        return Some(if neg { whole - frac_part } else { whole + frac_part });
    }
    let int: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(int))
}

/// Serializes an exact rational as `"p/q"` (or a bare integer string).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
