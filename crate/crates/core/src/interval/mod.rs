//! Closed real intervals with outward-rounded endpoints.
//!
//! Every arithmetic result contains all pointwise results of its operands.
//! Rounding direction is enforced per operation (see [`round`]), so no
//! floating-point environment state is involved and values may be shared
//! freely between threads.

pub mod decimal;
pub mod round;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("lower endpoint {0} exceeds upper endpoint {1}")]
    Inverted(f64, f64),
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("invalid decimal literal {0:?}")]
    BadDecimal(String),
    #[error("square root of an interval with negative part")]
    NegativeSqrt,
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NonFinite(f64::NAN));
        }
        if lo > hi {
            return Err(IntervalError::Inverted(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[x, x]`, rejecting non-finite input.
    pub fn try_point(x: f64) -> Result<Self, IntervalError> {
        if !x.is_finite() {
            return Err(IntervalError::NonFinite(x));
        }
        Ok(Interval { lo: x, hi: x })
    }

    /// Degenerate interval `[x, x]`. The caller guarantees `x` is finite.
    #[inline]
    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Interval `[-r, r]`.
    #[inline]
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Interval { lo: -r, hi: r }
    }

    /// `[0, r]` for a nonnegative upper bound `r`.
    #[inline]
    pub fn upto(r: f64) -> Self {
        Interval { lo: 0.0, hi: r.max(0.0) }
    }

    /// `[m - r, m + r]` rounded outward.
    pub fn mid_rad(m: f64, r: f64) -> Self {
        let r = r.abs();
        Interval {
            lo: round::sub_down(m, r),
            hi: round::add_up(m, r),
        }
    }

    /// Tightest enclosure of a decimal literal such as `"2.194489888429804"`.
    pub fn from_decimal(s: &str) -> Result<Self, IntervalError> {
        decimal::enclose(s)
            .map(|(lo, hi)| Interval { lo, hi })
            .ok_or_else(|| IntervalError::BadDecimal(s.to_string()))
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Midpoint, rounded to nearest, guaranteed to lie inside the interval.
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            if self.lo.is_finite() {
                return self.lo;
            }
            if self.hi.is_finite() {
                return self.hi;
            }
            return 0.0;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on the distance from [`mid`](Self::mid) to either endpoint.
    pub fn rad(self) -> f64 {
        let m = self.mid();
        round::sub_up(m, self.lo).max(round::sub_up(self.hi, m))
    }

    pub fn width(self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    /// Upper bound on `|x|` over the interval.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound on `|x|` over the interval.
    #[inline]
    pub fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    #[inline]
    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersection(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Strictly positive everywhere.
    #[inline]
    pub fn is_pos(self) -> bool {
        self.lo > 0.0
    }

    /// Strictly negative everywhere.
    #[inline]
    pub fn is_neg(self) -> bool {
        self.hi < 0.0
    }

    /// Every element is below every element of `other`.
    #[inline]
    pub fn certainly_lt(self, other: Interval) -> bool {
        self.hi < other.lo
    }

    /// `{|x|}` as an interval `[mig, mag]`.
    pub fn abs(self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval {
            lo: round::mul_down(a.lo, a.lo),
            hi: round::mul_up(a.hi, a.hi),
        }
    }

    pub fn sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeSqrt);
        }
        Ok(Interval {
            lo: round::sqrt_down(self.lo),
            hi: round::sqrt_up(self.hi),
        })
    }

    /// `exp` widened by two ulps on each side of the library result.
    pub fn exp(self) -> Interval {
        let lo = self.lo.exp().next_down().next_down().max(0.0);
        let hi = self.hi.exp();
        let hi = if hi.is_finite() { hi.next_up().next_up() } else { hi };
        Interval { lo, hi }
    }

    /// Integer power with the even-power case handled tightly.
    pub fn powi(self, n: i32) -> Interval {
        if n == 0 {
            return Interval::ONE;
        }
        if n < 0 {
            return Interval::ONE / self.powi(-n);
        }
        let n = n as u32;
        if n.is_multiple_of(2) {
            let a = self.abs();
            Interval {
                lo: pow_down_nonneg(a.lo, n),
                hi: pow_up_nonneg(a.hi, n),
            }
        } else {
            // Odd powers are monotone increasing.
            let lo = if self.lo >= 0.0 {
                pow_down_nonneg(self.lo, n)
            } else {
                -pow_up_nonneg(-self.lo, n)
            };
            let hi = if self.hi >= 0.0 {
                pow_up_nonneg(self.hi, n)
            } else {
                -pow_down_nonneg(-self.hi, n)
            };
            Interval { lo, hi }
        }
    }

    pub fn recip(self) -> Interval {
        Interval::ONE / self
    }

    /// Division that reports a zero-containing divisor instead of widening.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    /// Inflates both endpoints outward by `r`.
    pub fn inflate(self, r: f64) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, r.abs()),
            hi: round::add_up(self.hi, r.abs()),
        }
    }

    /// Each endpoint moved `n` ulps outward.
    pub fn widen_ulps(self, n: u32) -> Interval {
        let (mut lo, mut hi) = (self.lo, self.hi);
        for _ in 0..n {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Interval { lo, hi }
    }
}

fn pow_down_nonneg(x: f64, n: u32) -> f64 {
    let (mut acc, mut base, mut e) = (1.0, x, n);
    while e > 0 {
        if e & 1 == 1 {
            acc = round::mul_down(acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = round::mul_down(base, base);
        }
    }
    acc.max(0.0)
}

fn pow_up_nonneg(x: f64, n: u32) -> f64 {
    let (mut acc, mut base, mut e) = (1.0, x, n);
    while e > 0 {
        if e & 1 == 1 {
            acc = round::mul_up(acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = round::mul_up(base, base);
        }
    }
    acc
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{:e}, {:e}]", self.lo, self.hi)
        }
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_down(self.lo, rhs.lo),
            hi: round::add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, rhs.hi),
            hi: round::sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        if a >= 0.0 && c >= 0.0 {
            return Interval {
                lo: round::mul_down(a, c),
                hi: round::mul_up(b, d),
            };
        }
        if self.is_point() && rhs.is_point() {
            return Interval {
                lo: round::mul_down(a, c),
                hi: round::mul_up(a, c),
            };
        }
        let lo = round::mul_down(a, c)
            .min(round::mul_down(a, d))
            .min(round::mul_down(b, c))
            .min(round::mul_down(b, d));
        let hi = round::mul_up(a, c)
            .max(round::mul_up(a, d))
            .max(round::mul_up(b, c))
            .max(round::mul_up(b, d));
        if lo.is_nan() || hi.is_nan() {
            return Interval::ENTIRE;
        }
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    /// A divisor containing zero yields [`Interval::ENTIRE`]; use
    /// [`Interval::checked_div`] to get an error instead.
    fn div(self, rhs: Interval) -> Interval {
        if rhs.contains_zero() {
            return Interval::ENTIRE;
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = round::div_down(a, c)
            .min(round::div_down(a, d))
            .min(round::div_down(b, c))
            .min(round::div_down(b, d));
        let hi = round::div_up(a, c)
            .max(round::div_up(a, d))
            .max(round::div_up(b, c))
            .max(round::div_up(b, d));
        if lo.is_nan() || hi.is_nan() {
            return Interval::ENTIRE;
        }
        Interval { lo, hi }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            #[inline]
            fn $f(self, rhs: f64) -> Interval {
                $tr::$f(self, Interval::point(rhs))
            }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            #[inline]
            fn $f(self, rhs: Interval) -> Interval {
                $tr::$f(Interval::point(self), rhs)
            }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl MulAssign for Interval {
    #[inline]
    fn mul_assign(&mut self, rhs: Interval) {
        *self = *self * rhs;
    }
}

impl Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Interval> for Interval {
    fn sum<I: Iterator<Item = &'a Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + *b)
    }
}

/// Upper bound on the largest entry, as a degenerate-safe `[0, max]` interval.
pub fn max_mag<I: IntoIterator<Item = Interval>>(items: I) -> Interval {
    Interval::upto(items.into_iter().map(Interval::mag).fold(0.0, f64::max))
}

#[derive(Serialize, Deserialize)]
struct Endpoints {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Endpoints {
            lo: decimal::exact_string(self.lo),
            hi: decimal::exact_string(self.hi),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let e = Endpoints::deserialize(d)?;
        let lo = Interval::from_decimal(&e.lo).map_err(D::Error::custom)?.lo;
        let hi = Interval::from_decimal(&e.hi).map_err(D::Error::custom)?.hi;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}
