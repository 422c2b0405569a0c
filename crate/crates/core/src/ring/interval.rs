//! Fixed-point interval arithmetic on scaled big integers.
//!
//! An [`Interval`] at precision `p` is the closed real interval `[lo/2^p, hi/2^p]`.
//! Every operation rounds outward, so the true value is always enclosed.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

fn isqrt_floor(n: &BigInt) -> BigInt {
    if n.is_negative() {
        BigInt::zero()
    } else {
        n.sqrt()
    }
}

fn isqrt_ceil(n: &BigInt) -> BigInt {
    if !n.is_positive() {
        return BigInt::zero();
    }
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

impl Interval {
    pub fn exact_int(n: &BigInt, prec: u32) -> Self {
        let v = n << prec;
        Interval { lo: v.clone(), hi: v, prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let n = q.numer() << prec;
        Interval { lo: floor_div(&n, q.denom()), hi: ceil_div(&n, q.denom()), prec }
    }

    /// Enclosure of `√q` for `q ≥ 0`.
    pub fn sqrt_rational(q: &BigRational, prec: u32) -> Self {
        let n = q.numer() << (2 * prec);
        let lo = isqrt_floor(&floor_div(&n, q.denom()));
        let hi = isqrt_ceil(&ceil_div(&n, q.denom()));
        Interval { lo, hi, prec }
    }

    /// Enclosure of `√x` over the nonnegative part of `self`.
    pub fn sqrt(&self) -> Self {
        let lo = isqrt_floor(&(&self.lo << self.prec));
        let hi = isqrt_ceil(&(&self.hi << self.prec));
        Interval { lo, hi, prec: self.prec }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.prec, o.prec);
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let s = BigInt::from(1) << self.prec;
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mn = c.iter().min().unwrap();
        let mx = c.iter().max().unwrap();
        Interval { lo: floor_div(mn, &s), hi: ceil_div(mx, &s), prec: self.prec }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        let (a, b) = (&self.lo * q.numer(), &self.hi * q.numer());
        let (mn, mx) = if a <= b { (a, b) } else { (b, a) };
        Interval { lo: floor_div(&mn, q.denom()), hi: ceil_div(&mx, q.denom()), prec: self.prec }
    }

    pub fn half(&self) -> Self {
        let two = BigInt::from(2);
        Interval { lo: floor_div(&self.lo, &two), hi: ceil_div(&self.hi, &two), prec: self.prec }
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let n = q.numer() << self.prec;
        let lo = &self.lo * q.denom();
        let hi = &self.hi * q.denom();
        lo <= n && n <= hi
    }

    /// Upper bound as a rational.
    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::from(1) << self.prec)
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::from(1) << self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        let s = BigRational::new((&self.lo + &self.hi) / 2, BigInt::from(1) << self.prec);
        num_traits::ToPrimitive::to_f64(&s).unwrap_or(f64::NAN)
    }
}

/// Decimal rendering of a rational with `digits` fractional digits (truncated toward zero).
pub fn rational_to_decimal(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let q = q.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q.numer() * &scale) / q.denom();
    let s = scaled.to_string();
    let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
    let (ip, fp) = s.split_at(s.len() - digits);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg && body != "0" {
        format!("-{body}")
    } else {
        body
    }
}
