//! Quadratic irrationals `(p + q·√D)/r` over ℚ.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::elem::{ratio_f64, sign_p_plus_q_sqrt, RElem};
use super::factorize::squarefree_decompose;
use super::relquad::RelQuad;
use crate::error::{Error, Result};

/// `(p + q·√D)/r` in canonical form: `r > 0`, `q ≠ 0`, `gcd(p, q, r) = 1`, `D` squarefree
/// and not 0 or 1. For `D < 0` the value is complex with `√D = i·√|D|`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: BigInt,
}

impl QuadIrr {
    pub fn new(p: BigInt, q: BigInt, r: BigInt, d: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d.is_zero() {
            return Err(Error::Parse("radicand 0".into()));
        }
        let (f, m) = squarefree_decompose(&d);
        let q = q * f;
        if q.is_zero() || m.is_one() {
            return Err(Error::Parse("value is rational".into()));
        }
        let (mut p, mut q, mut r) = (p, q, r);
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        Ok(QuadIrr { p: p / &g, q: q / &g, r: r / &g, d: m })
    }

    pub fn from_i64(p: i64, q: i64, r: i64, d: i64) -> Result<Self> {
        Self::new(p.into(), q.into(), r.into(), d.into())
    }

    /// `√n` for a non-square integer `n`.
    pub fn sqrt(n: i64) -> Result<Self> {
        Self::from_i64(0, 1, 1, n)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_real(&self) -> bool {
        self.d.is_positive()
    }

    pub fn conj(&self) -> Self {
        QuadIrr { p: self.p.clone(), q: -&self.q, r: self.r.clone(), d: self.d.clone() }
    }

    /// `x·conj(x) = (p² − q²D)/r²`.
    pub fn norm(&self) -> BigRational {
        BigRational::new(&self.p * &self.p - &self.q * &self.q * &self.d, &self.r * &self.r)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(BigInt::from(2) * &self.p, self.r.clone())
    }

    /// Minimal polynomial `x² − trace·x + norm` scaled to a primitive integer triple.
    pub fn min_poly(&self) -> (BigInt, BigInt, BigInt) {
        let t = self.trace();
        let n = self.norm();
        let l = t.denom().lcm(n.denom());
        let a = l.clone();
        let b = -(t.numer() * (&l / t.denom()));
        let c = n.numer() * (&l / n.denom());
        let g = a.gcd(&b).gcd(&c);
        (a / &g, b / &g, c / &g)
    }

    pub fn to_relquad(&self) -> RelQuad {
        let r = BigRational::from_integer(self.r.clone());
        let u = RElem::from_ratio(&(BigRational::from_integer(self.p.clone()) / &r));
        let v = RElem::from_ratio(&(BigRational::from_integer(self.q.clone()) / &r));
        RelQuad::new(u, v, RElem::from_bigint(self.d.clone()))
    }

    /// Inverse of [`QuadIrr::to_relquad`] for values with rational coordinates.
    pub fn from_relquad(z: &RelQuad) -> Result<Self> {
        let (Some(u), Some(v), Some(dl)) = (z.u().as_rational(), z.v().as_rational(), z.delta().as_rational())
        else {
            return Err(Error::Unsupported(format!("{z} is not quadratic over Q")));
        };
        if !dl.is_integer() {
            return Err(Error::Invariant("non-canonical radicand".into()));
        }
        let r = u.denom().lcm(v.denom());
        let p = u.numer() * (&r / u.denom());
        let q = v.numer() * (&r / v.denom());
        Self::new(p, q, r, dl.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        assert!(self.is_real());
        let s = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        ratio_f64(&self.p, &self.r) + ratio_f64(&self.q, &self.r) * s
    }

    pub fn to_c64(&self) -> (f64, f64) {
        let s = self.d.abs().to_f64().unwrap_or(f64::NAN).sqrt();
        let (u, v) = (ratio_f64(&self.p, &self.r), ratio_f64(&self.q, &self.r) * s);
        if self.is_real() {
            (u + v, 0.0)
        } else {
            (u, v)
        }
    }

    /// Sign of `self − c` for a rational `c` (real values only).
    pub fn cmp_rational(&self, c: &BigRational) -> Ordering {
        assert!(self.is_real());
        // p + q√D − c·r  over the positive r, scaled by denom(c)
        let pp = &self.p * c.denom() - c.numer() * &self.r;
        let qq = &self.q * c.denom();
        sign_p_plus_q_sqrt(&pp, &qq, &self.d)
    }

    /// The nearest integer `c` with `x − c ∈ (−1/2, 1/2]` (real values only).
    pub fn nearest(&self) -> BigInt {
        assert!(self.is_real(), "nearest integer of a complex value");
        // float screen: accept when the value is far from a half-integer
        let s = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        let (u, v) = (ratio_f64(&self.p, &self.r), ratio_f64(&self.q, &self.r) * s);
        let x = u + v;
        // absolute error stays far below 1e-9 while |u| + |v| < 1e6
        if u.abs() + v.abs() < 1e6 {
            let c = (x - 0.5).ceil();
            let frac = x - c;
            if frac > -0.5 + 1e-9 && frac < 0.5 - 1e-9 {
                return BigInt::from(c as i64);
            }
        }
        // c = ⌊x + 1/2⌋ = ⌊(2p + r + 2q√D)/(2r)⌋; x + 1/2 is irrational so no tie is possible
        floor_quadratic(&(BigInt::from(2) * &self.p + &self.r), &(BigInt::from(2) * &self.q), &self.d, &(BigInt::from(2) * &self.r))
    }

    /// `1/(x − c)` for an integer `c`.
    pub fn sub_int_inv(&self, c: &BigInt) -> Self {
        // x − c = (p' + q√D)/r with p' = p − c·r; inverse = r(p' − q√D)/(p'² − q²D)
        let pp = &self.p - c * &self.r;
        let den = &pp * &pp - &self.q * &self.q * &self.d;
        Self::new(&self.r * &pp, -(&self.r * &self.q), den, self.d.clone()).expect("quadratic irrational stays irrational")
    }
}

/// `⌊(a + b√d)/c⌋` for `c > 0`, `d > 0` non-square.
pub(crate) fn floor_quadratic(a: &BigInt, b: &BigInt, d: &BigInt, c: &BigInt) -> BigInt {
    let bd = b * b * d;
    let s = bd.sqrt();
    // ⌊b√d⌋, using that b√d is irrational when b ≠ 0
    let fl = if b.is_zero() {
        BigInt::zero()
    } else if b.is_positive() {
        s
    } else {
        -s - 1
    };
    (a + fl).div_floor(c)
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_relquad())
    }
}

impl fmt::Debug for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
