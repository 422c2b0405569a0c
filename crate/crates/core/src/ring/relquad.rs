//! Values `u + v·√δ` in a relative quadratic extension `K(√δ)` of a base field `K`
//! (ℚ or a quadratic field), and exact sign decisions for their real and imaginary parts.
//!
//! `√δ` always denotes the principal square root (real part ≥ 0, imaginary part ≥ 0 on
//! the negative real axis).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::elem::{Basis, RElem, SignCmp};
use super::factorize::squarefree_decompose;
use super::interval::Interval;
use crate::error::{Error, Result};

/// `u + v·√δ` with `u, v, δ` in the base field. When `v = 0` the value lies in `K` and
/// `δ` is stored as 0 so that equal values compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RelQuad {
    u: RElem,
    v: RElem,
    delta: RElem,
}

/// A [`RelQuad`] known to lie outside the base field (`v ≠ 0`).
pub type RelQuadIrr = RelQuad;

impl RelQuad {
    pub fn new(u: RElem, v: RElem, delta: RElem) -> Self {
        let mut z = RelQuad { u, v, delta };
        z.normalize();
        z
    }

    pub fn from_base(u: RElem) -> Self {
        RelQuad { u, v: RElem::zero(), delta: RElem::zero() }
    }

    /// `√δ`.
    pub fn sqrt_of(delta: RElem) -> Self {
        Self::new(RElem::zero(), RElem::one(), delta)
    }

    fn normalize(&mut self) {
        if self.v.is_zero() {
            self.delta = RElem::zero();
            return;
        }
        if self.delta.is_zero() {
            self.v = RElem::zero();
            return;
        }
        if let Some(q) = self.delta.as_rational() {
            // δ = n/m ⇒ √δ = √(n·m)/m = f·√s/m
            let nm = q.numer() * q.denom();
            let (f, s) = squarefree_decompose(&nm);
            let scale = RElem::from_ratio(&BigRational::new(f, q.denom().clone()));
            self.v = &self.v * &scale;
            self.delta = RElem::from_bigint(s.clone());
            if s.is_one() {
                self.u = &self.u + &self.v;
                self.v = RElem::zero();
                self.delta = RElem::zero();
                return;
            }
            // √s inside the base field ℚ(√d): s = d.
            let basis = self.u.basis();
            let basis = if basis == Basis::Rational { self.v.basis() } else { basis };
            if let Some(d) = basis.d() {
                if BigInt::from(d) == s {
                    let w = RElem::omega(basis);
                    let sqrt_d = match basis {
                        Basis::HalfSqrt(_) => &(&w + &w) - &RElem::one(),
                        _ => w,
                    };
                    self.u = &self.u + &(&self.v * &sqrt_d);
                    self.v = RElem::zero();
                    self.delta = RElem::zero();
                }
            }
        } else if let Some(r) = sqrt_in_field(&self.delta) {
            self.u = &self.u + &(&self.v * &r);
            self.v = RElem::zero();
            self.delta = RElem::zero();
        }
    }

    pub fn u(&self) -> &RElem {
        &self.u
    }

    pub fn v(&self) -> &RElem {
        &self.v
    }

    pub fn delta(&self) -> &RElem {
        &self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn in_base(&self) -> Option<&RElem> {
        self.v.is_zero().then_some(&self.u)
    }

    fn common_delta(&self, o: &Self) -> RElem {
        if self.v.is_zero() {
            o.delta.clone()
        } else if o.v.is_zero() || self.delta == o.delta {
            self.delta.clone()
        } else {
            panic!("mixing radicands {} and {}", self.delta, o.delta)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.u + &o.u, &self.v + &o.v, self.common_delta(o))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.u - &o.u, &self.v - &o.v, self.common_delta(o))
    }

    pub fn neg(&self) -> Self {
        RelQuad { u: -&self.u, v: -&self.v, delta: self.delta.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let delta = self.common_delta(o);
        let u = &(&self.u * &o.u) + &(&(&self.v * &o.v) * &delta);
        let v = &(&self.u * &o.v) + &(&self.v * &o.u);
        Self::new(u, v, delta)
    }

    pub fn add_base(&self, x: &RElem) -> Self {
        RelQuad { u: &self.u + x, v: self.v.clone(), delta: self.delta.clone() }
    }

    pub fn sub_base(&self, x: &RElem) -> Self {
        RelQuad { u: &self.u - x, v: self.v.clone(), delta: self.delta.clone() }
    }

    pub fn scale(&self, x: &RElem) -> Self {
        Self::new(&self.u * x, &self.v * x, self.delta.clone())
    }

    /// Conjugate over the base field: `u − v√δ`.
    pub fn rel_conj(&self) -> Self {
        RelQuad { u: self.u.clone(), v: -&self.v, delta: self.delta.clone() }
    }

    /// Relative norm `u² − v²δ`.
    pub fn rel_norm(&self) -> RElem {
        &(&self.u * &self.u) - &(&(&self.v * &self.v) * &self.delta)
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.rel_norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ni = n.inv()?;
        Ok(self.rel_conj().scale(&ni))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Möbius action `(m11·z + m12)/(m21·z + m22)`.
    pub fn mobius(&self, m: [&RElem; 4]) -> Result<Self> {
        let num = self.scale(m[0]).add_base(m[1]);
        let den = self.scale(m[2]).add_base(m[3]);
        num.div(&den)
    }

    pub fn to_c64(&self) -> (f64, f64) {
        let (ur, ui) = self.u.to_c64();
        let (vr, vi) = self.v.to_c64();
        if self.v.is_zero() {
            return (ur, ui);
        }
        let (dr, di) = self.delta.to_c64();
        let (sr, si) = csqrt(dr, di);
        (ur + vr * sr - vi * si, ui + vr * si + vi * sr)
    }
}

/// The principal square root of `x` when it lies in the field of `x`.
pub fn sqrt_in_field(x: &RElem) -> Option<RElem> {
    if let Some(q) = x.as_rational() {
        return crate::ring::rational_sqrt(&q).map(|r| RElem::from_ratio(&r));
    }
    let b = x.basis();
    let d = BigRational::from_integer(b.d()?.into());
    // x = a + c√d; (s + t√d)² = x  ⇔  s² = (a ± √N)/2, t = c/(2s), N = a² − d·c²
    let (t0, _) = b.relation();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let c = x.v() * if t0 == 1 { half.clone() } else { BigRational::one() };
    let a = x.u() + if t0 == 1 { c.clone() } else { BigRational::zero() };
    let n = crate::ring::rational_sqrt(&(&a * &a - &d * &c * &c))?;
    for s2 in [(&a + &n) * &half, (&a - &n) * &half] {
        let Some(s) = crate::ring::rational_sqrt(&s2) else { continue };
        if s.is_zero() {
            continue;
        }
        let t = &c / (&s + &s);
        // s + t√d in the basis {1, ω}
        let (u, v) = if t0 == 1 { (&s - &t, &t + &t) } else { (s.clone(), t.clone()) };
        let r = RElem::from_coords(&u, &v, b);
        if &r * &r != *x {
            continue;
        }
        let principal = if b.is_imaginary() {
            let (re, im) = r.imag_coords();
            re.is_positive() || (re.is_zero() && im.is_positive())
        } else {
            r.real_sign() == Ordering::Greater
        };
        return Some(if principal { r } else { -r });
    }
    None
}

pub(crate) fn csqrt(re: f64, im: f64) -> (f64, f64) {
    let m = re.hypot(im);
    let s = ((m + re) / 2.0).max(0.0).sqrt();
    let t = ((m - re) / 2.0).max(0.0).sqrt();
    let t = if im < 0.0 { -t } else { t };
    (s, t)
}

impl fmt::Display for RelQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", self.u);
        }
        // (p + q·sqrt(D))/r when everything is rational
        if let (Some(u), Some(v), Some(d)) = (self.u.as_rational(), self.v.as_rational(), self.delta.as_rational()) {
            let r = num_integer::Integer::lcm(u.denom(), v.denom());
            let p = u.numer() * (&r / u.denom());
            let q = v.numer() * (&r / v.denom());
            let rad = format!("sqrt({})", d.numer());
            let qterm = if q.is_one() {
                rad
            } else if (-&q).is_one() {
                format!("-{rad}")
            } else {
                format!("{q}*{rad}")
            };
            let body = if p.is_zero() {
                qterm
            } else if qterm.starts_with('-') {
                format!("{p}{qterm}")
            } else {
                format!("{p}+{qterm}")
            };
            return if r.is_one() { write!(f, "{body}") } else { write!(f, "({body})/{r}") };
        }
        let paren = |x: &RElem| {
            let s = x.to_string();
            if s.contains(['+', '*']) || s[1..].contains('-') {
                format!("({s})")
            } else {
                s
            }
        };
        let rad = format!("sqrt({})", paren(&self.delta));
        if self.u.is_zero() {
            write!(f, "{}*{rad}", paren(&self.v))
        } else {
            write!(f, "{}+{}*{rad}", paren(&self.u), paren(&self.v))
        }
    }
}

impl fmt::Debug for RelQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Real linear form `a0 + a1·s + a2·T` in the atoms `s = Re √δ`, `T = √|d|·Im √δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub a0: BigRational,
    pub a1: BigRational,
    pub a2: BigRational,
}

impl LinearForm {
    pub fn constant(a0: BigRational) -> Self {
        LinearForm { a0, a1: BigRational::zero(), a2: BigRational::zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        LinearForm { a0: &self.a0 + &o.a0, a1: &self.a1 + &o.a1, a2: &self.a2 + &o.a2 }
    }

    pub fn neg(&self) -> Self {
        LinearForm { a0: -&self.a0, a1: -&self.a1, a2: -&self.a2 }
    }
}

/// Exact sign oracle for linear forms over a fixed radicand `δ = X + i·√|d|·Y` in ℚ or an
/// imaginary quadratic field of discriminant-part `d`.
#[derive(Clone, Debug)]
pub struct Radical {
    x: BigRational,
    y: BigRational,
    absd: BigInt,
    s_f: f64,
    t_f: f64,
}

impl Radical {
    /// `absd` is |d| for an imaginary base field and 1 for ℚ.
    pub fn new(delta: &RElem, absd: &BigInt) -> Self {
        assert!(!delta.basis().is_real_quadratic(), "sign oracle needs ℚ or an imaginary field");
        let (x, y) = delta.imag_coords();
        let (dr, di) = delta.to_c64();
        let (s, t) = csqrt(dr, di);
        let g = absd.to_f64().unwrap_or(f64::NAN).sqrt();
        Radical { x, y, absd: absd.clone(), s_f: s, t_f: t * g }
    }

    pub fn absd(&self) -> &BigInt {
        &self.absd
    }

    /// `Re z` for `z = u + v√δ` over this radical.
    pub fn re_form(&self, z: &RelQuad) -> LinearForm {
        let (xu, _) = z.u.imag_coords();
        let (xv, yv) = z.v.imag_coords();
        LinearForm { a0: xu, a1: xv, a2: -yv }
    }

    /// `Im z / √|d|`.
    pub fn im_form(&self, z: &RelQuad) -> LinearForm {
        let (_, yu) = z.u.imag_coords();
        let (xv, yv) = z.v.imag_coords();
        let d = BigRational::from_integer(self.absd.clone());
        LinearForm { a0: yu, a1: yv, a2: xv / d }
    }

    fn atoms(&self, prec: u32) -> (Interval, Interval) {
        let d = BigRational::from_integer(self.absd.clone());
        let n = &self.x * &self.x + &d * &self.y * &self.y;
        let modulus = Interval::sqrt_rational(&n, prec);
        let xi = Interval::from_rational(&self.x, prec);
        let s = modulus.add(&xi).half().sqrt();
        let t = modulus.sub(&xi).mul_rational(&d).half().sqrt();
        let negative = self.y.is_negative();
        (s, if negative { t.neg() } else { t })
    }

    pub fn enclose(&self, f: &LinearForm, prec: u32) -> Interval {
        let (s, t) = self.atoms(prec);
        Interval::from_rational(&f.a0, prec).add(&s.mul_rational(&f.a1)).add(&t.mul_rational(&f.a2))
    }

    fn screen(&self, f: &LinearForm) -> Option<Ordering> {
        let a0 = f.a0.to_f64()?;
        let a1 = f.a1.to_f64()?;
        let a2 = f.a2.to_f64()?;
        let val = a0 + a1 * self.s_f + a2 * self.t_f;
        let mag = a0.abs() + (a1 * self.s_f).abs() + (a2 * self.t_f).abs();
        if !val.is_finite() || !mag.is_finite() {
            return None;
        }
        (val.abs() > 1e-9 * mag).then(|| val.partial_cmp(&0.0).unwrap())
    }

    /// Whether `f` could vanish; `false` certifies `f ≠ 0`. When `true` is returned, `f`
    /// is either 0 or `2·a0`.
    fn may_vanish(&self, f: &LinearForm) -> bool {
        let d = BigRational::from_integer(self.absd.clone());
        let two = BigRational::from_integer(2.into());
        let c1 = (&f.a1 * &f.a1 + &f.a2 * &f.a2 * &d) / &two;
        let c2 = (&f.a1 * &f.a1 - &f.a2 * &f.a2 * &d) * &self.x / &two + &f.a1 * &f.a2 * &d * &self.y;
        let rho = (&f.a0 * &f.a0 - c2) / c1;
        if rho.is_negative() {
            return false;
        }
        &rho * &rho == &self.x * &self.x + &d * &self.y * &self.y
    }

    /// Exact sign of `a0 + a1·s + a2·T`.
    pub fn sign(&self, f: &LinearForm) -> Ordering {
        if f.a1.is_zero() && f.a2.is_zero() {
            return f.a0.sign_cmp();
        }
        if let Some(s) = self.screen(f) {
            return s;
        }
        let maybe_zero = self.may_vanish(f);
        if maybe_zero && f.a0.is_zero() {
            return Ordering::Equal;
        }
        let twice = &f.a0 + &f.a0;
        let mut prec = 96;
        loop {
            let iv = self.enclose(f, prec);
            if let Some(s) = iv.sign() {
                if s != Ordering::Equal {
                    return s;
                }
            }
            if maybe_zero && !iv.contains_rational(&twice) {
                return Ordering::Equal;
            }
            prec *= 2;
            assert!(prec < 1 << 20, "sign refinement did not terminate");
        }
    }
}

impl serde::Serialize for RelQuad {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn gi(a: i64, b: i64) -> RElem {
        RElem::from_coords(&q(a, 1), &q(b, 1), Basis::Sqrt(-1))
    }

    #[test]
    fn square_roots_inside_the_field() {
        assert_eq!(sqrt_in_field(&gi(0, 2)), Some(gi(1, 1)));
        assert_eq!(sqrt_in_field(&gi(3, -4)), Some(gi(2, -1)));
        assert_eq!(sqrt_in_field(&gi(0, -2)), Some(gi(1, -1)));
        assert_eq!(sqrt_in_field(&gi(1, 1)), None);
        let b = Basis::Sqrt(2);
        let x = RElem::from_coords(&q(3, 1), &q(2, 1), b);
        assert_eq!(sqrt_in_field(&x), Some(RElem::from_coords(&q(1, 1), &q(1, 1), b)));
        let z = RelQuad::sqrt_of(gi(-3, 4));
        assert_eq!(z, RelQuad::from_base(gi(1, 2)));
    }

    #[test]
    fn radicand_normalization() {
        let z = RelQuad::sqrt_of(RElem::from_int(8));
        assert_eq!(z, RelQuad::new(RElem::zero(), RElem::from_int(2), RElem::from_int(2)));
        let four = RelQuad::sqrt_of(RElem::from_int(4));
        assert_eq!(four, RelQuad::from_base(RElem::from_int(2)));
    }

    #[test]
    fn relative_norm_of_sqrt2_plus_sqrt3() {
        let b = Basis::Sqrt(2);
        let s2 = RElem::omega(b);
        let z = RelQuad::new(s2, RElem::one(), RElem::from_int(3));
        assert_eq!(z.rel_norm(), RElem::from_int(-1));
        assert_eq!(z.mul(&z.rel_conj()), RelQuad::from_base(RElem::from_int(-1)));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = RelQuad::new(gi(1, 2), gi(-1, 1), gi(0, 3));
        let w = z.mul(&z.inv().unwrap());
        assert_eq!(w, RelQuad::from_base(RElem::one()));
    }

    #[test]
    fn exact_zero_on_boundary() {
        // over ℚ(i), δ = -3: √δ = i√3 so s = 0, T = √3. Re(1/2 + 0·√δ) - 1/2 = 0.
        let rad = Radical::new(&RElem::from_int(-3), &BigInt::from(1));
        let f = LinearForm { a0: q(-1, 2), a1: q(0, 1), a2: q(0, 1) };
        assert_eq!(rad.sign(&f), Ordering::Less);
        // s - 0 where s = Re √(-3) = 0 exactly
        let f = LinearForm { a0: q(0, 1), a1: q(1, 1), a2: q(0, 1) };
        assert_eq!(rad.sign(&f), Ordering::Equal);
        // T - √3 has no rational form; T - 7/4 > 0
        let f = LinearForm { a0: q(-7, 4), a1: q(0, 1), a2: q(1, 1) };
        assert_eq!(rad.sign(&f), Ordering::Less);
    }

    #[test]
    fn zero_detected_through_nested_radical() {
        // δ = 2i over ℚ(i): √δ = 1 + i, so s = 1, T = 1 and s - T = 0, s - 1 = 0.
        let rad = Radical::new(&gi(0, 2), &BigInt::from(1));
        let f = LinearForm { a0: q(0, 1), a1: q(1, 1), a2: q(-1, 1) };
        assert_eq!(rad.sign(&f), Ordering::Equal);
        let f = LinearForm { a0: q(-1, 1), a1: q(1, 1), a2: q(0, 1) };
        assert_eq!(rad.sign(&f), Ordering::Equal);
        let f = LinearForm { a0: q(1, 1), a1: q(-1, 1), a2: q(0, 1) };
        assert_eq!(rad.sign(&f), Ordering::Equal);
        let f = LinearForm { a0: q(-1, 1), a1: q(1, 1), a2: q(1, 1000000) };
        assert_eq!(rad.sign(&f), Ordering::Greater);
    }

    #[test]
    fn forms_match_floating_values() {
        let z = RelQuad::new(gi(1, -2), gi(3, 1), gi(2, 5));
        let rad = Radical::new(z.delta(), &BigInt::from(1));
        let (re, im) = z.to_c64();
        let fre = rad.enclose(&rad.re_form(&z), 64).mid_f64();
        let fim = rad.enclose(&rad.im_form(&z), 64).mid_f64();
        assert!((re - fre).abs() < 1e-9, "{re} {fre}");
        assert!((im - fim).abs() < 1e-9, "{im} {fim}");
    }
}
