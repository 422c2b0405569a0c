//! Elements `(a + b·ω)/den` of ℚ or of a quadratic field ℚ(√d).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The `ℤ`-basis `{1, ω}` an element is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    /// No irrational part; the element is rational.
    Rational,
    /// ω = √d.
    Sqrt(i64),
    /// ω = (1 + √d)/2, only used when d ≡ 1 mod 4.
    HalfSqrt(i64),
}

impl Basis {
    pub fn d(self) -> Option<i64> {
        match self {
            Basis::Rational => None,
            Basis::Sqrt(d) | Basis::HalfSqrt(d) => Some(d),
        }
    }

    /// `(t, n)` with ω² = t·ω + n.
    pub fn relation(self) -> (i64, i64) {
        match self {
            Basis::Rational => (0, 0),
            Basis::Sqrt(d) => (0, d),
            Basis::HalfSqrt(d) => (1, (d - 1) / 4),
        }
    }

    pub fn is_imaginary(self) -> bool {
        matches!(self.d(), Some(d) if d < 0)
    }

    pub fn is_real_quadratic(self) -> bool {
        matches!(self.d(), Some(d) if d > 0)
    }

    /// Rational elements live in every basis; two distinct quadratic bases never mix.
    fn merge(self, other: Basis) -> Basis {
        match (self, other) {
            (Basis::Rational, b) | (b, Basis::Rational) => b,
            (a, b) if a == b => a,
            (a, b) => panic!("mixing elements of incompatible bases {a:?} and {b:?}"),
        }
    }
}

/// An element `(a + b·ω)/den` in canonical form: `den > 0`, `gcd(a, b, den) = 1`,
/// and `basis = Rational` whenever `b = 0`. Structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RElem {
    a: BigInt,
    b: BigInt,
    den: BigInt,
    basis: Basis,
}

impl RElem {
    pub fn from_parts(a: BigInt, b: BigInt, den: BigInt, basis: Basis) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if basis == Basis::Rational && !b.is_zero() {
            return Err(Error::Parse("irrational part in a rational basis".into()));
        }
        let mut x = RElem { a, b, den, basis };
        x.normalize();
        Ok(x)
    }

    fn raw(a: BigInt, b: BigInt, den: BigInt, basis: Basis) -> Self {
        let mut x = RElem { a, b, den, basis };
        x.normalize();
        x
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RElem { a: n, b: BigInt::zero(), den: BigInt::one(), basis: Basis::Rational }
    }

    pub fn from_ratio(q: &BigRational) -> Self {
        Self::raw(q.numer().clone(), BigInt::zero(), q.denom().clone(), Basis::Rational)
    }

    /// `u + v·ω` from rational coordinates.
    pub fn from_coords(u: &BigRational, v: &BigRational, basis: Basis) -> Self {
        if v.is_zero() {
            return Self::from_ratio(u);
        }
        assert!(basis != Basis::Rational, "irrational part in a rational basis");
        let den = u.denom().lcm(v.denom());
        let a = u.numer() * (&den / u.denom());
        let b = v.numer() * (&den / v.denom());
        Self::raw(a, b, den, basis)
    }

    pub fn omega(basis: Basis) -> Self {
        Self::raw(BigInt::zero(), BigInt::one(), BigInt::one(), basis)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.den = -&self.den;
        }
        if !self.den.is_one() {
            let g = self.a.gcd(&self.b).gcd(&self.den);
            if !g.is_one() {
                self.a /= &g;
                self.b /= &g;
                self.den /= &g;
            }
        }
        if self.b.is_zero() {
            self.basis = Basis::Rational;
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn numer_a(&self) -> &BigInt {
        &self.a
    }

    pub fn numer_b(&self) -> &BigInt {
        &self.b
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Rational coordinate on 1.
    pub fn u(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.den.clone())
    }

    /// Rational coordinate on ω.
    pub fn v(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.den.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integral_in_basis(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.u())
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        (self.is_rational() && self.den.is_one()).then_some(&self.a)
    }

    /// Galois conjugate (complex conjugation when the field is imaginary).
    pub fn conj(&self) -> Self {
        if self.b.is_zero() {
            return self.clone();
        }
        let (t, _) = self.basis.relation();
        Self::raw(&self.a + &self.b * t, -&self.b, self.den.clone(), self.basis)
    }

    /// Field norm to ℚ.
    pub fn norm(&self) -> BigRational {
        let (t, n) = self.basis.relation();
        let num = &self.a * &self.a + &self.a * &self.b * t - &self.b * &self.b * n;
        BigRational::new(num, &self.den * &self.den)
    }

    pub fn trace(&self) -> BigRational {
        let (t, _) = self.basis.relation();
        BigRational::new(BigInt::from(2) * &self.a + &self.b * t, self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (t, n) = self.basis.relation();
        let nm = &self.a * &self.a + &self.a * &self.b * t - &self.b * &self.b * n;
        Ok(Self::raw(&self.den * (&self.a + &self.b * t), -(&self.den * &self.b), nm, self.basis))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `(x, y)` with value `x + i·√|d|·y`; only meaningful for ℚ and imaginary fields.
    pub fn imag_coords(&self) -> (BigRational, BigRational) {
        match self.basis {
            Basis::Rational => (self.u(), BigRational::zero()),
            Basis::Sqrt(_) => (self.u(), self.v()),
            Basis::HalfSqrt(_) => {
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                (self.u() + self.v() * &half, self.v() * half)
            }
        }
    }

    /// Sign of a real-valued element (ℚ or a real quadratic field under the embedding
    /// with √d > 0; for imaginary fields only rational elements are accepted).
    pub fn real_sign(&self) -> Ordering {
        if self.b.is_zero() {
            return self.a.sign_cmp();
        }
        let d = self.basis.d().expect("quadratic basis");
        assert!(d > 0, "real_sign of a non-real element");
        // 2(a + bω) = p + q√d
        let (t, _) = self.basis.relation();
        let p = BigInt::from(2) * &self.a + &self.b * t;
        let q = if t == 1 { self.b.clone() } else { BigInt::from(2) * &self.b };
        sign_p_plus_q_sqrt(&p, &q, &BigInt::from(d))
    }

    /// Complex approximation (embedding √d ↦ principal root).
    pub fn to_c64(&self) -> (f64, f64) {
        let u = ratio_f64(&self.a, &self.den);
        let v = ratio_f64(&self.b, &self.den);
        match self.basis {
            Basis::Rational => (u, 0.0),
            Basis::Sqrt(d) if d > 0 => (u + v * (d as f64).sqrt(), 0.0),
            Basis::Sqrt(d) => (u, v * (-(d as f64)).sqrt()),
            Basis::HalfSqrt(d) if d > 0 => (u + v * (1.0 + (d as f64).sqrt()) / 2.0, 0.0),
            Basis::HalfSqrt(d) => (u + v / 2.0, v * (-(d as f64)).sqrt() / 2.0),
        }
    }

    /// Height: max |·| over numerators and denominators of the reduced coordinates.
    pub fn height(&self) -> BigInt {
        let u = self.u();
        let v = self.v();
        [u.numer().abs(), u.denom().clone(), v.numer().abs(), v.denom().clone()]
            .into_iter()
            .max()
            .unwrap()
    }

    pub fn height_u64(&self) -> u64 {
        self.height().to_u64().unwrap_or(u64::MAX)
    }
}

pub(crate) fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    if let (Some(a), Some(b)) = (n.to_f64(), d.to_f64()) {
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return a / b;
        }
    }
    BigRational::new(n.clone(), d.clone()).to_f64().unwrap_or(f64::NAN)
}

/// Exact sign of `p + q√d`, `d > 0`.
pub(crate) fn sign_p_plus_q_sqrt(p: &BigInt, q: &BigInt, d: &BigInt) -> Ordering {
    let sp = p.sign_cmp();
    let sq = q.sign_cmp();
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q²d
    let lhs = p * p;
    let rhs = q * q * d;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

pub(crate) trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl SignCmp for BigRational {
    fn sign_cmp(&self) -> Ordering {
        self.numer().cmp(&BigInt::zero())
    }
}

impl<'a> Add<&'a RElem> for &'a RElem {
    type Output = RElem;
    fn add(self, o: &RElem) -> RElem {
        let basis = self.basis.merge(o.basis);
        if self.den.is_one() && o.den.is_one() {
            return RElem::raw(&self.a + &o.a, &self.b + &o.b, BigInt::one(), basis);
        }
        RElem::raw(
            &self.a * &o.den + &o.a * &self.den,
            &self.b * &o.den + &o.b * &self.den,
            &self.den * &o.den,
            basis,
        )
    }
}

impl<'a> Sub<&'a RElem> for &'a RElem {
    type Output = RElem;
    fn sub(self, o: &RElem) -> RElem {
        let basis = self.basis.merge(o.basis);
        if self.den.is_one() && o.den.is_one() {
            return RElem::raw(&self.a - &o.a, &self.b - &o.b, BigInt::one(), basis);
        }
        RElem::raw(
            &self.a * &o.den - &o.a * &self.den,
            &self.b * &o.den - &o.b * &self.den,
            &self.den * &o.den,
            basis,
        )
    }
}

impl<'a> Mul<&'a RElem> for &'a RElem {
    type Output = RElem;
    fn mul(self, o: &RElem) -> RElem {
        let basis = self.basis.merge(o.basis);
        let den = if self.den.is_one() && o.den.is_one() { BigInt::one() } else { &self.den * &o.den };
        if self.b.is_zero() {
            return RElem::raw(&self.a * &o.a, &self.a * &o.b, den, basis);
        }
        if o.b.is_zero() {
            return RElem::raw(&self.a * &o.a, &self.b * &o.a, den, basis);
        }
        let (t, n) = basis.relation();
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a + &bb * n;
        let b = &self.a * &o.b + &o.a * &self.b + bb * t;
        RElem::raw(a, b, den, basis)
    }
}

impl Neg for &RElem {
    type Output = RElem;
    fn neg(self) -> RElem {
        RElem { a: -&self.a, b: -&self.b, den: self.den.clone(), basis: self.basis }
    }
}

impl Neg for RElem {
    type Output = RElem;
    fn neg(self) -> RElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RElem> for RElem {
            type Output = RElem;
            fn $m(self, o: RElem) -> RElem {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RElem> for RElem {
            type Output = RElem;
            fn $m(self, o: &RElem) -> RElem {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RElem> for &'a RElem {
            type Output = RElem;
            fn $m(self, o: RElem) -> RElem {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<i64> for RElem {
    fn from(n: i64) -> Self {
        RElem::from_int(n)
    }
}

impl From<BigInt> for RElem {
    fn from(n: BigInt) -> Self {
        RElem::from_bigint(n)
    }
}

/// Lexicographic on `(u, v)`; used for deterministic output ordering.
impl Ord for RElem {
    fn cmp(&self, o: &Self) -> Ordering {
        let cu = (&self.a * &o.den).cmp(&(&o.a * &self.den));
        cu.then_with(|| (&self.b * &o.den).cmp(&(&o.b * &self.den))).then(self.basis.cmp(&o.basis))
    }
}

impl PartialOrd for RElem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn fmt_ratio(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for RElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = self.u();
        let v = self.v();
        if v.is_zero() {
            return write!(f, "{}", fmt_ratio(&u));
        }
        let w = match self.basis {
            Basis::Sqrt(-1) => "i".to_string(),
            Basis::Sqrt(d) => format!("sqrt({d})"),
            _ => "w".to_string(),
        };
        let vterm = if v.is_one() {
            w
        } else if (-&v).is_one() {
            format!("-{w}")
        } else {
            format!("{}*{w}", fmt_ratio(&v))
        };
        if u.is_zero() {
            write!(f, "{vterm}")
        } else if vterm.starts_with('-') {
            write!(f, "{}{vterm}", fmt_ratio(&u))
        } else {
            write!(f, "{}+{vterm}", fmt_ratio(&u))
        }
    }
}

impl fmt::Debug for RElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl serde::Serialize for RElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
