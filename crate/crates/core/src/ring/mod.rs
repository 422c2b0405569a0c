//! Base rings: ℤ, ℤ[1/S], and quadratic orders, with their exact elements.

pub mod elem;
pub mod factorize;
pub mod interval;
pub mod quad;
pub mod relquad;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use elem::{Basis, RElem};
pub use quad::QuadIrr;
pub use relquad::{LinearForm, Radical, RelQuad, RelQuadIrr};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Integers,
    /// ℤ[1/S] for a nonempty set of primes, kept sorted.
    SIntegers(Vec<u64>),
    /// ℤ[ω] with ω = √d, or ω = (1+√d)/2 when `maximal` and d ≡ 1 mod 4.
    Quadratic { d: i64, maximal: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    kind: RingKind,
}

impl Ring {
    pub fn integers() -> Self {
        Ring { kind: RingKind::Integers }
    }

    pub fn s_integers(primes: &[u64]) -> Result<Self> {
        let mut ps: Vec<u64> = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if ps.is_empty() {
            return Err(Error::Parse("empty set of primes".into()));
        }
        for &p in &ps {
            if !factorize::is_probable_prime(&BigInt::from(p)) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
        }
        Ok(Ring { kind: RingKind::SIntegers(ps) })
    }

    pub fn quadratic(d: i64, maximal: bool) -> Result<Self> {
        if d == 0 || d == 1 || !factorize::is_squarefree(d) {
            return Err(Error::Parse(format!("d = {d} must be squarefree and not 0 or 1")));
        }
        // for d ≢ 1 mod 4 the maximal order is ℤ[√d]
        let maximal = maximal && d.rem_euclid(4) == 1;
        Ok(Ring { kind: RingKind::Quadratic { d, maximal } })
    }

    pub fn gaussian() -> Self {
        Ring { kind: RingKind::Quadratic { d: -1, maximal: false } }
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn d(&self) -> Option<i64> {
        match self.kind {
            RingKind::Quadratic { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn basis(&self) -> Basis {
        match self.kind {
            RingKind::Quadratic { d, maximal: true } => Basis::HalfSqrt(d),
            RingKind::Quadratic { d, .. } => Basis::Sqrt(d),
            _ => Basis::Rational,
        }
    }

    pub fn is_integers(&self) -> bool {
        self.kind == RingKind::Integers
    }

    pub fn is_imaginary(&self) -> bool {
        matches!(self.d(), Some(d) if d < 0)
    }

    pub fn is_real_quadratic(&self) -> bool {
        matches!(self.d(), Some(d) if d > 0)
    }

    /// Whether the fraction field is ℚ.
    pub fn is_rational(&self) -> bool {
        self.d().is_none()
    }

    /// |d| for imaginary rings, 1 otherwise; the scale used by [`Radical`].
    pub fn absd(&self) -> BigInt {
        match self.d() {
            Some(d) if d < 0 => BigInt::from(-d),
            _ => BigInt::one(),
        }
    }

    pub fn omega(&self) -> RElem {
        match self.basis() {
            Basis::Rational => RElem::one(),
            b => RElem::omega(b),
        }
    }

    pub fn elem(&self, u: i64, v: i64) -> RElem {
        let b = self.basis();
        if v == 0 {
            return RElem::from_int(u);
        }
        assert!(b != Basis::Rational, "irrational element of a rational ring");
        RElem::from_coords(&BigRational::from_integer(u.into()), &BigRational::from_integer(v.into()), b)
    }

    pub fn elem_big(&self, u: BigInt, v: BigInt) -> RElem {
        if v.is_zero() {
            return RElem::from_bigint(u);
        }
        RElem::from_coords(&BigRational::from_integer(u), &BigRational::from_integer(v), self.basis())
    }

    fn den_ok(&self, den: &BigInt) -> bool {
        match &self.kind {
            RingKind::SIntegers(ps) => {
                let mut n = den.clone();
                for &p in ps {
                    let p = BigInt::from(p);
                    while (&n % &p).is_zero() {
                        n /= &p;
                    }
                }
                n.is_one()
            }
            _ => den.is_one(),
        }
    }

    /// Membership predicate.
    pub fn contains(&self, x: &RElem) -> bool {
        let b = x.basis();
        if b != Basis::Rational && b != self.basis() {
            return false;
        }
        self.den_ok(x.den())
    }

    pub fn check(&self, x: &RElem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotInRing { elem: x.to_string(), ring: self.to_string() })
        }
    }

    pub fn is_unit(&self, x: &RElem) -> bool {
        if !self.contains(x) || x.is_zero() {
            return false;
        }
        match x.inv() {
            Ok(y) => self.contains(&y),
            Err(_) => false,
        }
    }

    /// `|x|²` for elements of ℚ or an imaginary field.
    pub fn abs_sq(&self, x: &RElem) -> BigRational {
        assert!(!self.is_real_quadratic(), "abs_sq needs a complex embedding with conjugation");
        x.norm()
    }

    /// Parse an element literal such as `3+2*w`, `-1/4`, `1+i` or `2-sqrt(2)`.
    pub fn parse_elem(&self, s: &str) -> Result<RElem> {
        let z = crate::expr::parse_value(s, self)?;
        match z.in_base() {
            Some(x) => {
                self.check(x)?;
                Ok(x.clone())
            }
            None => Err(Error::NotInRing { elem: s.to_string(), ring: self.to_string() }),
        }
    }

    /// Every element of height ≤ h, ordered by height and then value.
    pub fn box_elements(&self, h: u64) -> Vec<RElem> {
        let hi = h as i64;
        let mut out = Vec::new();
        match &self.kind {
            RingKind::Integers => out.extend((-hi..=hi).map(RElem::from_int)),
            RingKind::SIntegers(ps) => {
                for m in smooth_numbers(ps, h) {
                    for n in -hi..=hi {
                        if m == 1 || n.gcd(&(m as i64)) == 1 {
                            out.push(RElem::from_ratio(&BigRational::new(n.into(), m.into())));
                        }
                    }
                }
            }
            RingKind::Quadratic { .. } => {
                for u in -hi..=hi {
                    for v in -hi..=hi {
                        out.push(self.elem(u, v));
                    }
                }
            }
        }
        out.sort_by(|x, y| x.height().cmp(&y.height()).then_with(|| x.cmp(y)));
        out
    }

    /// Number of elements of height ≤ h.
    pub fn box_size(&self, h: u64) -> u128 {
        match &self.kind {
            RingKind::Quadratic { .. } => (2 * h as u128 + 1).pow(2),
            RingKind::Integers => 2 * h as u128 + 1,
            RingKind::SIntegers(_) => self.box_elements(h).len() as u128,
        }
    }

    /// Torsion generator followed by generators of the free part.
    pub fn unit_generators(&self) -> Result<Vec<RElem>> {
        match &self.kind {
            RingKind::Integers => Ok(vec![RElem::from_int(-1)]),
            RingKind::SIntegers(ps) => {
                let mut v = vec![RElem::from_int(-1)];
                v.extend(ps.iter().map(|&p| RElem::from_int(p as i64)));
                Ok(v)
            }
            RingKind::Quadratic { d, .. } if *d < 0 => Ok(vec![self.torsion_generator()]),
            RingKind::Quadratic { .. } => {
                Ok(vec![RElem::from_int(-1), crate::pell::fundamental_unit(self)?])
            }
        }
    }

    /// Generator of the roots of unity in the ring.
    pub fn torsion_generator(&self) -> RElem {
        match self.basis() {
            Basis::Sqrt(-1) => self.omega(),
            // ω = (1+√-3)/2 is a primitive 6th root of unity
            Basis::HalfSqrt(-3) => self.omega(),
            _ => RElem::from_int(-1),
        }
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> u32 {
        match self.basis() {
            Basis::Sqrt(-1) => 4,
            Basis::HalfSqrt(-3) => 6,
            _ => 2,
        }
    }
}

/// Numbers ≤ h whose prime factors all lie in `ps`.
fn smooth_numbers(ps: &[u64], h: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in ps {
        let mut next = Vec::new();
        for &m in &out {
            let mut x = m;
            while x <= h {
                next.push(x);
                match x.checked_mul(p) {
                    Some(y) => x = y,
                    None => break,
                }
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RingKind::Integers => write!(f, "Z"),
            RingKind::SIntegers(ps) => {
                let n: u64 = ps.iter().product();
                write!(f, "Z[1/{n}]")
            }
            RingKind::Quadratic { d: -1, .. } => write!(f, "Z[i]"),
            RingKind::Quadratic { d, maximal: true } => write!(f, "O({d})"),
            RingKind::Quadratic { d, .. } => write!(f, "Z[sqrt({d})]"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let int = |x: &str| x.parse::<i64>().map_err(|_| Error::Parse(format!("bad ring spec {s:?}")));
        if t == "Z" {
            return Ok(Ring::integers());
        }
        if t == "Z[i]" {
            return Ok(Ring::gaussian());
        }
        if let Some(n) = t.strip_prefix("Z[1/").and_then(|r| r.strip_suffix(']')) {
            let n = int(n)?;
            if n < 2 {
                return Err(Error::Parse(format!("bad ring spec {s:?}")));
            }
            let ps: Vec<u64> =
                factorize::factorize(&BigInt::from(n)).keys().map(|p| p.to_u64().unwrap()).collect();
            return Ring::s_integers(&ps);
        }
        if let Some(d) = t.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
            return Ring::quadratic(int(d)?, true);
        }
        if let Some(d) = t.strip_prefix("Z[sqrt(").and_then(|r| r.strip_suffix(")]")) {
            return Ring::quadratic(int(d)?, false);
        }
        Err(Error::Parse(format!("unknown ring spec {s:?}")))
    }
}

impl Serialize for Ring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nearest integer with ties rounding down: the unique `c` with `x − c ∈ (−1/2, 1/2]`.
pub fn nearest_rational(x: &BigRational) -> BigInt {
    // c = ceil(x − 1/2)
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (x - half).ceil().to_integer()
}

/// Whether a rational is the square of a rational.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = num_integer::Roots::sqrt(x.numer());
    let d = num_integer::Roots::sqrt(x.denom());
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dsl_roundtrip() {
        for s in ["Z", "Z[1/2]", "Z[i]", "O(-3)", "O(5)", "Z[sqrt(2)]", "Z[sqrt(5)]", "Z[1/6]"] {
            let r: Ring = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("Z[sqrt(4)]".parse::<Ring>().is_err());
        assert!("Q".parse::<Ring>().is_err());
        assert_eq!("O(-3)".parse::<Ring>().unwrap().basis(), Basis::HalfSqrt(-3));
        assert_eq!("O(3)".parse::<Ring>().unwrap().basis(), Basis::Sqrt(3));
    }

    #[test]
    fn units() {
        assert_eq!(Ring::integers().unit_generators().unwrap(), vec![RElem::from_int(-1)]);
        let z2: Ring = "Z[1/2]".parse().unwrap();
        assert_eq!(z2.unit_generators().unwrap(), vec![RElem::from_int(-1), RElem::from_int(2)]);
        let r: Ring = "Z[sqrt(2)]".parse().unwrap();
        assert_eq!(r.unit_generators().unwrap(), vec![RElem::from_int(-1), r.elem(1, 1)]);
        let g = Ring::gaussian();
        assert_eq!(g.unit_generators().unwrap(), vec![g.elem(0, 1)]);
    }

    #[test]
    fn membership() {
        let z2: Ring = "Z[1/2]".parse().unwrap();
        assert!(z2.contains(&RElem::from_ratio(&BigRational::new(7.into(), 4.into()))));
        assert!(!z2.contains(&RElem::from_ratio(&BigRational::new(1.into(), 3.into()))));
        assert!(z2.is_unit(&RElem::from_int(-8)));
        assert!(!z2.is_unit(&RElem::from_int(3)));
        let r: Ring = "Z[sqrt(2)]".parse().unwrap();
        assert!(!Ring::integers().contains(&r.elem(0, 1)));
    }

    #[test]
    fn boxes() {
        assert_eq!(Ring::integers().box_elements(3).len(), 7);
        assert_eq!(Ring::gaussian().box_elements(1).len(), 9);
        let z2: Ring = "Z[1/2]".parse().unwrap();
        // heights ≤ 2: 0, ±1, ±2, ±1/2
        assert_eq!(z2.box_elements(2).len(), 7);
        assert!(z2.box_elements(4).iter().all(|x| x.height_u64() <= 4));
    }

    #[test]
    fn rational_rounding() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(nearest_rational(&q(5, 2)), 2.into());
        assert_eq!(nearest_rational(&q(-5, 2)), (-3).into());
        assert_eq!(nearest_rational(&q(7, 3)), 2.into());
    }
}
