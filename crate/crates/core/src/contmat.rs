//! Continuant matrices `D(a)`, the involution `t`, the matrix `E` attached to a periodic
//! continued fraction, and its quadratic `E21·x² + (E22 − E11)·x − E12`.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{RElem, RelQuad, Ring};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub e11: RElem,
    pub e12: RElem,
    pub e21: RElem,
    pub e22: RElem,
}

impl Mat2 {
    pub fn new(e11: RElem, e12: RElem, e21: RElem, e22: RElem) -> Self {
        Mat2 { e11, e12, e21, e22 }
    }

    pub fn from_i64(m: [i64; 4]) -> Self {
        Mat2::new(m[0].into(), m[1].into(), m[2].into(), m[3].into())
    }

    pub fn identity() -> Self {
        Mat2::from_i64([1, 0, 0, 1])
    }

    /// The involution `[[0,1],[1,0]]`.
    pub fn t() -> Self {
        Mat2::from_i64([0, 1, 1, 0])
    }

    /// `t^k`.
    pub fn t_pow(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Mat2::identity()
        } else {
            Mat2::t()
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            e11: &(&self.e11 * &o.e11) + &(&self.e12 * &o.e21),
            e12: &(&self.e11 * &o.e12) + &(&self.e12 * &o.e22),
            e21: &(&self.e21 * &o.e11) + &(&self.e22 * &o.e21),
            e22: &(&self.e21 * &o.e12) + &(&self.e22 * &o.e22),
        }
    }

    /// `self · D(a)` without building `D(a)`.
    pub fn mul_d(&self, a: &RElem) -> Mat2 {
        Mat2 {
            e11: &(&self.e11 * a) + &self.e12,
            e12: self.e11.clone(),
            e21: &(&self.e21 * a) + &self.e22,
            e22: self.e21.clone(),
        }
    }

    /// `D(a)⁻¹ · self = [[0,1],[1,−a]] · self`.
    pub fn peel_d(&self, a: &RElem) -> Mat2 {
        Mat2 {
            e11: self.e21.clone(),
            e12: self.e22.clone(),
            e21: &self.e11 - &(a * &self.e21),
            e22: &self.e12 - &(a * &self.e22),
        }
    }

    /// `self · t` (swap columns).
    pub fn mul_t(&self) -> Mat2 {
        Mat2 { e11: self.e12.clone(), e12: self.e11.clone(), e21: self.e22.clone(), e22: self.e21.clone() }
    }

    pub fn det(&self) -> RElem {
        &(&self.e11 * &self.e22) - &(&self.e12 * &self.e21)
    }

    pub fn trace(&self) -> RElem {
        &self.e11 + &self.e22
    }

    pub fn inv(&self) -> Result<Mat2> {
        let di = self.det().inv()?;
        Ok(Mat2 {
            e11: &self.e22 * &di,
            e12: -(&self.e12 * &di),
            e21: -(&self.e21 * &di),
            e22: &self.e11 * &di,
        })
    }

    pub fn is_scalar(&self) -> bool {
        self.e12.is_zero() && self.e21.is_zero() && self.e11 == self.e22
    }

    pub fn entries(&self) -> [&RElem; 4] {
        [&self.e11, &self.e12, &self.e21, &self.e22]
    }

    pub fn max_height(&self) -> num_bigint::BigInt {
        self.entries().iter().map(|x| x.height()).max().unwrap()
    }

    /// Parse `"a,b,c,d"` (row-major) with ring-element literals.
    pub fn parse(s: &str, ring: &Ring) -> Result<Mat2> {
        let parts = split_top_level(s.trim().trim_start_matches('[').trim_end_matches(']'), ',');
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected four entries in {s:?}")));
        }
        let e: Vec<RElem> = parts.iter().map(|p| ring.parse_elem(p)).collect::<Result<_>>()?;
        Ok(Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()))
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.e11, self.e12, self.e21, self.e22)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Mat2", 4)?;
        st.serialize_field("e11", &self.e11.to_string())?;
        st.serialize_field("e12", &self.e12.to_string())?;
        st.serialize_field("e21", &self.e21.to_string())?;
        st.serialize_field("e22", &self.e22.to_string())?;
        st.end()
    }
}

/// Split on `sep` outside parentheses.
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// `D(a) = [[a,1],[1,0]]`.
pub fn dmat(a: &RElem) -> Mat2 {
    Mat2::new(a.clone(), RElem::one(), RElem::one(), RElem::zero())
}

/// A periodic continued fraction `[b1,…,bN, overline{a1,…,ak}]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pcf {
    pub b: Vec<RElem>,
    pub a: Vec<RElem>,
}

impl Pcf {
    pub fn new(b: Vec<RElem>, a: Vec<RElem>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Parse("period must be nonempty".into()));
        }
        Ok(Pcf { b, a })
    }

    pub fn from_i64(b: &[i64], a: &[i64]) -> Self {
        Pcf::new(b.iter().map(|&x| x.into()).collect(), a.iter().map(|&x| x.into()).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// Coordinates `(b1,…,bN,a1,…,ak)`.
    pub fn coords(&self) -> Vec<RElem> {
        self.b.iter().chain(&self.a).cloned().collect()
    }

    pub fn from_coords(n: usize, coords: &[RElem]) -> Result<Self> {
        Pcf::new(coords[..n].to_vec(), coords[n..].to_vec())
    }

    /// `D(b1)⋯D(bN)`.
    pub fn pre_matrix(&self) -> Mat2 {
        self.b.iter().fold(Mat2::identity(), |m, x| m.mul_d(x))
    }

    /// `W = D(a1)⋯D(ak)`.
    pub fn period_matrix(&self) -> Mat2 {
        self.a.iter().fold(Mat2::identity(), |m, x| m.mul_d(x))
    }

    /// Parse `"[b1,…,bN; a1,…,ak]"`; without `;` the whole list is the period.
    pub fn parse(s: &str, ring: &Ring) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("PCF must be bracketed: {s:?}")))?;
        let (pre, per) = match inner.split_once(';') {
            Some((p, q)) => (p, q),
            None => ("", inner),
        };
        let list = |x: &str| -> Result<Vec<RElem>> {
            split_top_level(x, ',').iter().filter(|e| !e.is_empty()).map(|e| ring.parse_elem(e)).collect()
        };
        Pcf::new(list(pre)?, list(per)?)
    }
}

impl fmt::Display for Pcf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[RElem]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if self.b.is_empty() {
            write!(f, "[; {}]", j(&self.a))
        } else {
            write!(f, "[{}; {}]", j(&self.b), j(&self.a))
        }
    }
}

impl fmt::Debug for Pcf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Pcf {
    type Err = Error;

    /// Parses over the rationals; use [`Pcf::parse`] to check ring membership.
    fn from_str(s: &str) -> Result<Self> {
        Pcf::parse(s, &Ring::integers())
    }
}

/// `E = D(b1)⋯D(bN)·D(a1)⋯D(ak)·t·D(−bN)⋯D(−b1)·t`.
pub fn e_matrix(p: &Pcf) -> Mat2 {
    let mut m = p.pre_matrix();
    for x in &p.a {
        m = m.mul_d(x);
    }
    if p.b.is_empty() {
        return m;
    }
    m = m.mul_t();
    for x in p.b.iter().rev() {
        m = m.mul_d(&-x);
    }
    m.mul_t()
}

/// Coefficient triple `A·x² + B·x + C`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadPoly {
    pub a: RElem,
    pub b: RElem,
    pub c: RElem,
}

impl QuadPoly {
    pub fn new(a: RElem, b: RElem, c: RElem) -> Result<Self> {
        let q = QuadPoly { a, b, c };
        if q.is_zero() {
            return Err(Error::DegenerateQuad);
        }
        Ok(q)
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        QuadPoly::new(a.into(), b.into(), c.into()).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn coeffs(&self) -> [&RElem; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn discriminant(&self) -> RElem {
        &(&self.b * &self.b) - &(&RElem::from_int(4) * &(&self.a * &self.c))
    }

    pub fn eval(&self, x: &RelQuad) -> RelQuad {
        x.mul(x).scale(&self.a).add(&x.scale(&self.b)).add_base(&self.c)
    }

    /// Whether the two triples define the same root multiset (all 2×2 minors vanish).
    pub fn proportional(&self, o: &QuadPoly) -> bool {
        let m = |x: &RElem, y: &RElem, u: &RElem, v: &RElem| &(x * v) - &(y * u);
        m(&self.a, &self.b, &o.a, &o.b).is_zero()
            && m(&self.a, &self.c, &o.a, &o.c).is_zero()
            && m(&self.b, &self.c, &o.b, &o.c).is_zero()
    }

    /// Roots `((−B + √Δ)/(2A), (−B − √Δ)/(2A))` for `A ≠ 0`.
    pub fn roots(&self) -> Result<(RelQuad, RelQuad)> {
        if self.a.is_zero() {
            return Err(Error::Unsupported("linear polynomial".into()));
        }
        let s = RelQuad::sqrt_of(self.discriminant());
        let inv2a = (&RElem::from_int(2) * &self.a).inv()?;
        let nb = -&self.b;
        Ok((s.add_base(&nb).scale(&inv2a), s.neg().add_base(&nb).scale(&inv2a)))
    }

    /// Whether the roots lie outside the fraction field of the coefficients.
    pub fn is_irreducible(&self) -> bool {
        !self.a.is_zero() && RelQuad::sqrt_of(self.discriminant()).in_base().is_none()
    }

    /// Parse `"A,B,C"` or a polynomial in `x` such as `x^2-x-1` or `2*x^2 + (1+i)*x + 3`.
    pub fn parse(s: &str, ring: &Ring) -> Result<Self> {
        let parts = split_top_level(s.trim().trim_start_matches('[').trim_end_matches(']'), ',');
        if parts.len() == 3 {
            let e: Vec<RElem> = parts.iter().map(|p| ring.parse_elem(p)).collect::<Result<_>>()?;
            return QuadPoly::new(e[0].clone(), e[1].clone(), e[2].clone());
        }
        if parts.len() != 1 {
            return Err(Error::Parse(format!("bad quadratic {s:?}")));
        }
        let mut coef = [RElem::zero(), RElem::zero(), RElem::zero()];
        for (sign, term) in signed_terms(&parts[0])? {
            let (body, deg) = if let Some(b) = term.strip_suffix("x^2") {
                (b, 2)
            } else if let Some(b) = term.strip_suffix('x') {
                (b, 1)
            } else {
                (term.as_str(), 0)
            };
            let body = body.trim().trim_end_matches('*').trim();
            let c = if body.is_empty() { RElem::one() } else { ring.parse_elem(body)? };
            let c = if sign { -c } else { c };
            coef[2 - deg] = &coef[2 - deg] + &c;
        }
        let [a, b, c] = coef;
        QuadPoly::new(a, b, c)
    }
}

/// Split a polynomial string into `(negative, term)` pairs at top-level `+`/`-`.
fn signed_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !cur.ends_with('^') {
            if !cur.is_empty() {
                out.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("bad polynomial {s:?}")));
    }
    out.push((neg, cur));
    Ok(out)
}

impl fmt::Display for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl fmt::Debug for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `(E21, E22 − E11, −E12)`; zero exactly when `E` is scalar.
pub fn quad_poly(p: &Pcf) -> QuadPoly {
    quad_of_matrix(&e_matrix(p))
}

pub fn quad_of_matrix(e: &Mat2) -> QuadPoly {
    QuadPoly { a: e.e21.clone(), b: &e.e22 - &e.e11, c: -&e.e12 }
}

/// Whether `E·(β,1)ᵀ = (E21·β + E22)·(β,1)ᵀ`.
pub fn eigen_check(p: &Pcf, beta: &RelQuad) -> bool {
    matrix_eigen_check(&e_matrix(p), beta)
}

pub fn matrix_eigen_check(e: &Mat2, beta: &RelQuad) -> bool {
    let lam = beta.scale(&e.e21).add_base(&e.e22);
    // first row: E11·β + E12 = λ·β; the second row reads E21·β + E22 = λ by definition
    beta.scale(&e.e11).add_base(&e.e12) == lam.mul(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::QuadIrr;

    #[test]
    fn d_and_t() {
        assert_eq!(dmat(&RElem::zero()), Mat2::t());
        assert_eq!(dmat(&RElem::from_int(5)), Mat2::from_i64([5, 1, 1, 0]));
        assert_eq!(dmat(&RElem::from_int(5)).det(), RElem::from_int(-1));
        let m = Mat2::from_i64([2, 3, 5, 8]);
        let x = RElem::from_int(7);
        assert_eq!(m.mul_d(&x), m.mul(&dmat(&x)));
        assert_eq!(m.mul(&dmat(&x)).mul_t(), m.mul(&dmat(&x)).mul(&Mat2::t()));
        assert_eq!(dmat(&x).mul(&m).peel_d(&x), m);
    }

    #[test]
    fn e_matrix_examples() {
        assert_eq!(e_matrix(&Pcf::from_i64(&[], &[1])), Mat2::from_i64([1, 1, 1, 0]));
        let p = Pcf::from_i64(&[1], &[2]);
        assert_eq!(e_matrix(&p), Mat2::from_i64([1, 2, 1, 1]));
        assert_eq!(quad_poly(&p), QuadPoly::from_i64(1, 0, -2));
        assert_eq!(quad_poly(&Pcf::from_i64(&[], &[1])), QuadPoly::from_i64(1, -1, -1));
    }

    #[test]
    fn e_matrix_is_conjugate_of_period() {
        let p = Pcf::from_i64(&[3, -1], &[2, -4, 4]);
        let pre = p.pre_matrix();
        let want = pre.mul(&p.period_matrix()).mul(&pre.inv().unwrap());
        assert_eq!(e_matrix(&p), want);
        assert_eq!(e_matrix(&p).det(), RElem::from_int(-1));
    }

    #[test]
    fn eigenvectors() {
        let p = Pcf::from_i64(&[1], &[2]);
        let s2 = QuadIrr::sqrt(2).unwrap().to_relquad();
        assert!(eigen_check(&p, &s2));
        assert!(eigen_check(&p, &s2.neg()));
        assert!(!eigen_check(&p, &RelQuad::from_base(RElem::one())));
        let g = QuadIrr::from_i64(1, 1, 2, 5).unwrap().to_relquad();
        assert!(eigen_check(&Pcf::from_i64(&[], &[1]), &g));
    }

    #[test]
    fn parsing() {
        let z = Ring::integers();
        assert_eq!(Pcf::parse("[1; 2]", &z).unwrap(), Pcf::from_i64(&[1], &[2]));
        assert_eq!(Pcf::parse("[; 1]", &z).unwrap(), Pcf::from_i64(&[], &[1]));
        assert_eq!(Pcf::parse("[2,-4,4]", &z).unwrap(), Pcf::from_i64(&[], &[2, -4, 4]));
        assert!(Pcf::parse("[1;]", &z).is_err());
        assert_eq!(Pcf::from_i64(&[1], &[2]).to_string(), "[1; 2]");
        assert_eq!(QuadPoly::parse("x^2-2", &z).unwrap(), QuadPoly::from_i64(1, 0, -2));
        assert_eq!(QuadPoly::parse("1,0,-2", &z).unwrap(), QuadPoly::from_i64(1, 0, -2));
        assert_eq!(QuadPoly::parse("2x^2 - 2*x - 3", &z).unwrap(), QuadPoly::from_i64(2, -2, -3));
        let g = Ring::gaussian();
        let q = QuadPoly::parse("x^2 + (1+i)*x - i", &g).unwrap();
        assert_eq!(q.b, g.elem(1, 1));
        assert_eq!(q.c, g.elem(0, -1));
        assert_eq!(Mat2::parse("1,2,1,1", &z).unwrap(), Mat2::from_i64([1, 2, 1, 1]));
    }

    #[test]
    fn roots_and_irreducibility() {
        let q = QuadPoly::from_i64(1, -1, -1);
        let (r1, r2) = q.roots().unwrap();
        assert!(q.eval(&r1).is_zero() && q.eval(&r2).is_zero());
        assert!(q.is_irreducible());
        assert!(!QuadPoly::from_i64(1, 0, -4).is_irreducible());
        assert!(QuadPoly::from_i64(2, -2, -2).proportional(&q));
    }
}
