//! Fermat–Pell curves, the unit ↔ point correspondence, and Pell equation solving.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::contmat::{Mat2, QuadPoly};
use crate::error::{Error, Result};
use crate::ring::{Basis, RElem, RelQuad, Ring};

/// Smallest positive `(x, y)` with `y² − α·x² = ±1`, and the sign obtained.
pub fn fundamental_pell(alpha: &BigInt) -> Result<(BigInt, BigInt, i32)> {
    if !alpha.is_positive() {
        return Err(Error::Precondition(format!("alpha = {alpha} must be positive")));
    }
    let a0 = alpha.sqrt();
    if &a0 * &a0 == *alpha {
        return Err(Error::Precondition(format!("alpha = {alpha} is a square")));
    }
    // regular continued fraction of √α: (m + √α)/d
    let (mut m, mut d, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let n = &p * &p - alpha * &q * &q;
        if n.is_one() || n == -BigInt::one() {
            let sign = if n.is_one() { 1 } else { -1 };
            return Ok((q, p, sign));
        }
        m = &d * &a - &m;
        d = (alpha - &m * &m) / &d;
        a = (&a0 + &m) / &d;
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
}

/// Fundamental unit `ε > 1` of a real quadratic ring.
pub fn fundamental_unit(ring: &Ring) -> Result<RElem> {
    let d = ring.d().filter(|&d| d > 1).ok_or_else(|| Error::WrongRing(format!("{ring} is not real quadratic")))?;
    let (x, y, _) = fundamental_pell(&BigInt::from(d))?;
    let eps0 = RElem::from_coords(&BigRational::from_integer(y.clone()), &BigRational::from_integer(x.clone()), Basis::Sqrt(d));
    match ring.basis() {
        Basis::HalfSqrt(_) => Ok(half_integral_unit(d, &eps0)),
        _ => Ok(ring.elem_big(y, x)),
    }
}

/// `(X − Y)/2 + Y·ω` for `(X + Y√d)/2`.
fn half_elem(d: i64, big_x: &BigInt, big_y: &BigInt) -> RElem {
    let two = BigInt::from(2);
    RElem::from_coords(
        &BigRational::new(big_x - big_y, two),
        &BigRational::from_integer(big_y.clone()),
        Basis::HalfSqrt(d),
    )
}

/// Fundamental unit of the maximal order when `d ≡ 1 mod 4`: either the unit of ℤ[√d]
/// or its cube root.
fn half_integral_unit(d: i64, eps0: &RElem) -> RElem {
    let dd = BigInt::from(d);
    // small search over (X + Y√d)/2 with X² − d·Y² = ±4
    for y in 1..2000i64 {
        let yy = BigInt::from(y);
        for n in [-4i64, 4] {
            let x2 = &dd * &yy * &yy + n;
            if x2.is_positive() {
                let x = x2.sqrt();
                if &x * &x == x2 {
                    return half_elem(d, &x, &yy);
                }
            }
        }
    }
    // otherwise ε is eps0 or its cube root
    let e0 = eps0_in_half_basis(d, eps0);
    let (e, _) = eps0.to_c64();
    let c = e.cbrt();
    for n in [-1i64, 1] {
        let big_x = BigInt::from((c + n as f64 / c).round() as i64);
        let rhs = &big_x * &big_x - BigInt::from(4 * n);
        if (&rhs % &dd).is_zero() {
            let y2 = &rhs / &dd;
            let y = y2.sqrt();
            if &y * &y == y2 {
                let cand = half_elem(d, &big_x, &y);
                if &(&cand * &cand) * &cand == e0 {
                    return cand;
                }
            }
        }
    }
    e0
}

fn eps0_in_half_basis(d: i64, eps0: &RElem) -> RElem {
    let y = eps0.u().to_integer();
    let x = eps0.v().to_integer();
    half_elem(d, &(BigInt::from(2) * y), &(BigInt::from(2) * x))
}

/// `c·β + d` for a fixed root `β` of `A·x² + B·x + C`, with `c, d` in the base field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BetaElem {
    pub c: RElem,
    pub d: RElem,
}

impl BetaElem {
    pub fn new(c: RElem, d: RElem) -> Self {
        BetaElem { c, d }
    }

    pub fn one() -> Self {
        BetaElem { c: RElem::zero(), d: RElem::one() }
    }

    /// Product, reducing with `β² = −(B·β + C)/A`.
    pub fn mul(&self, o: &BetaElem, q: &QuadPoly) -> BetaElem {
        let cc = &self.c * &o.c;
        let ainv = q.a.inv().expect("A ≠ 0");
        let c = &(&(&self.c * &o.d) + &(&o.c * &self.d)) - &(&(&cc * &q.b) * &ainv);
        let d = &(&self.d * &o.d) - &(&(&cc * &q.c) * &ainv);
        BetaElem { c, d }
    }

    pub fn scale(&self, x: &RElem) -> BetaElem {
        BetaElem { c: &self.c * x, d: &self.d * x }
    }

    /// Relative norm `c²·C/A − c·d·B/A + d²`.
    pub fn norm(&self, q: &QuadPoly) -> RElem {
        let ainv = q.a.inv().expect("A ≠ 0");
        let t = &(&(&self.c * &self.c) * &q.c) - &(&(&self.c * &self.d) * &q.b);
        &(&t * &ainv) + &(&self.d * &self.d)
    }

    pub fn to_relquad(&self, beta: &RelQuad) -> RelQuad {
        beta.scale(&self.c).add_base(&self.d)
    }

    /// Coordinates of `x` in the basis `(β, 1)`, when `x` lies in the same extension.
    pub fn from_relquad(x: &RelQuad, beta: &RelQuad) -> Result<BetaElem> {
        if let Some(u) = x.in_base() {
            return Ok(BetaElem { c: RElem::zero(), d: u.clone() });
        }
        if x.delta() != beta.delta() {
            return Err(Error::Unsupported(format!("{x} does not lie in the field of {beta}")));
        }
        let c = x.v().checked_div(beta.v())?;
        let d = x.u() - &(&c * beta.u());
        Ok(BetaElem { c, d })
    }
}

/// A point of FP_k: `ad − bc = (−1)^k`, `Bc = A(d−a)`, `−Ab = Cc`, `−Bb = C(d−a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FPPoint {
    pub a: RElem,
    pub b: RElem,
    pub c: RElem,
    pub d: RElem,
    pub k_parity: u8,
}

fn parity_sign(k: usize) -> RElem {
    RElem::from_int(if k.is_multiple_of(2) { 1 } else { -1 })
}

impl FPPoint {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }

    /// Conic coordinates `(x, y) = (c, d)`.
    pub fn conic(&self) -> (RElem, RElem) {
        (self.c.clone(), self.d.clone())
    }

    pub fn height(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.height()).max().unwrap()
    }

    /// Check the four defining equations exactly.
    pub fn check(&self, q: &QuadPoly) -> Result<()> {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let det = &(a * d) - &(b * c);
        let want = parity_sign(self.k_parity as usize);
        if det != want {
            return Err(Error::Invariant(format!("ad - bc = {det}, expected {want}")));
        }
        let dma = d - a;
        let eqs = [
            (&q.b * c) == (&q.a * &dma),
            -(&q.a * b) == (&q.c * c),
            -(&q.b * b) == (&q.c * &dma),
        ];
        if eqs.iter().all(|&e| e) {
            Ok(())
        } else {
            Err(Error::Invariant(format!("({a}, {b}, {c}, {d}) is not on FP for {q}")))
        }
    }
}

/// The order `R_β` of the lattice `β·R + R`, as `R + R·θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderDesc {
    pub theta: BetaElem,
}

impl OrderDesc {
    /// Whether `x = m·θ + n` for some `m, n ∈ R`.
    pub fn contains(&self, x: &BetaElem, ring: &Ring) -> bool {
        let Ok(m) = x.c.checked_div(&self.theta.c) else { return false };
        ring.contains(&m) && ring.contains(&(&x.d - &(&m * &self.theta.d)))
    }
}

/// `R_β`: `R[β]` for monic `Q` (or `A` a unit of `R`); over ℤ, `ℤ[(A/g)·β]` with `g` the
/// content of `Q`, checked to stabilize the lattice.
pub fn r_beta(q: &QuadPoly, ring: &Ring) -> Result<OrderDesc> {
    if !q.is_irreducible() {
        return Err(Error::Reducible);
    }
    let theta = if q.a.is_one() || ring.is_unit(&q.a) {
        BetaElem::new(RElem::one(), RElem::zero())
    } else if ring.is_integers() {
        let (a, b, c) = (q.a.as_integer(), q.b.as_integer(), q.c.as_integer());
        let (Some(a), Some(b), Some(c)) = (a, b, c) else {
            return Err(Error::NotInRing { elem: q.to_string(), ring: ring.to_string() });
        };
        let g = a.gcd(b).gcd(c);
        BetaElem::new(RElem::from_bigint(a / g), RElem::zero())
    } else {
        return Err(Error::Unsupported(format!("non-monic quadratic over {ring}")));
    };
    let order = OrderDesc { theta };
    // θ·θ and θ·β must stay in R + R·θ and L_β respectively
    let tt = order.theta.mul(&order.theta, q);
    let tb = order.theta.mul(&BetaElem::new(RElem::one(), RElem::zero()), q);
    if !order.contains(&tt, ring) || !ring.contains(&tb.c) || !ring.contains(&tb.d) {
        return Err(Error::Invariant(format!("order basis for {q} does not stabilize the lattice")));
    }
    Ok(order)
}

/// The FP point attached to the unit `u = c·β + d` of norm `(−1)^k`.
pub fn unit_to_fp(u: &BetaElem, q: &QuadPoly, k: usize, ring: &Ring) -> Result<FPPoint> {
    let want = parity_sign(k);
    let n = u.norm(q);
    if n != want {
        return Err(Error::NormMismatch { found: n.to_string(), expected: want.to_string() });
    }
    let ainv = q.a.inv()?;
    let a = &u.d - &(&(&u.c * &q.b) * &ainv);
    let b = -(&(&u.c * &q.c) * &ainv);
    for x in [&a, &b, &u.c, &u.d] {
        ring.check(x)?;
    }
    let p = FPPoint { a, b, c: u.c.clone(), d: u.d.clone(), k_parity: (k % 2) as u8 };
    p.check(q)?;
    Ok(p)
}

pub fn fp_to_unit(p: &FPPoint, q: &QuadPoly) -> Result<BetaElem> {
    p.check(q)?;
    Ok(BetaElem::new(p.c.clone(), p.d.clone()))
}

/// A unit of `R_β` computed from the classical Pell equation, for ℤ-coefficient `Q` over
/// ℤ or ℤ[1/S].
pub fn default_unit(q: &QuadPoly, ring: &Ring) -> Result<BetaElem> {
    let none = || Error::NoGenerator(format!("no default unit for {q} over {ring}"));
    if !ring.is_rational() {
        return Err(none());
    }
    let (Some(a), Some(b), Some(c)) = (q.a.as_integer(), q.b.as_integer(), q.c.as_integer()) else {
        return Err(none());
    };
    if !q.is_irreducible() {
        return Err(Error::Reducible);
    }
    let delta = b * b - BigInt::from(4) * a * c;
    if !delta.is_positive() {
        return Err(none());
    }
    let two = BigInt::from(2);
    let (cc, dd) = if a.is_one() && b.is_even() {
        // √α = β + B/2 with α = Δ/4
        let (x, y, _) = fundamental_pell(&(&delta / 4))?;
        let d = &y + &x * (b / &two);
        (x, d)
    } else {
        // √Δ = 2Aβ + B
        let (x, y, _) = fundamental_pell(&delta)?;
        (&two * a * &x, &y + b * &x)
    };
    Ok(BetaElem::new(RElem::from_bigint(cc), RElem::from_bigint(dd)))
}

/// The first `count` FP points coming from products of the generators, ordered by height.
///
/// With one generator the points come from its powers `u^m`, `m ≥ 1`; with several, from
/// products over nonnegative exponent vectors. A unit of the base ring with relative
/// norm −1 is multiplied in when that is the only way to reach norm `(−1)^k`.
pub fn fp_stream(q: &QuadPoly, k: usize, ring: &Ring, count: usize, gens: &[BetaElem]) -> Result<Vec<FPPoint>> {
    let gens: Vec<BetaElem> = if gens.is_empty() { vec![default_unit(q, ring)?] } else { gens.to_vec() };
    let want = parity_sign(k);
    let minus = RElem::from_int(-1);
    // relative norm of a base unit ζ is ζ², so ζ = i flips the sign
    let flip = ring.unit_generators().ok().and_then(|us| {
        us.into_iter().find(|z| (z * z) == minus)
    });
    for g in &gens {
        let n = g.norm(q);
        if n != RElem::one() && n != minus {
            return Err(Error::NormMismatch { found: n.to_string(), expected: "±1".into() });
        }
    }
    let fix = |u: BetaElem| -> Option<BetaElem> {
        let n = u.norm(q);
        if n == want {
            Some(u)
        } else {
            flip.as_ref().map(|z| u.scale(z))
        }
    };
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<FPPoint> = Vec::new();
    if gens.len() == 1 {
        let g = &gens[0];
        let odd = g.norm(q) == minus;
        if !odd && want == minus && flip.is_none() {
            return Ok(Vec::new());
        }
        let mut u = BetaElem::one();
        let mut m = 0usize;
        while out.len() < count {
            u = u.mul(g, q);
            m += 1;
            if m > 64 * count + 64 {
                break;
            }
            if let Some(v) = fix(u.clone()) {
                if let Ok(p) = unit_to_fp(&v, q, k, ring) {
                    out.push(p);
                }
            }
        }
        return Ok(out);
    }
    let odd_gen = gens.iter().any(|g| g.norm(q) == minus);
    if !odd_gen && want == minus && flip.is_none() {
        return Ok(Vec::new());
    }
    // products of total degree ≤ deg, grown until `count` points exist, plus one more layer
    let mut seen: BTreeSet<BetaElem> = BTreeSet::new();
    let mut layer: Vec<(BetaElem, usize)> = vec![(BetaElem::one(), 0)];
    let mut found_at: Option<usize> = None;
    for deg in 1..=MAX_PRODUCT_DEGREE {
        let mut next = Vec::new();
        for (u, last) in &layer {
            // nondecreasing generator index avoids revisiting permutations
            for (j, g) in gens.iter().enumerate().skip(*last) {
                next.push((u.mul(g, q), j));
            }
        }
        for (u, _) in &next {
            if let Some(v) = fix(u.clone()) {
                if seen.insert(v.clone()) {
                    if let Ok(p) = unit_to_fp(&v, q, k, ring) {
                        out.push(p);
                    }
                }
            }
        }
        layer = next;
        match found_at {
            Some(d) if deg > d => break,
            None if out.len() >= count => found_at = Some(deg),
            _ => {}
        }
    }
    out.sort_by(|x, y| x.height().cmp(&y.height()).then_with(|| x.conic().cmp(&y.conic())));
    out.truncate(count);
    Ok(out)
}

const MAX_PRODUCT_DEGREE: usize = 10;

/// Parse unit literals such as `sqrt(3)+sqrt(2)` into `(β, 1)` coordinates.
pub fn parse_generators(gens: &[String], q: &QuadPoly, ring: &Ring) -> Result<Vec<BetaElem>> {
    let (beta, _) = q.roots()?;
    gens.iter()
        .map(|g| BetaElem::from_relquad(&crate::expr::parse_value(g, ring)?, &beta))
        .collect()
}
