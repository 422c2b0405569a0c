//! Evaluation of periodic continued fractions, the Worpitzky test, and membership of a
//! PCF in the variety cut out by a quadratic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::contmat::{e_matrix, quad_poly, Mat2, Pcf, QuadPoly};
use crate::error::{Error, Result};
use crate::ring::interval::{rational_to_decimal, Interval};
use crate::ring::{Basis, RElem, Radical, RelQuad, Ring};

/// Pair bound in the Worpitzky test: `|c_n·c_{n+1}| ≥ WORPITZKY_PAIR`.
pub const WORPITZKY_PAIR: i64 = 4;

/// Default stopping radius exponent (radius < 10^-30).
pub const DEFAULT_DIGITS: u32 = 30;
/// Default cap on period applications.
pub const DEFAULT_MAX_PERIODS: usize = 10_000;

/// Conjugation under the fixed archimedean embedding (identity for real embeddings).
pub fn emb_conj(x: &RElem) -> RElem {
    if x.basis().is_imaginary() {
        x.conj()
    } else {
        x.clone()
    }
}

/// `|x|²`, an element of the (real) field.
pub fn emb_abs_sq(x: &RElem) -> RElem {
    x * &emb_conj(x)
}

/// Enclosures of real and imaginary parts of `x` at `prec` bits.
pub fn approx(x: &RElem, prec: u32) -> (Interval, Interval) {
    let zero = Interval::exact_int(&BigInt::zero(), prec);
    match x.basis() {
        Basis::Rational => (Interval::from_rational(&x.u(), prec), zero),
        b if b.is_imaginary() => {
            let (re, y) = x.imag_coords();
            let d = BigRational::from_integer((-b.d().unwrap()).into());
            let g = Interval::sqrt_rational(&d, prec);
            (Interval::from_rational(&re, prec), g.mul_rational(&y))
        }
        b => {
            // u + v·ω with ω = √d or (1+√d)/2
            let d = BigRational::from_integer(b.d().unwrap().into());
            let s = Interval::sqrt_rational(&d, prec);
            let (u, v) = (x.u(), x.v());
            let w = match b {
                Basis::HalfSqrt(_) => s.add(&Interval::exact_int(&BigInt::one(), prec)).half(),
                _ => s,
            };
            (Interval::from_rational(&u, prec).add(&w.mul_rational(&v)), zero)
        }
    }
}

/// Decimal rendering of a point of the embedding.
pub fn decimal_parts(x: &RElem, digits: usize) -> (String, String) {
    let prec = (digits as f64 * 3.33) as u32 + 32;
    let (re, im) = approx(x, prec);
    let mid = |i: &Interval| (i.lower() + i.upper()) / BigRational::from_integer(2.into());
    (rational_to_decimal(&mid(&re), digits), rational_to_decimal(&mid(&im), digits))
}

fn abs_sq_ge(x: &RElem, bound: i64) -> bool {
    (&emb_abs_sq(x) - &RElem::from_int(bound)).real_sign() != Ordering::Less
}

/// Whether `|c_n·c_{n+1}| ≥ 4` for all consecutive pairs of the periodic sequence `c`,
/// including the wrap-around pair `(c_k, c_1)`.
pub fn worpitzky_check(c: &[RElem]) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    (0..k).all(|i| abs_sq_ge(&(&c[i] * &c[(i + 1) % k]), WORPITZKY_PAIR * WORPITZKY_PAIR))
}

/// Exact and numeric value of a PCF.
#[derive(Clone, Debug)]
pub struct PcfValue {
    pub exact: Option<RelQuad>,
    /// Center of the enclosing disk, an element of the fraction field.
    pub center: RElem,
    /// Square of the disk radius.
    pub radius_sq: RElem,
    /// Whether the disk provably contains the value (Worpitzky tail bound).
    pub rigorous: bool,
    pub converged: bool,
    pub periods: usize,
    /// Truncations whose value was ∞ (denominator zero).
    pub infinite_truncations: usize,
}

impl PcfValue {
    pub fn radius_f64(&self) -> f64 {
        let (r, _) = self.radius_sq.to_c64();
        r.max(0.0).sqrt()
    }

    /// Whether the radius is below `10^-digits`.
    pub fn radius_below(&self, digits: u32) -> bool {
        let bound = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 2 * digits as usize));
        (&RElem::from_ratio(&bound) - &self.radius_sq).real_sign() == Ordering::Greater
    }
}

#[derive(Serialize)]
pub struct NumericJson {
    pub re: String,
    pub im: String,
    pub radius: String,
    pub rigorous: bool,
}

impl PcfValue {
    pub fn numeric_json(&self, digits: usize) -> NumericJson {
        let (re, im) = decimal_parts(&self.center, digits);
        NumericJson { re, im, radius: format!("{:.3e}", self.radius_f64()), rigorous: self.rigorous }
    }
}

/// The attracting fixed point of the period matrix pushed through the preperiod, for
/// rings whose fraction field is ℚ or imaginary quadratic.
pub fn evaluate_exact(p: &Pcf, ring: &Ring) -> Result<RelQuad> {
    if ring.is_real_quadratic() {
        return Err(Error::Unsupported("exact evaluation over a real quadratic ring".into()));
    }
    let w = p.period_matrix();
    if w.e21.is_zero() {
        return Err(Error::NonConvergent);
    }
    let tr = w.trace();
    let delta = &(&tr * &tr) - &(&RElem::from_int(4) * &w.det());
    if delta.is_zero() {
        return Err(Error::NonConvergent);
    }
    let sq = RelQuad::sqrt_of(delta.clone());
    // eigenvalues (tr ± √Δ)/2; |λ+|² − |λ−|² has the sign of Re(conj(tr)·√Δ)
    let dominance = {
        let z = sq.scale(&emb_conj(&tr));
        let zero = RElem::zero();
        let rad = Radical::new(if z.in_base().is_some() { &zero } else { z.delta() }, &ring.absd());
        rad.sign(&rad.re_form(&z))
    };
    let root = match dominance {
        Ordering::Greater => sq,
        Ordering::Less => sq.neg(),
        Ordering::Equal => return Err(Error::NonConvergent),
    };
    let inv = (&RElem::from_int(2) * &w.e21).inv()?;
    let beta = root.add_base(&(&w.e11 - &w.e22)).scale(&inv);
    let pre = p.pre_matrix();
    beta.mobius([&pre.e11, &pre.e12, &pre.e21, &pre.e22])
}

/// Enclosing disk for the value of `M·τ` where the tail τ satisfies `|1/τ| ≤ r`,
/// `r² = r_sq`. Returns `None` when the disk would contain the pole.
fn worpitzky_disk(m: &Mat2, r_sq: &RElem) -> Option<(RElem, RElem)> {
    // f(w) = (M11 + M12·w)/(M21 + M22·w) over |w| ≤ r
    let den = &emb_abs_sq(&m.e21) - &(r_sq * &emb_abs_sq(&m.e22));
    if den.real_sign() != Ordering::Greater {
        return None;
    }
    let inv = den.inv().ok()?;
    let num = &(&m.e11 * &emb_conj(&m.e21)) - &(r_sq * &(&m.e12 * &emb_conj(&m.e22)));
    let center = &num * &inv;
    let det_sq = emb_abs_sq(&m.det());
    let radius_sq = &(&(r_sq * &det_sq) * &inv) * &inv;
    Some((center, radius_sq))
}

/// Numeric evaluation by truncation. Stops once the radius drops below `10^-digits` or
/// after `max_periods` applications of the period.
pub fn evaluate_numeric(p: &Pcf, digits: u32, max_periods: usize) -> PcfValue {
    let worp = worpitzky_check(&p.a);
    let k = p.k();
    let mut m = p.pre_matrix();
    let mut infinite = 0usize;
    let target = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 2 * digits as usize));
    let target = RElem::from_ratio(&target);
    let mut last: Option<(RElem, RElem)> = None;
    let mut periods = 0;
    // |1/τ| ≤ |a_k|/2 for the tail following a_k
    let r_sq = {
        let ak = &p.a[k - 1];
        &emb_abs_sq(ak) * &RElem::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(4)))
    };
    for j in 1..=max_periods {
        for x in &p.a {
            m = m.mul_d(x);
            if m.e21.is_zero() {
                infinite += 1;
            }
        }
        periods = j;
        let disk = if worp {
            worpitzky_disk(&m, &r_sq)
        } else if !m.e21.is_zero() && !m.e22.is_zero() {
            // consecutive convergents differ by 1/|q_n·q_{n−1}|
            let c = m.e11.checked_div(&m.e21).ok();
            let qq = emb_abs_sq(&(&m.e21 * &m.e22));
            c.zip(qq.inv().ok())
        } else {
            None
        };
        if let Some((c, r2)) = disk {
            let done = (&target - &r2).real_sign() == Ordering::Greater;
            last = Some((c, r2));
            if done {
                break;
            }
        }
    }
    let (center, radius_sq, reached) = match last {
        Some((c, r2)) => {
            let ok = (&target - &r2).real_sign() == Ordering::Greater;
            (c, r2, ok)
        }
        None => (RElem::zero(), RElem::from_int(-1), false),
    };
    PcfValue {
        exact: None,
        center,
        radius_sq,
        rigorous: worp,
        converged: reached,
        periods,
        infinite_truncations: infinite,
    }
}

/// Full evaluation: exact value when available, numeric enclosure always.
pub fn evaluate(p: &Pcf, ring: &Ring) -> Result<PcfValue> {
    evaluate_with(p, ring, DEFAULT_DIGITS, DEFAULT_MAX_PERIODS)
}

pub fn evaluate_with(p: &Pcf, ring: &Ring, digits: u32, max_periods: usize) -> Result<PcfValue> {
    let exact = if ring.is_real_quadratic() { None } else { Some(evaluate_exact(p, ring)?) };
    let mut v = evaluate_numeric(p, digits, max_periods);
    v.exact = exact;
    Ok(v)
}

/// Whether `Quad(p)` is a nonzero multiple of `q` (same root multiset).
pub fn membership(p: &Pcf, q: &QuadPoly) -> bool {
    let e = e_matrix(p);
    membership_of_matrix(&e, q)
}

pub fn membership_of_matrix(e: &Mat2, q: &QuadPoly) -> bool {
    let pq = crate::contmat::quad_of_matrix(e);
    !pq.is_zero() && pq.proportional(q)
}

/// `quad_poly(p)` re-exported for callers that only use this module.
pub fn quad(p: &Pcf) -> QuadPoly {
    quad_poly(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contmat::eigen_check;
    use crate::ring::QuadIrr;

    fn ints(v: &[i64]) -> Vec<RElem> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn worpitzky_examples() {
        assert!(worpitzky_check(&ints(&[3, 3, 3])));
        assert!(!worpitzky_check(&ints(&[1, 2])));
        assert!(worpitzky_check(&ints(&[2, 2, 2])));
        // wrap-around pair (1, 5) fails
        assert!(!worpitzky_check(&ints(&[1, 5, 1])));
    }

    #[test]
    fn exact_values() {
        let z = Ring::integers();
        let g = QuadIrr::from_i64(1, 1, 2, 5).unwrap();
        assert_eq!(evaluate_exact(&Pcf::from_i64(&[], &[1]), &z).unwrap(), g.to_relquad());
        let s2 = QuadIrr::sqrt(2).unwrap().to_relquad();
        assert_eq!(evaluate_exact(&Pcf::from_i64(&[1], &[2]), &z).unwrap(), s2);
        let s3 = QuadIrr::sqrt(3).unwrap().to_relquad();
        let p = Pcf::from_i64(&[2], &[-4, 4]);
        assert_eq!(evaluate_exact(&p, &z).unwrap(), s3);
        assert!(eigen_check(&p, &s3));
        assert_eq!(evaluate_exact(&Pcf::from_i64(&[], &[2, -2]), &z), Err(Error::NonConvergent));
    }

    #[test]
    fn numeric_contains_exact() {
        let z = Ring::integers();
        let v = evaluate(&Pcf::from_i64(&[1], &[2]), &z).unwrap();
        assert!(v.rigorous && v.converged);
        let (re, _) = decimal_parts(&v.center, 20);
        assert!(re.starts_with("1.414213562373095048"), "{re}");
        let golden = evaluate(&Pcf::from_i64(&[], &[1]), &z).unwrap();
        assert!(!golden.rigorous && golden.converged);
        assert!(decimal_parts(&golden.center, 10).0.starts_with("1.618033988"));
    }

    #[test]
    fn parabolic_period_is_slow() {
        let v = evaluate_numeric(&Pcf::from_i64(&[], &[2, -2]), 20, 1000);
        assert!(v.rigorous);
        assert!(!v.converged);
    }

    #[test]
    fn gaussian_value() {
        let g = Ring::gaussian();
        let i = g.elem(0, 1);
        let p = Pcf::new(vec![], vec![&RElem::from_int(3) + &i]).unwrap();
        let x = evaluate(&p, &g).unwrap();
        let exact = x.exact.clone().unwrap();
        assert!(eigen_check(&p, &exact));
        let (er, ei) = exact.to_c64();
        let (cr, ci) = x.center.to_c64();
        assert!((er - cr).abs() < 1e-12 && (ei - ci).abs() < 1e-12);
        // x = 3 + i + 1/x has the root with |x| > 1
        assert!(er * er + ei * ei > 1.0);
    }

    #[test]
    fn membership_examples() {
        let q = QuadPoly::from_i64(1, 0, -2);
        assert!(membership(&Pcf::from_i64(&[1], &[2]), &q));
        assert!(!membership(&Pcf::from_i64(&[], &[2]), &q));
        assert!(membership(&Pcf::from_i64(&[], &[1]), &QuadPoly::from_i64(2, -2, -2)));
    }
}
