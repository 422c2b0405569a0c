//! Nearest-integer continued fractions over ℤ: expansion with exact periodicity
//! detection, validity conditions, and the evaluate/re-expand uniqueness probe.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::contmat::Pcf;
use crate::error::{Error, Result};
use crate::ring::{nearest_rational, QuadIrr, RElem, RelQuad, Ring};

/// A nearest-integer expansion `[c1, …; overline{period}]`; an empty period means the
/// expansion is finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NicfExpansion<T> {
    pub preperiod: Vec<T>,
    pub period: Vec<T>,
    pub terminated: bool,
}

pub type Nicf = NicfExpansion<BigInt>;

impl<T: Clone + PartialEq> NicfExpansion<T> {
    pub fn periodic(preperiod: Vec<T>, period: Vec<T>) -> Self {
        NicfExpansion { preperiod, period, terminated: false }
    }

    pub fn finite(terms: Vec<T>) -> Self {
        NicfExpansion { preperiod: terms, period: Vec::new(), terminated: true }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// First `n` terms of the (possibly infinite) sequence.
    pub fn terms(&self, n: usize) -> Vec<T> {
        let mut out: Vec<T> = self.preperiod.iter().take(n).cloned().collect();
        if !self.period.is_empty() {
            while out.len() < n {
                let i = (out.len() - self.preperiod.len()) % self.period.len();
                out.push(self.period[i].clone());
            }
        }
        out
    }

    /// Minimal period, with the preperiod shortened as far as the period allows.
    pub fn canonical(&self) -> Self {
        let mut pre = self.preperiod.clone();
        let mut per = self.period.clone();
        let k = per.len();
        if k == 0 {
            return self.clone();
        }
        if let Some(m) = (1..=k).find(|&m| k.is_multiple_of(m) && (0..k).all(|i| per[i] == per[i % m])) {
            per.truncate(m);
        }
        while let Some(last) = pre.last() {
            if *last != per[per.len() - 1] {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        NicfExpansion { preperiod: pre, period: per, terminated: false }
    }
}

impl<T: fmt::Display> fmt::Display for NicfExpansion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if self.period.is_empty() {
            write!(f, "[{}]", j(&self.preperiod))
        } else {
            write!(f, "[{}; {}]", j(&self.preperiod), j(&self.period))
        }
    }
}

impl Nicf {
    pub fn to_pcf(&self) -> Result<Pcf> {
        let e = |v: &[BigInt]| v.iter().cloned().map(RElem::from_bigint).collect::<Vec<_>>();
        Pcf::new(e(&self.preperiod), e(&self.period))
    }
}

/// Expand a rational or a real quadratic irrational.
pub fn nicf_expand(x: &RelQuad, max_steps: usize) -> Result<Nicf> {
    if let Some(q) = x.in_base() {
        let q = q.as_rational().ok_or_else(|| Error::Unsupported(format!("{x} is not real")))?;
        return expand_rational(&q, max_steps);
    }
    let q = QuadIrr::from_relquad(x)?;
    if !q.is_real() {
        return Err(Error::Unsupported(format!("{x} is not real")));
    }
    expand_quadratic(&q, max_steps)
}

pub fn expand_rational(x: &BigRational, max_steps: usize) -> Result<Nicf> {
    let mut terms = Vec::new();
    let mut x = x.clone();
    for _ in 0..max_steps {
        let c = nearest_rational(&x);
        let rem = &x - BigRational::from_integer(c.clone());
        terms.push(c);
        if rem.is_zero() {
            return Ok(Nicf::finite(terms));
        }
        x = rem.recip();
    }
    Err(Error::StepBudgetExceeded(max_steps))
}

pub fn expand_quadratic(x: &QuadIrr, max_steps: usize) -> Result<Nicf> {
    let mut seen: HashMap<QuadIrr, usize> = HashMap::new();
    let mut terms = Vec::new();
    let mut state = x.clone();
    for step in 0..max_steps {
        if let Some(&first) = seen.get(&state) {
            let period = terms[first..step].to_vec();
            terms.truncate(first);
            return Ok(Nicf::periodic(terms, period));
        }
        seen.insert(state.clone(), step);
        let c = state.nearest();
        state = state.sub_int_inv(&c);
        terms.push(c);
    }
    Err(Error::StepBudgetExceeded(max_steps))
}

/// Validity: `|c_i| ≥ 2` for `i > 1`; a term `±2` (not last) is followed by a
/// term of the same sign; a finite expansion does not end in `−2`.
pub fn hurwitz_valid(e: &Nicf) -> bool {
    let two = BigInt::from(2);
    let n_pre = e.preperiod.len();
    let k = e.period.len();
    let total = if k == 0 { n_pre } else { n_pre + k };
    if total == 0 {
        return false;
    }
    // for periodic input, one extra term covers the wrap-around successor
    let terms = if k == 0 { e.preperiod.clone() } else { e.terms(n_pre + k + 1) };
    if terms[1..total].iter().any(|t| t.abs() < two) {
        return false;
    }
    for i in 0..total {
        let has_next = i + 1 < terms.len();
        if i >= 1 && has_next && terms[i].abs() == two && terms[i].signum() != terms[i + 1].signum() {
            return false;
        }
    }
    if k == 0 && total > 1 && terms[total - 1] == -two {
        return false;
    }
    true
}

/// Evaluate the expansion exactly.
pub fn evaluate(e: &Nicf) -> Result<RelQuad> {
    if e.is_finite() {
        let mut acc: Option<BigRational> = None;
        for c in e.preperiod.iter().rev() {
            let c = BigRational::from_integer(c.clone());
            acc = Some(match acc {
                None => c,
                Some(a) if a.is_zero() => return Err(Error::DivisionByZero),
                Some(a) => c + a.recip(),
            });
        }
        let v = acc.ok_or_else(|| Error::Precondition("empty expansion".into()))?;
        return Ok(RelQuad::from_base(RElem::from_ratio(&v)));
    }
    crate::pcf::evaluate_exact(&e.to_pcf()?, &Ring::integers())
}

/// Evaluate, re-expand and compare with the canonical form of `e`.
pub fn uniqueness_probe(e: &Nicf) -> Result<bool> {
    if !hurwitz_valid(e) {
        return Err(Error::Precondition(format!("{e} violates the nearest-integer conditions")));
    }
    let v = evaluate(e)?;
    let steps = 4 * (e.preperiod.len() + e.period.len()) + 64;
    let back = nicf_expand(&v, steps)?;
    Ok(back == e.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nicf(pre: &[i64], per: &[i64]) -> Nicf {
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect();
        if per.is_empty() {
            Nicf::finite(b(pre))
        } else {
            Nicf::periodic(b(pre), b(per))
        }
    }

    fn expand_str(s: &str) -> Nicf {
        let v = crate::expr::parse_value(s, &Ring::integers()).unwrap();
        nicf_expand(&v, 1000).unwrap()
    }

    #[test]
    fn expansions() {
        assert_eq!(expand_str("sqrt(2)"), nicf(&[1], &[2]));
        assert_eq!(expand_str("sqrt(3)"), nicf(&[2], &[-4, 4]));
        assert_eq!(expand_str("(1+sqrt(5))/2"), nicf(&[2], &[-3, 3]));
        assert_eq!(expand_str("5/2"), nicf(&[2, 2], &[]));
        assert_eq!(expand_str("-7/3"), nicf(&[-2, -3], &[]));
    }

    #[test]
    fn validity() {
        assert!(hurwitz_valid(&nicf(&[1], &[2])));
        assert!(!hurwitz_valid(&nicf(&[3, 2, -5], &[])));
        assert!(!hurwitz_valid(&nicf(&[4, -2], &[])));
        // wrap-around: period [2, -3] has 2 followed by -3
        assert!(!hurwitz_valid(&nicf(&[5], &[-3, 2])));
        assert!(hurwitz_valid(&nicf(&[5], &[3, 2])));
        assert!(!hurwitz_valid(&nicf(&[5], &[1, 3])));
    }

    #[test]
    fn round_trips() {
        assert!(uniqueness_probe(&nicf(&[1], &[2])).unwrap());
        assert!(uniqueness_probe(&nicf(&[2], &[-4, 4])).unwrap());
        assert!(uniqueness_probe(&nicf(&[], &[5, 7])).unwrap());
        assert!(uniqueness_probe(&nicf(&[3, -5, 4], &[])).unwrap());
    }

    #[test]
    fn canonical_form_absorbs_tails() {
        assert_eq!(nicf(&[3, 5], &[7, 5]).canonical(), nicf(&[3], &[5, 7]));
        assert_eq!(nicf(&[3], &[4, 4, 4]).canonical(), nicf(&[3], &[4]));
        assert_eq!(nicf(&[4, 4], &[4]).canonical(), nicf(&[], &[4]));
    }
}
