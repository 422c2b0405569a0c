//! Bounded-height solutions of the factorization varieties
//! `A = D(y1)⋯D(yN)·D(x1)⋯D(xk)·t·D(−yN)⋯D(−y1)·t^(k+1)` for `N ∈ {0, 1}`, the linear
//! isomorphism between the `N = 1` and `N = 0` varieties, and Fermat–Pell fibers.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::contmat::{e_matrix, Mat2, Pcf, QuadPoly};
use crate::error::{Error, Result};
use crate::pcf::membership;
use crate::pell::FPPoint;
use crate::ring::{RElem, Ring};

/// Default cap on backtracking nodes.
pub const DEFAULT_NODE_LIMIT: u128 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorProblem {
    pub a: Mat2,
    pub n: usize,
    pub k: usize,
    pub h: u64,
    pub ring: Ring,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FactorSolution {
    pub y: Vec<RElem>,
    pub x: Vec<RElem>,
}

impl FactorSolution {
    pub fn coords(&self) -> Vec<RElem> {
        self.y.iter().chain(&self.x).cloned().collect()
    }

    pub fn to_pcf(&self) -> Result<Pcf> {
        Pcf::new(self.y.clone(), self.x.clone())
    }
}

impl fmt::Display for FactorSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", c.join(","))
    }
}

/// `D(c1)⋯D(cm)`.
pub fn word(cs: &[RElem]) -> Mat2 {
    cs.iter().fold(Mat2::identity(), |m, x| m.mul_d(x))
}

/// The right-hand side of the defining equation for `(y; x)`.
pub fn vbar_matrix(y: &[RElem], x: &[RElem]) -> Mat2 {
    let mut m = word(y);
    for c in x {
        m = m.mul_d(c);
    }
    m = m.mul_t();
    for c in y.iter().rev() {
        m = m.mul_d(&-c);
    }
    if x.len().is_multiple_of(2) {
        m.mul_t()
    } else {
        m
    }
}

/// `(b1, a1, …, ak) ↦ (b1, a1, …, a_{k−1}, ak − b1)`.
pub fn phi_iso(sol: &FactorSolution) -> FactorSolution {
    assert_eq!(sol.y.len(), 1, "phi is defined for one preperiod coordinate");
    let b = &sol.y[0];
    let mut x = vec![b.clone()];
    x.extend(sol.x.iter().cloned());
    let last = x.len() - 1;
    x[last] = &x[last] - b;
    FactorSolution { y: Vec::new(), x }
}

pub fn phi_inv(sol: &FactorSolution) -> FactorSolution {
    assert!(sol.y.is_empty() && sol.x.len() >= 2, "phi⁻¹ needs an N = 0 point with k ≥ 2");
    let b = sol.x[0].clone();
    let mut a: Vec<RElem> = sol.x[1..].to_vec();
    let last = a.len() - 1;
    a[last] = &a[last] + &b;
    FactorSolution { y: vec![b], x: a }
}

fn within(x: &RElem, h: Option<u64>) -> bool {
    h.is_none_or(|h| x.height_u64() <= h)
}

/// Residual feasibility once two factors remain: `D(x)D(y) = [[xy+1, x], [y, 1]]`.
fn close_two(r: &Mat2, hx: Option<u64>, hy: Option<u64>, ring: &Ring) -> Option<[RElem; 2]> {
    if !r.e22.is_one() {
        return None;
    }
    let (x, y) = (r.e12.clone(), r.e21.clone());
    if !ring.contains(&x) || !ring.contains(&y) || !within(&x, hx) || !within(&y, hy) {
        return None;
    }
    (r.e11 == &(&x * &y) + &RElem::one()).then_some([x, y])
}

fn close_one(r: &Mat2, h: Option<u64>, ring: &Ring) -> Option<RElem> {
    let ok = r.e12.is_one() && r.e21.is_one() && r.e22.is_zero();
    (ok && ring.contains(&r.e11) && within(&r.e11, h)).then(|| r.e11.clone())
}

/// Candidates of height ≤ h, nearest first to the continuant quotient `R11/R21`.
fn seeded(cands: &[RElem], r: &Mat2) -> Vec<RElem> {
    if r.e21.is_zero() {
        return cands.to_vec();
    }
    let (a, b) = r.e11.to_c64();
    let (c, d) = r.e21.to_c64();
    let den = c * c + d * d;
    let (qr, qi) = ((a * c + b * d) / den, (b * c - a * d) / den);
    let mut keyed: Vec<(f64, &RElem)> = cands
        .iter()
        .map(|x| {
            let (u, v) = x.to_c64();
            let dist = (u - qr).hypot(v - qi);
            (if dist.is_finite() { dist } else { f64::MAX }, x)
        })
        .collect();
    keyed.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| p.1.cmp(q.1)));
    keyed.into_iter().map(|(_, x)| x.clone()).collect()
}

struct WordSearch<'a> {
    ring: &'a Ring,
    cands: Vec<RElem>,
    bounds: Vec<Option<u64>>,
}

impl WordSearch<'_> {
    fn go(&self, r: &Mat2, level: usize, prefix: &mut Vec<RElem>, out: &mut Vec<Vec<RElem>>) {
        let k = self.bounds.len();
        let left = k - level;
        debug_assert_eq!(r.det(), RElem::from_int(if left.is_multiple_of(2) { 1 } else { -1 }));
        match left {
            0 => {
                if r == &Mat2::identity() {
                    out.push(prefix.clone());
                }
            }
            1 => {
                if let Some(x) = close_one(r, self.bounds[level], self.ring) {
                    prefix.push(x);
                    out.push(prefix.clone());
                    prefix.pop();
                }
            }
            2 => {
                if let Some([x, y]) = close_two(r, self.bounds[level], self.bounds[level + 1], self.ring) {
                    prefix.extend([x, y]);
                    out.push(prefix.clone());
                    prefix.truncate(prefix.len() - 2);
                }
            }
            _ => {
                for x in seeded(&self.cands, r) {
                    let next = r.peel_d(&x);
                    prefix.push(x);
                    self.go(&next, level + 1, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Estimated backtracking nodes for a word of length `k` over a box of `box_size`.
pub fn word_nodes(box_size: u128, k: usize) -> u128 {
    box_size.saturating_pow(k.saturating_sub(2) as u32)
}

/// All `(c1,…,ck)` with `D(c1)⋯D(ck) = target`, `ci ∈ ring`, and `height(ci) ≤ bounds[i]`
/// (`None` = unbounded; only allowed for the last two positions). Sorted.
pub fn solve_word(target: &Mat2, ring: &Ring, h: u64, bounds: &[Option<u64>], node_limit: u128) -> Result<Vec<Vec<RElem>>> {
    let k = bounds.len();
    if k == 0 {
        return Ok(if target == &Mat2::identity() { vec![Vec::new()] } else { Vec::new() });
    }
    if bounds[..k.saturating_sub(2)].iter().any(Option::is_none) {
        return Err(Error::Precondition("only the last two coordinates may be unbounded".into()));
    }
    let want = RElem::from_int(if k.is_multiple_of(2) { 1 } else { -1 });
    if target.det() != want {
        return Err(Error::DetMismatch(format!("{} (word of length {k})", target.det())));
    }
    let est = word_nodes(ring.box_size(h), k);
    if est > node_limit {
        return Err(Error::BudgetExceeded { estimated: est, limit: node_limit });
    }
    let search = WordSearch { ring, cands: ring.box_elements(h), bounds: bounds.to_vec() };
    let mut out: Vec<Vec<RElem>> = if k <= 2 {
        let mut v = Vec::new();
        search.go(target, 0, &mut Vec::new(), &mut v);
        v
    } else {
        // independent root branches
        search
            .cands
            .par_iter()
            .filter(|x| within(x, bounds[0]))
            .flat_map_iter(|x| {
                let mut v = Vec::new();
                search.go(&target.peel_d(x), 1, &mut vec![x.clone()], &mut v);
                v
            })
            .collect()
    };
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_det(p: &FactorProblem) -> Result<()> {
    let det = p.a.det();
    if !det.is_one() {
        return Err(Error::DetMismatch(det.to_string()));
    }
    if p.n > 1 {
        return Err(Error::Unsupported(format!("preperiod length {} (only 0 and 1)", p.n)));
    }
    if p.k == 0 {
        return Err(Error::Precondition("period length must be positive".into()));
    }
    Ok(())
}

pub fn vbar_solve(p: &FactorProblem) -> Result<Vec<FactorSolution>> {
    vbar_solve_with(p, DEFAULT_NODE_LIMIT)
}

/// Solutions of height ≤ H, sorted.
pub fn vbar_solve_with(p: &FactorProblem, node_limit: u128) -> Result<Vec<FactorSolution>> {
    check_det(p)?;
    let target = p.a.mul(&Mat2::t_pow(p.k + p.n));
    let h = Some(p.h);
    if p.n == 0 {
        let sols = solve_word(&target, &p.ring, p.h, &vec![h; p.k], node_limit)?;
        return Ok(sols.into_iter().map(|x| FactorSolution { y: Vec::new(), x }).collect());
    }
    // N = 1 through the N = 0 variety in k + 1 coordinates; a_k = z_{k+1} + z_1 is
    // bounded after pulling back
    let mut bounds = vec![h; p.k + 1];
    bounds[p.k] = None;
    let sols = solve_word(&target, &p.ring, p.h, &bounds, node_limit)?;
    let mut out: Vec<FactorSolution> = sols
        .into_iter()
        .map(|x| phi_inv(&FactorSolution { y: Vec::new(), x }))
        .filter(|s| s.x.last().is_none_or(|a| a.height_u64() <= p.h))
        .collect();
    out.sort();
    Ok(out)
}

/// Exhaustive sweep over the whole height box; reference for [`vbar_solve`].
pub fn naive_vbar_solve(p: &FactorProblem) -> Result<Vec<FactorSolution>> {
    check_det(p)?;
    let cands = p.ring.box_elements(p.h);
    let m = p.n + p.k;
    let total = cands.len().pow(m as u32);
    let mut out: Vec<FactorSolution> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut c = Vec::with_capacity(m);
            for _ in 0..m {
                c.push(cands[idx % cands.len()].clone());
                idx /= cands.len();
            }
            c.reverse();
            let (y, x) = c.split_at(p.n);
            (vbar_matrix(y, x) == p.a).then(|| FactorSolution { y: y.to_vec(), x: x.to_vec() })
        })
        .collect();
    out.sort();
    Ok(out)
}

/// PCF points of type `(N, k)` and height ≤ H whose `E` matrix is the FP point `pt`.
pub fn fiber_solve(pt: &FPPoint, q: &QuadPoly, n: usize, k: usize, h: u64, ring: &Ring) -> Result<Vec<Pcf>> {
    fiber_solve_with(pt, q, n, k, h, ring, DEFAULT_NODE_LIMIT)
}

pub fn fiber_solve_with(
    pt: &FPPoint,
    q: &QuadPoly,
    n: usize,
    k: usize,
    h: u64,
    ring: &Ring,
    node_limit: u128,
) -> Result<Vec<Pcf>> {
    let e = pt.matrix();
    let prob = FactorProblem { a: e.mul(&Mat2::t_pow(k)), n, k, h, ring: ring.clone() };
    let mut out = Vec::new();
    for s in vbar_solve_with(&prob, node_limit)? {
        let p = s.to_pcf()?;
        if e_matrix(&p) != e {
            return Err(Error::Invariant(format!("E({p}) differs from the fiber point")));
        }
        if membership(&p, q) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(a: Mat2, n: usize, k: usize, h: u64) -> FactorProblem {
        FactorProblem { a, n, k, h, ring: Ring::integers() }
    }

    fn sol(y: &[i64], x: &[i64]) -> FactorSolution {
        FactorSolution { y: y.iter().map(|&v| v.into()).collect(), x: x.iter().map(|&v| v.into()).collect() }
    }

    #[test]
    fn small_words() {
        let d5t = Mat2::from_i64([5, 1, 1, 0]).mul_t();
        assert_eq!(vbar_solve(&prob(d5t, 0, 1, 9)).unwrap(), vec![sol(&[], &[5])]);
        let a = Mat2::from_i64([1, 2, 1, 1]).mul_t();
        assert!(vbar_solve(&prob(a, 1, 1, 3)).unwrap().contains(&sol(&[1], &[2])));
        assert_eq!(vbar_solve(&prob(Mat2::identity(), 0, 2, 5)).unwrap(), vec![sol(&[], &[0, 0])]);
        assert!(matches!(vbar_solve(&prob(Mat2::t(), 0, 2, 5)), Err(Error::DetMismatch(_))));
    }

    #[test]
    fn phi_round_trip() {
        let s = sol(&[1], &[2]);
        assert_eq!(phi_iso(&s), sol(&[], &[1, 1]));
        assert_eq!(phi_inv(&phi_iso(&s)), s);
        assert_eq!(phi_iso(&sol(&[0], &[3, 4])), sol(&[], &[0, 3, 4]));
    }

    #[test]
    fn matches_sweep() {
        let a = vbar_matrix(&[2.into()], &[3.into(), (-4).into(), 1.into()]);
        let p = prob(a, 1, 3, 4);
        assert_eq!(vbar_solve(&p).unwrap(), naive_vbar_solve(&p).unwrap());
    }
}
