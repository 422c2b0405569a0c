//! Integral-point experiments: exhaustive degeneracy scans, density certificates over
//! harvested Fermat–Pell fibers, and the bounded-height unit/point bijection check.

use std::collections::{BTreeSet, HashSet};
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::contmat::{quad_of_matrix, Mat2, Pcf, QuadPoly};
use crate::error::{Error, Result};
use crate::factor::{fiber_solve_with, vbar_solve_with, word_nodes, FactorProblem};
use crate::gauss::fundamental_cell;
use crate::linalg::rank;
use crate::pell::{fp_stream, fp_to_unit, unit_to_fp, BetaElem, FPPoint};
use crate::ring::{RElem, Ring};

/// Over ℤ a coordinate is interior when `|c| > INTERIOR_ABS_Z`.
pub const INTERIOR_ABS_Z: i64 = 2;
/// Over imaginary orders a coordinate is interior when `|c|² ≥ INTERIOR_ABS_SQ_IMAG` and `c ∉ M`.
pub const INTERIOR_ABS_SQ_IMAG: i64 = 4;
/// Bound on interior points: at most one PCF per root.
pub const MAX_INTERIOR: usize = 2;

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub node_limit: u128,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { node_limit: crate::factor::DEFAULT_NODE_LIMIT, time_limit: None }
    }
}

struct Deadline {
    at: Option<Instant>,
    secs: u64,
    hit: AtomicBool,
}

impl Deadline {
    fn new(b: &Budget) -> Self {
        Deadline {
            at: b.time_limit.map(|d| Instant::now() + d),
            secs: b.time_limit.map_or(0, |d| d.as_secs()),
            hit: AtomicBool::new(false),
        }
    }

    fn expired(&self) -> bool {
        if self.hit.load(AtomicOrdering::Relaxed) {
            return true;
        }
        let late = self.at.is_some_and(|t| Instant::now() > t);
        if late {
            self.hit.store(true, AtomicOrdering::Relaxed);
        }
        late
    }

    fn check(&self) -> Result<()> {
        if self.hit.load(AtomicOrdering::Relaxed) {
            Err(Error::TimeLimitExceeded(self.secs))
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub ring: Ring,
    pub quad: Option<String>,
    pub matrix: Option<String>,
    pub n: usize,
    pub k: usize,
    pub h: u64,
    pub total_points: usize,
    pub boundary_points: usize,
    pub interior_points: Vec<String>,
    /// Interior count within MAX_INTERIOR.
    pub holds: bool,
    pub elapsed_ms: u128,
}

/// Per-candidate interior predicate for the ring.
fn interior_flags(ring: &Ring, cands: &[RElem]) -> Result<Vec<bool>> {
    if ring.is_integers() {
        let lim = BigInt::from(INTERIOR_ABS_Z);
        return Ok(cands.iter().map(|c| c.as_integer().is_some_and(|v| v.abs() > lim)).collect());
    }
    if ring.is_imaginary() {
        let cell = fundamental_cell(ring)?;
        let lim = BigRational::from_integer(INTERIOR_ABS_SQ_IMAG.into());
        return Ok(cands.par_iter().map(|c| ring.abs_sq(c) >= lim && !cell.in_m(c)).collect());
    }
    Err(Error::WrongRing(format!("degeneracy scans run over Z or imaginary quadratic orders, not {ring}")))
}

struct Scan<'a> {
    q: &'a QuadPoly,
    n: usize,
    m: usize,
    cands: Vec<RElem>,
    interior: Vec<bool>,
}

#[derive(Default)]
struct Tally {
    total: usize,
    boundary: usize,
    interior: Vec<Vec<usize>>,
}

impl Scan<'_> {
    fn go(&self, m: &Mat2, pre_inv: Option<&Mat2>, idx: &mut Vec<usize>, t: &mut Tally) {
        let depth = idx.len();
        if depth == self.n && pre_inv.is_none() {
            // P⁻¹ for P = D(b1)⋯D(bN), det P = (−1)^N
            let s = if self.n.is_multiple_of(2) { RElem::one() } else { RElem::from_int(-1) };
            let inv = Mat2::new(&m.e22 * &s, -(&m.e12 * &s), -(&m.e21 * &s), &m.e11 * &s);
            return self.go(m, Some(&inv), idx, t);
        }
        if depth == self.m {
            let e = m.mul(pre_inv.expect("preperiod done"));
            let quad = quad_of_matrix(&e);
            if quad.is_zero() || !quad.proportional(self.q) {
                return;
            }
            t.total += 1;
            if idx.iter().all(|&i| self.interior[i]) {
                t.interior.push(idx.clone());
            } else {
                t.boundary += 1;
            }
            return;
        }
        for (i, c) in self.cands.iter().enumerate() {
            idx.push(i);
            self.go(&m.mul_d(c), pre_inv, idx, t);
            idx.pop();
        }
    }
}

/// Exhaustive scan of `V(ℬ)_{N,k}` at height ≤ H, classified by the interior predicate.
pub fn degeneracy_scan(q: &QuadPoly, n: usize, k: usize, h: u64, ring: &Ring, budget: &Budget) -> Result<ScanReport> {
    let start = Instant::now();
    if n + k <= 2 || k == 0 {
        return Err(Error::Precondition(format!("N + k = {} must exceed 2", n + k)));
    }
    let cands = ring.box_elements(h);
    let est = (cands.len() as u128).saturating_pow((n + k) as u32);
    if est > budget.node_limit {
        return Err(Error::BudgetExceeded { estimated: est, limit: budget.node_limit });
    }
    let interior = interior_flags(ring, &cands)?;
    let scan = Scan { q, n, m: n + k, cands, interior };
    let deadline = Deadline::new(budget);
    let tallies: Vec<Tally> = (0..scan.cands.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            if deadline.expired() {
                return t;
            }
            let m = Mat2::identity().mul_d(&scan.cands[i]);
            let mut idx = vec![i];
            if n == 0 {
                let id = Mat2::identity();
                scan.go(&m, Some(&id), &mut idx, &mut t);
            } else {
                scan.go(&m, None, &mut idx, &mut t);
            }
            t
        })
        .collect();
    deadline.check()?;
    let mut total = 0;
    let mut boundary = 0;
    let mut interior_idx = Vec::new();
    for t in tallies {
        total += t.total;
        boundary += t.boundary;
        interior_idx.extend(t.interior);
    }
    interior_idx.sort();
    let interior_points: Vec<String> = interior_idx
        .iter()
        .map(|ix| {
            let c: Vec<RElem> = ix.iter().map(|&i| scan.cands[i].clone()).collect();
            Pcf::from_coords(n, &c).map(|p| p.to_string()).unwrap_or_default()
        })
        .collect();
    Ok(ScanReport {
        ring: ring.clone(),
        quad: Some(q.to_string()),
        matrix: None,
        n,
        k,
        h,
        total_points: total,
        boundary_points: boundary,
        holds: interior_points.len() <= MAX_INTERIOR,
        interior_points,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Scan of `V̄_{N,k}(A)` through the solver; the interior predicate looks at the period
/// coordinates only.
pub fn vbar_degeneracy_scan(a: &Mat2, n: usize, k: usize, h: u64, ring: &Ring, budget: &Budget) -> Result<ScanReport> {
    let start = Instant::now();
    if n + k <= 3 {
        return Err(Error::Precondition(format!("N + k = {} must exceed 3", n + k)));
    }
    let est = word_nodes(ring.box_size(h), n + k);
    if est > budget.node_limit {
        return Err(Error::BudgetExceeded { estimated: est, limit: budget.node_limit });
    }
    let prob = FactorProblem { a: a.clone(), n, k, h, ring: ring.clone() };
    let sols = vbar_solve_with(&prob, budget.node_limit)?;
    let cands: Vec<RElem> = sols.iter().flat_map(|s| s.x.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let flags = interior_flags(ring, &cands)?;
    let is_interior = |x: &RElem| flags[cands.binary_search(x).expect("collected")];
    let mut interior = Vec::new();
    for s in &sols {
        if s.x.iter().all(is_interior) {
            interior.push(s.to_string());
        }
    }
    Ok(ScanReport {
        ring: ring.clone(),
        quad: None,
        matrix: Some(format!("{},{},{},{}", a.e11, a.e12, a.e21, a.e22)),
        n,
        k,
        h,
        total_points: sols.len(),
        boundary_points: sols.len() - interior.len(),
        holds: interior.len() <= MAX_INTERIOR,
        interior_points: interior,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityCertificate {
    pub points: Vec<String>,
    pub fibers_used: usize,
    pub degree: usize,
    pub monomial_count: usize,
    pub rank: usize,
    pub certified: bool,
    /// Fewer points than monomials: full rank is impossible.
    pub insufficient: bool,
}

/// Exponent vectors in `vars` variables of total degree ≤ `degree`, graded.
pub fn monomials(vars: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == vars {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(vars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, degree as u32, &mut Vec::new(), &mut out);
    out.sort_by_key(|m| (m.iter().sum::<u32>(), std::cmp::Reverse(m.clone())));
    out
}

/// Rank certificate for a point set: full column rank of the monomial evaluation matrix
/// means no nonzero polynomial of degree ≤ `degree` vanishes on all points.
pub fn certify_points(points: &[Vec<RElem>], degree: usize) -> Result<DensityCertificate> {
    let Some(first) = points.first() else { return Err(Error::InsufficientPoints) };
    let vars = first.len();
    let mons = monomials(vars, degree);
    let rows: Vec<Vec<RElem>> = points
        .iter()
        .map(|p| {
            mons.iter()
                .map(|m| p.iter().zip(m).fold(RElem::one(), |acc, (x, &e)| &acc * &x.pow(e)))
                .collect()
        })
        .collect();
    let r = rank(rows);
    Ok(DensityCertificate {
        points: points
            .iter()
            .map(|p| format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect(),
        fibers_used: 0,
        degree,
        monomial_count: mons.len(),
        rank: r,
        certified: r == mons.len(),
        insufficient: points.len() < mons.len(),
    })
}

/// Harvest fiber points over the first `fiber_count` FP points and certify them.
#[allow(clippy::too_many_arguments)]
pub fn harvest_and_certify(
    q: &QuadPoly,
    n: usize,
    k: usize,
    ring: &Ring,
    fiber_count: usize,
    h: u64,
    degree: usize,
    gens: &[BetaElem],
    budget: &Budget,
) -> Result<DensityCertificate> {
    let fps = fp_stream(q, k, ring, fiber_count, gens)?;
    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for pt in &fps {
        for p in fiber_solve_with(pt, q, n, k, h, ring, budget.node_limit)? {
            let c = p.coords();
            if seen.insert(c.clone()) {
                points.push(c);
            }
        }
    }
    let mut cert = certify_points(&points, degree)?;
    cert.fibers_used = fps.len();
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
pub struct PellCheckReport {
    pub alpha: i64,
    pub k: usize,
    pub h: u64,
    pub fp_points: usize,
    pub units: usize,
    pub bijective: bool,
    /// First points with `c, d > 0`, by height, in conic coordinates `(c, d)`.
    pub first_points: Vec<(String, String)>,
}

/// Exhaustive check at height ≤ H that `unit_to_fp` and `fp_to_unit` are mutually inverse
/// bijections between FP points of `x² − α` (box `|c|, |d| ≤ H`) and units of ℤ[√α] of
/// norm `(−1)^k` with coefficients ≤ H.
pub fn pell_bijection_check(alpha: i64, k: usize, h: u64) -> Result<PellCheckReport> {
    if alpha < 2 || (alpha as f64).sqrt().round().powi(2) as i64 == alpha {
        return Err(Error::Precondition(format!("alpha = {alpha} must be a nonsquare ≥ 2")));
    }
    let z = Ring::integers();
    let ring = Ring::quadratic(alpha, false)?;
    let q = QuadPoly::from_i64(1, 0, -alpha);
    let sign: i128 = if k.is_multiple_of(2) { 1 } else { -1 };
    let hi = h as i64;
    let a = alpha as i128;
    // FP side: Bc = A(d − a) and −Ab = Cc force a = d, b = αc; the rest is checked exactly
    let fp: Vec<FPPoint> = (-hi..=hi)
        .into_par_iter()
        .flat_map_iter(|c| {
            let q = &q;
            (-hi..=hi).filter_map(move |d| {
                let (ci, di) = (c as i128, d as i128);
                if di * di - a * ci * ci != sign {
                    return None;
                }
                let p = FPPoint {
                    a: RElem::from_int(d),
                    b: RElem::from_bigint(BigInt::from(alpha) * c),
                    c: RElem::from_int(c),
                    d: RElem::from_int(d),
                    k_parity: (k % 2) as u8,
                };
                p.check(q).ok().map(|_| p)
            })
        })
        .collect();
    // unit side: y + x√α with y² = αx² ± 1 solved by integer square roots
    let units: Vec<RElem> = (-hi..=hi)
        .into_par_iter()
        .flat_map_iter(|x| {
            let y2 = a * (x as i128) * (x as i128) + sign;
            let mut v = Vec::new();
            if y2 >= 0 {
                let y = BigInt::from(y2).sqrt();
                if &y * &y == BigInt::from(y2) && y <= BigInt::from(hi) {
                    let yi = y.to_i64().unwrap();
                    v.push(ring.elem(yi, x));
                    if yi != 0 {
                        v.push(ring.elem(-yi, x));
                    }
                }
            }
            v
        })
        .filter(|u| ring.is_unit(u) && u.norm() == BigRational::from_integer(sign.into()))
        .collect();
    let fp_set: HashSet<FPPoint> = fp.iter().cloned().collect();
    let unit_set: HashSet<RElem> = units.iter().cloned().collect();
    let beta_coords = |u: &RElem| BetaElem::new(RElem::from_ratio(&u.v()), RElem::from_ratio(&u.u()));
    let from_beta = |b: &BetaElem| ring.elem_big(b.d.as_integer().cloned().unwrap_or_default(), b.c.as_integer().cloned().unwrap_or_default());
    let mut ok = fp_set.len() == fp.len() && unit_set.len() == units.len() && fp.len() == units.len();
    for u in &units {
        let b = beta_coords(u);
        match unit_to_fp(&b, &q, k, &z) {
            Ok(p) => ok &= fp_set.contains(&p) && fp_to_unit(&p, &q).map(|b2| from_beta(&b2) == *u).unwrap_or(false),
            Err(_) => ok = false,
        }
    }
    for p in &fp {
        match fp_to_unit(p, &q) {
            Ok(b) => {
                let u = from_beta(&b);
                ok &= unit_set.contains(&u) && unit_to_fp(&b, &q, k, &z).map(|p2| p2 == *p).unwrap_or(false);
            }
            Err(_) => ok = false,
        }
    }
    let mut pos: Vec<&FPPoint> = fp.iter().filter(|p| p.c.real_sign().is_gt() && p.d.real_sign().is_gt()).collect();
    pos.sort_by(|x, y| x.height().cmp(&y.height()).then_with(|| x.conic().cmp(&y.conic())));
    Ok(PellCheckReport {
        alpha,
        k,
        h,
        fp_points: fp.len(),
        units: units.len(),
        bijective: ok,
        first_points: pos.iter().take(3).map(|p| (p.c.to_string(), p.d.to_string())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 1).len(), 4);
        assert_eq!(monomials(3, 2).len(), 10);
        assert_eq!(monomials(2, 3).len(), 10);
        assert_eq!(monomials(3, 1)[0], vec![0, 0, 0]);
    }

    #[test]
    fn certificates() {
        let pts = |v: &[&[i64]]| v.iter().map(|p| p.iter().map(|&x| x.into()).collect()).collect::<Vec<Vec<RElem>>>();
        let c = certify_points(&pts(&[&[0, 0], &[1, 0], &[0, 1]]), 1).unwrap();
        assert!(c.certified);
        let c = certify_points(&pts(&[&[0, 0], &[1, 1], &[2, 2]]), 1).unwrap();
        assert!(!c.certified && c.rank == 2);
        assert!(matches!(certify_points(&[], 1), Err(Error::InsufficientPoints)));
    }

    #[test]
    fn pell_small() {
        let r = pell_bijection_check(2, 1, 50).unwrap();
        assert!(r.bijective);
        assert_eq!(r.first_points[0], ("1".into(), "1".into()));
        assert_eq!(r.first_points[2], ("29".into(), "41".into()));
        let r = pell_bijection_check(3, 1, 100).unwrap();
        assert!(r.bijective && r.fp_points == 0);
        let r = pell_bijection_check(2, 2, 50).unwrap();
        assert!(r.bijective);
        assert_eq!(r.first_points[..2], [("2".into(), "3".into()), ("12".into(), "17".into())]);
    }

    #[test]
    fn small_scan() {
        let r = degeneracy_scan(&QuadPoly::from_i64(1, 0, -2), 1, 2, 4, &Ring::integers(), &Budget::default()).unwrap();
        assert_eq!(r.total_points, r.boundary_points + r.interior_points.len());
        assert!(r.holds);
    }
}
