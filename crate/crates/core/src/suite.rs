//! The verification battery behind `pcf verify-suite`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::contmat::{e_matrix, eigen_check, quad_poly, Mat2, Pcf, QuadPoly};
use crate::experiment::{certify_points, degeneracy_scan, harvest_and_certify, pell_bijection_check, Budget, MAX_INTERIOR};
use crate::factor::{fiber_solve, naive_vbar_solve, phi_inv, phi_iso, solve_word, vbar_matrix, vbar_solve, FactorProblem, FactorSolution};
use crate::gauss::m_set;
use crate::hurwitz::{uniqueness_probe, Nicf};
use crate::pcf::{evaluate_numeric, membership};
use crate::pell::{fp_stream, parse_generators};
use crate::ring::{RElem, Ring};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    /// Set when the criterion fails for a verified structural reason.
    pub obstruction: Option<String>,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
    pub passed: usize,
    pub all_pass: bool,
}

/// Small deterministic generator; the suite must be reproducible without extra deps.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }

    /// `±c` with `c ∈ [lo, hi]`.
    fn signed(&mut self, lo: i64, hi: i64) -> i64 {
        let c = self.range(lo, hi);
        if self.next() & 1 == 0 {
            c
        } else {
            -c
        }
    }

    fn terms(&mut self, len: usize, lo: i64, hi: i64) -> Vec<i64> {
        (0..len).map(|_| self.signed(lo, hi)).collect()
    }
}

struct Outcome {
    pass: bool,
    obstruction: Option<String>,
    detail: String,
}

fn plain(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, obstruction: None, detail })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 12] = [
    ("e-matrix ground truth", c1),
    ("determinant law", c2),
    ("nearest-integer round trip", c3),
    ("convergence gate", c4),
    ("degeneracy over Z", c5),
    ("degeneracy over Z[i]", c6),
    ("pell bijection", c7),
    ("phi isomorphism", c8),
    ("solver completeness", c9),
    ("fiber consistency", c10),
    ("density certificate", c11),
    ("m-set sanity", c12),
];

/// Run every criterion in order.
pub fn run_suite() -> SuiteReport {
    let criteria: Vec<CriterionReport> = CRITERIA
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let t = Instant::now();
            let o = f().unwrap_or_else(|e| Outcome { pass: false, obstruction: None, detail: format!("error: {e}") });
            CriterionReport {
                id: i + 1,
                name,
                pass: o.pass,
                obstruction: o.obstruction,
                detail: o.detail,
                elapsed_ms: t.elapsed().as_millis(),
            }
        })
        .collect();
    let passed = criteria.iter().filter(|c| c.pass).count();
    SuiteReport { all_pass: passed == criteria.len(), passed, criteria }
}

fn c1() -> Result<Outcome> {
    let t = Instant::now();
    let p = Pcf::from_i64(&[1], &[2]);
    let beta = crate::expr::parse_value("sqrt(2)", &Ring::integers())?;
    let ok = e_matrix(&p) == Mat2::from_i64([1, 2, 1, 1]) && quad_poly(&p) == QuadPoly::from_i64(1, 0, -2) && eigen_check(&p, &beta);
    let dt = t.elapsed();
    plain(ok && dt < Duration::from_millis(1), format!("{dt:?}"))
}

fn c2() -> Result<Outcome> {
    let mut g = SplitMix(2);
    let rings = [Ring::integers(), Ring::gaussian(), Ring::quadratic(2, false)?];
    let mut failures = 0;
    for i in 0..1000 {
        let ring = &rings[i % 3];
        let el = |g: &mut SplitMix| if ring.is_integers() { RElem::from_int(g.range(-9, 9)) } else { ring.elem(g.range(-9, 9), g.range(-9, 9)) };
        let n = g.range(0, 3) as usize;
        let k = g.range(1, 6) as usize;
        let b = (0..n).map(|_| el(&mut g)).collect();
        let a = (0..k).map(|_| el(&mut g)).collect();
        let want = RElem::from_int(if k.is_multiple_of(2) { 1 } else { -1 });
        failures += usize::from(e_matrix(&Pcf::new(b, a)?).det() != want);
    }
    plain(failures == 0, format!("{failures} failures in 1000"))
}

fn c3() -> Result<Outcome> {
    let mut g = SplitMix(3);
    let t = Instant::now();
    let mut failures = 0;
    for _ in 0..200 {
        let (np, nk) = (g.range(0, 3) as usize, g.range(1, 5) as usize);
        let big = |v: Vec<i64>| v.into_iter().map(BigInt::from).collect();
        let e = Nicf::periodic(big(g.terms(np, 3, 9)), big(g.terms(nk, 3, 9)));
        failures += usize::from(!matches!(uniqueness_probe(&e), Ok(true)));
    }
    let dt = t.elapsed();
    plain(failures == 0 && dt < Duration::from_secs(10), format!("{failures} failures in 200, {dt:?}"))
}

fn c4() -> Result<Outcome> {
    let mut g = SplitMix(4);
    let (mut failures, mut parabolic_failures) = (0, 0);
    for _ in 0..100 {
        let (np, nk) = (g.range(0, 2) as usize, g.range(1, 5) as usize);
        let p = Pcf::from_i64(&g.terms(np, 2, 9), &g.terms(nk, 2, 9));
        let w = p.period_matrix();
        let tr = w.trace();
        let parabolic = &tr * &tr == &RElem::from_int(4) * &w.det();
        let v = evaluate_numeric(&p, 20, 1000);
        if !(v.converged && v.rigorous && v.radius_below(20)) {
            failures += 1;
            parabolic_failures += usize::from(parabolic && v.rigorous && !v.radius_below(5));
        }
    }
    let obstruction = (failures > 0 && failures == parabolic_failures)
        .then(|| "parabolic period matrices converge like 1/n; 1000 periods cannot reach 1e-20".to_string());
    Ok(Outcome { pass: failures == 0, obstruction, detail: format!("{failures} of 100 above 1e-20, {parabolic_failures} parabolic") })
}

fn c5() -> Result<Outcome> {
    let z = Ring::integers();
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [QuadPoly::from_i64(1, 0, -2), QuadPoly::from_i64(1, 0, -3), QuadPoly::from_i64(1, -1, -1)] {
        for (n, k) in [(1, 2), (0, 3), (1, 3)] {
            let t = Instant::now();
            let r = degeneracy_scan(&q, n, k, 8, &z, &Budget::default())?;
            ok &= r.interior_points.len() <= MAX_INTERIOR && t.elapsed() < Duration::from_secs(60);
            parts.push(format!("{q}({n},{k}) {}/{}", r.interior_points.len(), r.total_points));
        }
    }
    plain(ok, parts.join("; "))
}

fn c6() -> Result<Outcome> {
    let g = Ring::gaussian();
    let t = Instant::now();
    let m = m_set(&g, 6)?;
    let r = degeneracy_scan(&QuadPoly::from_i64(1, 1, 2), 1, 2, 4, &g, &Budget::default())?;
    let ok = r.interior_points.len() <= MAX_INTERIOR && t.elapsed() < Duration::from_secs(600);
    plain(ok, format!("|M| = {}, {} points, {} interior", m.members.len(), r.total_points, r.interior_points.len()))
}

fn c7() -> Result<Outcome> {
    let mut ok = true;
    for alpha in [2, 3, 5, 13] {
        for k in [1, 2] {
            let r = pell_bijection_check(alpha, k, 1000)?;
            ok &= r.bijective;
            if alpha == 2 && k == 1 {
                let firsts: Vec<(&str, &str)> = r.first_points.iter().map(|(c, d)| (c.as_str(), d.as_str())).collect();
                ok &= firsts == [("1", "1"), ("5", "7"), ("29", "41")];
            }
        }
    }
    plain(ok, "alpha in {2,3,5,13}, k in {1,2}, H = 1000".into())
}

fn c8() -> Result<Outcome> {
    let mut g = SplitMix(8);
    let z = Ring::integers();
    let h = 4;
    let mut ok = true;
    let mut total = 0;
    for _ in 0..50 {
        let k = g.range(1, 2) as usize;
        let b = vec![RElem::from_int(g.range(-4, 4))];
        let a: Vec<RElem> = g.terms(k, 0, 4).into_iter().map(RElem::from_int).collect();
        let big_a = vbar_matrix(&b, &a);
        let lhs = naive_vbar_solve(&FactorProblem { a: big_a.clone(), n: 1, k, h, ring: z.clone() })?;
        let mut bounds = vec![Some(h); k + 1];
        bounds[k] = None;
        let mut rhs: Vec<FactorSolution> = solve_word(&big_a.mul(&Mat2::t_pow(k + 1)), &z, h, &bounds, u128::MAX)?
            .into_iter()
            .map(|x| FactorSolution { y: Vec::new(), x })
            .filter(|s| phi_inv(s).coords().iter().all(|c| c.height_u64() <= h))
            .collect();
        rhs.sort();
        let mut image: Vec<FactorSolution> = lhs.iter().map(phi_iso).collect();
        image.sort();
        ok &= !lhs.is_empty() && image == rhs;
        total += lhs.len();
    }
    plain(ok, format!("{total} solutions over 50 matrices"))
}

fn c9() -> Result<Outcome> {
    let mut g = SplitMix(9);
    let z = Ring::integers();
    let mut ok = true;
    for (n, k) in [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)] {
        for _ in 0..3 {
            let y: Vec<RElem> = g.terms(n, 0, 8).into_iter().map(RElem::from_int).collect();
            let x: Vec<RElem> = g.terms(k, 0, 8).into_iter().map(RElem::from_int).collect();
            let p = FactorProblem { a: vbar_matrix(&y, &x), n, k, h: 8, ring: z.clone() };
            ok &= vbar_solve(&p)? == naive_vbar_solve(&p)?;
        }
    }
    let x: Vec<RElem> = [3, -5, 7].into_iter().map(RElem::from_int).collect();
    let p = FactorProblem { a: vbar_matrix(&[], &x), n: 0, k: 3, h: 8, ring: z };
    let t = Instant::now();
    let fast = vbar_solve(&p)?;
    let t_fast = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let slow = naive_vbar_solve(&p)?;
    let speedup = t.elapsed().as_secs_f64() / t_fast.max(1e-9);
    plain(ok && fast == slow && speedup >= 5.0, format!("speedup {speedup:.1}x"))
}

fn c10() -> Result<Outcome> {
    let z = Ring::integers();
    let q = QuadPoly::from_i64(1, 0, -2);
    let (mut ok, mut pts, mut found) = (true, 0, 0);
    for k in [1, 2] {
        for pt in fp_stream(&q, k, &z, 10, &[])? {
            pts += 1;
            for p in fiber_solve(&pt, &q, 1, k, 10, &z)? {
                found += 1;
                ok &= e_matrix(&p) == pt.matrix() && membership(&p, &q);
            }
        }
    }
    plain(ok && pts == 20 && found > 0, format!("{pts} FP points, {found} fiber points"))
}

fn c11() -> Result<Outcome> {
    let r = Ring::quadratic(2, false)?;
    let q = QuadPoly::from_i64(1, 0, -3);
    let gens: Vec<String> = ["sqrt(3)+sqrt(2)", "sqrt(3)-sqrt(2)", "2+sqrt(3)", "2-sqrt(3)"].map(String::from).to_vec();
    let gens = parse_generators(&gens, &q, &r)?;
    let cert = harvest_and_certify(&q, 1, 2, &r, 10, 6, 1, &gens, &Budget::default())?;
    let mut negative = false;
    for pt in fp_stream(&q, 2, &r, 10, &gens)? {
        let f = fiber_solve(&pt, &q, 1, 2, 6, &r)?;
        if !f.is_empty() {
            negative = !certify_points(&f.iter().map(Pcf::coords).collect::<Vec<_>>(), 1)?.certified;
            break;
        }
    }
    let pass = cert.certified && negative && cert.fibers_used >= 10;
    // with B = 0, E22 − E11 = x1·(x2 − 2y) and E21 = x1 force x2 = 2y on the whole variety
    let pts: Vec<Vec<RElem>> = cert
        .points
        .iter()
        .map(|s| s[1..s.len() - 1].split(',').map(|c| r.parse_elem(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let on_plane = pts.iter().all(|p| p[2] == &p[0] + &p[0]);
    let obstruction = (!pass && on_plane && negative && cert.rank + 1 == cert.monomial_count)
        .then(|| "every point satisfies a2 = 2*b1, so no degree-1 certificate exists".to_string());
    Ok(Outcome {
        pass,
        obstruction,
        detail: format!("{} points from {} fibers, rank {}/{}", cert.points.len(), cert.fibers_used, cert.rank, cert.monomial_count),
    })
}

fn c12() -> Result<Outcome> {
    let g = Ring::gaussian();
    let m = m_set(&g, 6)?;
    let must = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    let has = must.iter().all(|&(x, y)| m.contains(&g.elem(x, y)));
    let bound = BigRational::from_integer(16.into());
    let small = m.members.iter().all(|c| g.abs_sq(c) < bound);
    plain(has && small, format!("|M| = {}", m.members.len()))
}
