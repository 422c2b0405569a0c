//! Nearest-integer continued fractions over imaginary quadratic orders: the Voronoi cell
//! of the lattice, nearest-point rounding with a deterministic tie-break, the finite
//! exceptional set M, and expansion/uniqueness probes.
//!
//! Points of K = ℚ(√d) are handled in coordinates `(x, y)` meaning `x + i·√|d|·y`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::contmat::Pcf;
use crate::error::{Error, Result};
use crate::hurwitz::NicfExpansion;
use crate::ring::{Basis, LinearForm, RElem, Radical, RelQuad, Ring};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Pt {
    x: Q,
    y: Q,
}

impl Pt {
    fn of(e: &RElem) -> Pt {
        let (x, y) = e.imag_coords();
        Pt { x, y }
    }
    fn sub(&self, o: &Pt) -> Pt {
        Pt { x: &self.x - &o.x, y: &self.y - &o.y }
    }
    fn add(&self, o: &Pt) -> Pt {
        Pt { x: &self.x + &o.x, y: &self.y + &o.y }
    }
    fn scale(&self, t: &Q) -> Pt {
        Pt { x: &self.x * t, y: &self.y * t }
    }
    /// `Re(self·conj(o))`
    fn dot(&self, o: &Pt, d: &Q) -> Q {
        &self.x * &o.x + d * &self.y * &o.y
    }
    /// Sign of `Im(conj(self)·o)`.
    fn cross_sign(&self, o: &Pt) -> Ordering {
        (&self.x * &o.y - &self.y * &o.x).cmp(&Q::zero())
    }
}

/// The closed Voronoi cell V₀ of the ring's lattice.
#[derive(Clone, Debug)]
pub struct Cell {
    ring: Ring,
    absd: Q,
    /// Voronoi-relevant vectors, counter-clockwise.
    relevant: Vec<RElem>,
    /// Vertices of V₀, counter-clockwise.
    pub vertices: Vec<RElem>,
    /// Squared circumradius.
    pub rho_sq: Q,
}

impl Cell {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn relevant(&self) -> &[RElem] {
        &self.relevant
    }

    pub fn rho_f64(&self) -> f64 {
        self.rho_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    fn to_elem(&self, p: &Pt) -> RElem {
        match self.ring.basis() {
            Basis::Sqrt(_) => RElem::from_coords(&p.x, &p.y, self.ring.basis()),
            // x + y·√d = (x − y) + 2y·ω
            b @ Basis::HalfSqrt(_) => RElem::from_coords(&(&p.x - &p.y), &(&p.y + &p.y), b),
            Basis::Rational => unreachable!("imaginary ring"),
        }
    }

    fn abs_sq(&self, p: &Pt) -> Q {
        p.dot(p, &self.absd)
    }

    /// Whether the closed cell `c + V₀` contains `p`.
    fn cell_contains(&self, c: &Pt, p: &Pt) -> bool {
        let verts: Vec<Pt> = self.vertices.iter().map(|v| Pt::of(v).add(c)).collect();
        let n = verts.len();
        (0..n).all(|i| verts[(i + 1) % n].sub(&verts[i]).cross_sign(&p.sub(&verts[i])) != Ordering::Less)
    }

    /// Squared distance from `p` to the closed cell `c + V₀`.
    fn dist_sq_to_cell(&self, c: &Pt, p: &Pt) -> Q {
        if self.cell_contains(c, p) {
            return Q::zero();
        }
        let verts: Vec<Pt> = self.vertices.iter().map(|v| Pt::of(v).add(c)).collect();
        let n = verts.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&verts[i], &verts[(i + 1) % n]);
                let ab = b.sub(a);
                let t = p.sub(a).dot(&ab, &self.absd) / self.abs_sq(&ab);
                let t = t.clamp(Q::zero(), Q::one());
                self.abs_sq(&p.sub(&a.add(&ab.scale(&t))))
            })
            .min()
            .unwrap()
    }

    /// Exact membership in M: the cell `c + V₀` meets one of the closed disks
    /// `|z − 1/g| ≤ 1/|g|` whose union is where `1/z` leaves the open cell U₀.
    pub fn in_m(&self, c: &RElem) -> bool {
        let cp = Pt::of(c);
        // |c| > 2 + ρ puts the whole cell outside |z| ≤ 2, which holds every disk
        let c_abs = self.abs_sq(&cp).to_f64().unwrap_or(f64::INFINITY).sqrt();
        if c_abs > 2.0 + self.rho_f64() + 1e-6 {
            return false;
        }
        self.relevant.iter().any(|g| {
            let gp = Pt::of(g);
            let g_sq = self.abs_sq(&gp);
            let center = Pt::of(&g.inv().expect("nonzero relevant vector"));
            self.dist_sq_to_cell(&cp, &center) <= g_sq.recip()
        })
    }
}

pub fn fundamental_cell(ring: &Ring) -> Result<Cell> {
    if !ring.is_imaginary() {
        return Err(Error::WrongRing(format!("{ring} is not an imaginary quadratic order")));
    }
    let w = ring.omega();
    let mut relevant = vec![RElem::one(), w.clone()];
    if matches!(ring.basis(), Basis::HalfSqrt(_)) {
        relevant.push(&w - &RElem::one());
    }
    let negs: Vec<RElem> = relevant.iter().map(|g| -g.clone()).collect();
    relevant.extend(negs);
    relevant.sort_by(|a, b| {
        let (ax, ay) = a.to_c64();
        let (bx, by) = b.to_c64();
        ay.atan2(ax).partial_cmp(&by.atan2(bx)).unwrap()
    });
    let absd = Q::from_integer(ring.absd());
    let n = relevant.len();
    let mut cell = Cell { ring: ring.clone(), absd, relevant, vertices: Vec::new(), rho_sq: Q::zero() };
    let half = Q::new(BigInt::one(), BigInt::from(2));
    for i in 0..n {
        // circumcenter of 0, g, h: Re(v·conj(g)) = |g|²/2 and likewise for h
        let g = Pt::of(&cell.relevant[i]);
        let h = Pt::of(&cell.relevant[(i + 1) % n]);
        let (a11, a12, r1) = (g.x.clone(), &cell.absd * &g.y, cell.abs_sq(&g) * &half);
        let (a21, a22, r2) = (h.x.clone(), &cell.absd * &h.y, cell.abs_sq(&h) * &half);
        let det = &a11 * &a22 - &a12 * &a21;
        let v = Pt { x: (&r1 * &a22 - &a12 * &r2) / &det, y: (&a11 * &r2 - &r1 * &a21) / &det };
        let r = cell.abs_sq(&v);
        if r > cell.rho_sq {
            cell.rho_sq = r;
        }
        cell.vertices.push(cell.to_elem(&v));
    }
    Ok(cell)
}

/// `|c|² ≤ bound²` lattice points, ordered by the element order.
fn lattice_disk(cell: &Cell, bound: &Q) -> Vec<RElem> {
    let ring = &cell.ring;
    let b2 = bound * bound;
    let scale = match ring.basis() {
        Basis::HalfSqrt(_) => 2,
        _ => 1,
    };
    let bf = bound.to_f64().unwrap_or(0.0);
    let ymax = (scale as f64 * bf).ceil() as i64 + 1;
    let mut out = Vec::new();
    for y in -ymax..=ymax {
        let xmax = bf.ceil() as i64 + y.abs() + 1;
        for x in -xmax..=xmax {
            let c = ring.elem(x, y);
            if cell.abs_sq(&Pt::of(&c)) <= b2 {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}

/// The exceptional set M, sorted.
#[derive(Clone, Debug, Serialize)]
pub struct MSet {
    pub members: Vec<RElem>,
}

impl MSet {
    pub fn contains(&self, c: &RElem) -> bool {
        self.members.binary_search(c).is_ok()
    }
}

/// All lattice points `c` with `|c| ≤ search_bound` whose translated cell is not mapped
/// into U₀ by inversion. The bound must be at least `2 + ρ`, beyond which no point of M
/// can lie.
pub fn m_set(ring: &Ring, search_bound: u64) -> Result<MSet> {
    let cell = fundamental_cell(ring)?;
    let need = 2.0 + cell.rho_f64();
    if (search_bound as f64) < need {
        return Err(Error::BoundTooSmall { bound: search_bound.to_string(), need: format!("{need:.6}") });
    }
    let cands = lattice_disk(&cell, &Q::from_integer(search_bound.into()));
    let members: Vec<RElem> = cands.into_par_iter().filter(|c| cell.in_m(c)).collect();
    Ok(MSet { members })
}

/// Sign oracle for points `α − c` of a fixed radical extension.
struct Rounder<'a> {
    cell: &'a Cell,
    rad: Radical,
}

impl<'a> Rounder<'a> {
    fn new(cell: &'a Cell, alpha: &RelQuad) -> Self {
        let zero = RElem::zero();
        let delta = if alpha.in_base().is_some() { &zero } else { alpha.delta() };
        Rounder { cell, rad: Radical::new(delta, &cell.ring.absd()) }
    }

    /// Sign of `|g|²/2 − Re((α − c)·conj(g))`: negative iff `c + g` is strictly closer.
    fn step_sign(&self, alpha: &RelQuad, c: &RElem, g: &RElem) -> Ordering {
        let w = alpha.sub_base(c).scale(&g.conj());
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let f = LinearForm::constant(self.cell.abs_sq(&Pt::of(g)) * half).add(&self.rad.re_form(&w).neg());
        self.rad.sign(&f)
    }

    /// Float rounding in the `{1, ω}` basis; only a starting point for the exact descent.
    fn start(&self, alpha: &RelQuad) -> RElem {
        let (re, im) = alpha.to_c64();
        let s = self.cell.absd.to_f64().unwrap_or(1.0).sqrt();
        let fin = |v: f64| if v.is_finite() && v.abs() < 1e15 { v.round() as i64 } else { 0 };
        match self.cell.ring.basis() {
            Basis::HalfSqrt(_) => {
                let y = fin(2.0 * im / s);
                self.cell.ring.elem(fin(re - y as f64 / 2.0), y)
            }
            _ => self.cell.ring.elem(fin(re), fin(im / s)),
        }
    }

    fn nearest(&self, alpha: &RelQuad) -> RElem {
        let mut c = self.start(alpha);
        'descent: loop {
            for g in &self.cell.relevant {
                if self.step_sign(alpha, &c, g) == Ordering::Less {
                    c = &c + g;
                    continue 'descent;
                }
            }
            break;
        }
        // collect the tied nearest points and apply the tie-break
        let mut tied = vec![c.clone()];
        let mut seen: HashSet<RElem> = tied.iter().cloned().collect();
        let mut i = 0;
        while i < tied.len() {
            let cur = tied[i].clone();
            for g in &self.cell.relevant {
                let nb = &cur + g;
                if !seen.contains(&nb) && self.step_sign(alpha, &cur, g) == Ordering::Equal {
                    seen.insert(nb.clone());
                    tied.push(nb);
                }
            }
            i += 1;
        }
        tied.into_iter().min_by(lex_re_im).unwrap()
    }
}

/// Order by real part, then imaginary part.
fn lex_re_im(a: &RElem, b: &RElem) -> Ordering {
    let (pa, pb) = (Pt::of(a), Pt::of(b));
    pa.x.cmp(&pb.x).then_with(|| pa.y.cmp(&pb.y))
}

/// The nearest lattice point to `alpha`; boundary points go to the candidate with the
/// smallest `(Re, Im)`.
pub fn nearest_lattice(alpha: &RelQuad, cell: &Cell) -> RElem {
    Rounder::new(cell, alpha).nearest(alpha)
}

/// Whether `z` lies in the closed cell `c + V₀` (exact).
pub fn in_cell(z: &RelQuad, c: &RElem, cell: &Cell) -> bool {
    let r = Rounder::new(cell, z);
    cell.relevant.iter().all(|g| r.step_sign(z, c, g) != Ordering::Less)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussExpansion {
    pub expansion: NicfExpansion<RElem>,
    /// All terms beyond the first lie outside M.
    pub avoids_m: bool,
}

pub fn nicf_expand_gauss(alpha: &RelQuad, ring: &Ring, max_steps: usize) -> Result<GaussExpansion> {
    let cell = fundamental_cell(ring)?;
    expand_with(alpha, &cell, max_steps)
}

fn expand_with(alpha: &RelQuad, cell: &Cell, max_steps: usize) -> Result<GaussExpansion> {
    let rounder = Rounder::new(cell, alpha);
    let mut seen: HashMap<RelQuad, usize> = HashMap::new();
    let mut terms: Vec<RElem> = Vec::new();
    let mut state = alpha.clone();
    let finish = |e: NicfExpansion<RElem>| {
        let avoids_m = e.preperiod.iter().chain(e.period.iter()).skip(1).all(|c| !cell.in_m(c));
        GaussExpansion { expansion: e, avoids_m }
    };
    for step in 0..max_steps {
        if let Some(&first) = seen.get(&state) {
            let period = terms[first..step].to_vec();
            terms.truncate(first);
            return Ok(finish(NicfExpansion::periodic(terms, period)));
        }
        seen.insert(state.clone(), step);
        let c = rounder.nearest(&state);
        let rem = state.sub_base(&c);
        terms.push(c);
        if rem.is_zero() {
            return Ok(finish(NicfExpansion::finite(terms)));
        }
        state = rem.inv()?;
    }
    Err(Error::StepBudgetExceeded(max_steps))
}

/// Exact value of an expansion with terms in `ring`.
pub fn evaluate_gauss(e: &NicfExpansion<RElem>, ring: &Ring) -> Result<RelQuad> {
    if e.is_finite() {
        let mut acc: Option<RElem> = None;
        for c in e.preperiod.iter().rev() {
            acc = Some(match acc {
                None => c.clone(),
                Some(a) => c + &a.inv()?,
            });
        }
        let v = acc.ok_or_else(|| Error::Precondition("empty expansion".into()))?;
        return Ok(RelQuad::from_base(v));
    }
    let p = Pcf::new(e.preperiod.clone(), e.period.clone())?;
    crate::pcf::evaluate_exact(&p, ring)
}

/// Evaluate and re-expand without checking the hypothesis on M.
pub fn gauss_round_trip(e: &NicfExpansion<RElem>, ring: &Ring) -> Result<bool> {
    let cell = fundamental_cell(ring)?;
    let v = evaluate_gauss(e, ring)?;
    let steps = 4 * (e.preperiod.len() + e.period.len()) + 64;
    let back = expand_with(&v, &cell, steps)?;
    Ok(back.expansion == e.canonical())
}

/// Uniqueness probe; every term beyond the first must avoid M.
pub fn gauss_uniqueness_probe(e: &NicfExpansion<RElem>, ring: &Ring) -> Result<bool> {
    let cell = fundamental_cell(ring)?;
    if let Some(c) = e.preperiod.iter().chain(e.period.iter()).skip(1).find(|c| cell.in_m(c)) {
        return Err(Error::Precondition(format!("term {c} lies in M")));
    }
    gauss_round_trip(e, ring)
}
