use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use pcf_core::experiment::{certify_points, degeneracy_scan, Budget};
use pcf_core::factor::{phi_inv, phi_iso, vbar_matrix, vbar_solve, word, FactorProblem, FactorSolution};
use pcf_core::gauss::{fundamental_cell, in_cell, m_set, nearest_lattice};
use pcf_core::hurwitz::{evaluate, expand_rational, hurwitz_valid, uniqueness_probe, Nicf};
use pcf_core::pcf::{evaluate_exact, membership};
use pcf_core::pell::{default_unit, fp_to_unit, unit_to_fp, BetaElem};
use pcf_core::{e_matrix, quad_poly, Mat2, Pcf, QuadPoly, RElem, RelQuad, Ring};
use proptest::prelude::*;

fn rings() -> Vec<Ring> {
    vec![Ring::integers(), Ring::gaussian(), "Z[sqrt(2)]".parse().unwrap(), Ring::quadratic(-3, true).unwrap()]
}

fn d(c: &RElem) -> Mat2 {
    Mat2::new(c.clone(), RElem::one(), RElem::one(), RElem::zero())
}

fn elems(ring: &Ring, raw: &[(i64, i64)]) -> Vec<RElem> {
    raw.iter().map(|&(u, v)| if ring.is_integers() { RElem::from_int(u) } else { ring.elem(u, v) }).collect()
}

fn coeffs(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, -6i64..=6), len)
}

/// Nonzero integers with `|c| ≥ lo`.
fn big_terms(lo: i64, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec((lo..=12i64, any::<bool>()).prop_map(|(c, s)| if s { c } else { -c }), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn determinant_law(ri in 0usize..4, b in coeffs(0..4), a in coeffs(1..7)) {
        let ring = &rings()[ri];
        let p = Pcf::new(elems(ring, &b), elems(ring, &a)).unwrap();
        let want = RElem::from_int(if a.len() % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(e_matrix(&p).det(), want);
    }

    #[test]
    fn e_matrix_is_conjugated_period(ri in 0usize..4, b in coeffs(0..4), a in coeffs(1..6)) {
        let ring = &rings()[ri];
        let (b, a) = (elems(ring, &b), elems(ring, &a));
        let pre = b.iter().fold(Mat2::identity(), |m, c| m.mul(&d(c)));
        let w = a.iter().fold(Mat2::identity(), |m, c| m.mul(&d(c)));
        let want = pre.mul(&w).mul(&pre.inv().unwrap());
        prop_assert_eq!(e_matrix(&Pcf::new(b, a).unwrap()), want);
    }

    #[test]
    fn exact_value_is_a_root(b in big_terms(1, 0..3), a in big_terms(2, 1..5)) {
        let p = Pcf::from_i64(&b, &a);
        let v = evaluate_exact(&p, &Ring::integers()).unwrap();
        prop_assert!(quad_poly(&p).eval(&v).is_zero());
        prop_assert!(membership(&p, &quad_poly(&p)));
    }

    #[test]
    fn hurwitz_round_trip(b in big_terms(3, 0..4), a in big_terms(3, 1..5)) {
        let b: Vec<BigInt> = b.into_iter().map(BigInt::from).collect();
        let e = Nicf::periodic(b, a.into_iter().map(BigInt::from).collect());
        prop_assert!(hurwitz_valid(&e));
        prop_assert!(uniqueness_probe(&e).unwrap());
    }

    #[test]
    fn rational_expansion(n in -10_000i64..10_000, m in 1i64..5_000) {
        let x = BigRational::new(n.into(), m.into());
        let e = expand_rational(&x, 1000).unwrap();
        prop_assert!(hurwitz_valid(&e));
        // the first term carries the sign of the value
        let c1 = &e.preperiod[0];
        if !num_traits::Zero::is_zero(c1) {
            prop_assert_eq!(c1.signum(), x.numer().signum());
        }
        prop_assert_eq!(evaluate(&e).unwrap(), RelQuad::from_base(RElem::from_ratio(&x)));
    }

    #[test]
    fn phi_round_trip(y in -8i64..=8, x in prop::collection::vec(-8i64..=8, 1..5)) {
        let sol = FactorSolution { y: vec![RElem::from_int(y)], x: x.iter().map(|&c| RElem::from_int(c)).collect() };
        let img = phi_iso(&sol);
        prop_assert_eq!(phi_inv(&img), sol.clone());
        // A·t^{k+1} is the plain word in the image coordinates
        prop_assert_eq!(vbar_matrix(&sol.y, &sol.x).mul(&Mat2::t_pow(x.len() + 1)), word(&img.x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_sound_and_complete_on_planted(n in 0usize..=1, x in prop::collection::vec(-3i64..=3, 1..4), y in -3i64..=3) {
        let ring = Ring::integers();
        let y: Vec<RElem> = (0..n).map(|_| RElem::from_int(y)).collect();
        let x: Vec<RElem> = x.into_iter().map(RElem::from_int).collect();
        let a = vbar_matrix(&y, &x);
        let p = FactorProblem { a: a.clone(), n, k: x.len(), h: 3, ring };
        let sols = vbar_solve(&p).unwrap();
        let planted = FactorSolution { y: y.clone(), x: x.clone() };
        prop_assert!(sols.contains(&planted));
        for s in &sols {
            prop_assert_eq!(vbar_matrix(&s.y, &s.x), a.clone());
            prop_assert!(s.coords().iter().all(|c| c.height_u64() <= 3));
        }
    }

    #[test]
    fn hyperplane_points_never_certify(
        w in prop::collection::vec(-4i64..=4, 3),
        pts in prop::collection::vec(prop::collection::vec(-9i64..=9, 2), 4..20),
    ) {
        prop_assume!(w[2] != 0);
        // points on w0 + w1·x + w2·y ... solved for a third coordinate over ℚ
        let rows: Vec<Vec<RElem>> = pts
            .iter()
            .map(|p| {
                let z = BigRational::new((-(w[0] * p[0] + w[1] * p[1])).into(), w[2].into());
                vec![RElem::from_int(p[0]), RElem::from_int(p[1]), RElem::from_ratio(&z)]
            })
            .collect();
        let c = certify_points(&rows, 1).unwrap();
        prop_assert!(!c.certified);
        prop_assert!(c.rank < c.monomial_count);
    }

    #[test]
    fn rank_is_monotone(pts in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 2..15)) {
        let rows: Vec<Vec<RElem>> = pts.iter().map(|p| p.iter().map(|&c| RElem::from_int(c)).collect()).collect();
        let mut last = 0;
        for i in 1..=rows.len() {
            let r = certify_points(&rows[..i], 2).unwrap().rank;
            prop_assert!(r >= last && r <= i);
            last = r;
        }
    }
}

#[test]
fn nearest_lattice_tiles_the_plane() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for ring in [Ring::gaussian(), Ring::quadratic(-3, true).unwrap(), Ring::quadratic(-2, true).unwrap(), Ring::quadratic(-7, true).unwrap()] {
        let cell = fundamental_cell(&ring).unwrap();
        let w = ring.omega();
        let neighbours = [RElem::one(), w.clone(), &w - &RElem::one(), -RElem::one(), -&w, &RElem::one() - &w];
        for _ in 0..2500 {
            let den = BigInt::from(rng.gen_range(1..=60));
            let (u, v) = (rng.gen_range(-400..=400), rng.gen_range(-400..=400));
            let z = ring.elem(u, v).checked_div(&RElem::from_bigint(den)).unwrap();
            let c = nearest_lattice(&RelQuad::from_base(z.clone()), &cell);
            assert!(ring.contains(&c));
            assert!(in_cell(&RelQuad::from_base(z.clone()), &c, &cell), "{z} not in the cell of {c}");
            let best = ring.abs_sq(&(&z - &c));
            for g in &neighbours {
                assert!(best <= ring.abs_sq(&(&(&z - &c) - g)), "{z}: {c} beaten by {c}+{g}");
            }
        }
    }
}

#[test]
fn m_set_is_bound_independent() {
    for ring in [Ring::gaussian(), Ring::quadratic(-3, true).unwrap(), Ring::quadratic(-2, true).unwrap(), Ring::quadratic(-7, true).unwrap()] {
        let small = m_set(&ring, 5).unwrap();
        let large = m_set(&ring, 8).unwrap();
        assert_eq!(small.members, large.members, "{ring}");
        assert!(small.contains(&RElem::zero()) && small.contains(&RElem::one()));
    }
}

#[test]
fn integer_points_appear_over_gaussian_integers() {
    let q = QuadPoly::from_i64(1, 0, -2);
    let budget = Budget::default();
    let over_z = degeneracy_scan(&q, 1, 2, 2, &Ring::integers(), &budget).unwrap();
    let over_i = degeneracy_scan(&q, 1, 2, 2, &Ring::gaussian(), &budget).unwrap();
    assert!(over_z.total_points > 0);
    assert!(over_z.total_points <= over_i.total_points);
}

#[test]
fn pell_unit_round_trips() {
    let z = Ring::integers();
    let mut checked = 0;
    for q in [QuadPoly::from_i64(1, 0, -2), QuadPoly::from_i64(1, 0, -3), QuadPoly::from_i64(1, -1, -1), QuadPoly::from_i64(1, -2, -2)] {
        let eps = default_unit(&q, &z).unwrap();
        let mut u = BetaElem::one();
        for i in 0..6 {
            for k in [1, 2] {
                let Ok(pt) = unit_to_fp(&u, &q, k, &z) else { continue };
                pt.check(&q).unwrap();
                assert_eq!(fp_to_unit(&pt, &q).unwrap(), u, "{q} power {i}");
                checked += 1;
            }
            u = u.mul(&eps, &q);
        }
    }
    assert!(checked >= 24, "only {checked} units mapped");
}
