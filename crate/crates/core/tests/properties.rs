//! Property tests for the algebraic invariants, checked against the oracles in `common`.

mod common;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::{big_rows, diagonal, general_position, rank as oracle_rank, Row};
use hypdeform::arrangement::{Arrangement, Hyperplane};
use hypdeform::exactalg::{kernel, rank, solve, Rat, RatMatrix, Solution};
use hypdeform::nevan::{counting_function, interpolation_search, line_through, Divisor, DivisorPoint, Level};
use hypdeform::polyring::{congruent_mod_form, monomials, HomoPoly};

fn rat() -> impl Strategy<Value = Rat> {
    (-60i64..=60, 1i64..=12).prop_map(|(p, q)| Rat::new(p, q))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn matrix() -> impl Strategy<Value = Vec<Vec<Rat>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(rat(), c), r))
}

fn int_rows(m: &[Vec<Rat>]) -> Vec<Row> {
    // Clear each row's denominators independently; ranks are unchanged.
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

fn point(len: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(rat(), len).prop_filter("nonzero point", |v| v.iter().any(|x| !x.is_zero()))
}

fn poly(nvars: usize, degree: u32) -> impl Strategy<Value = HomoPoly> {
    let mons = monomials(nvars, degree);
    prop::collection::vec(-9i64..=9, mons.len()).prop_map(move |cs| {
        let terms = mons.iter().cloned().zip(cs).filter(|(_, c)| *c != 0).map(|(e, c)| (e, Rat::from(c))).collect();
        HomoPoly::from_terms(nvars, degree, terms).unwrap()
    })
}

fn form(len: usize) -> impl Strategy<Value = Hyperplane> {
    prop::collection::vec(-9i64..=9, len).prop_filter_map("nonzero form", |v| Hyperplane::from_i64(&v))
}

fn gp_family(n: usize, q: usize) -> impl Strategy<Value = Arrangement> {
    prop::collection::vec(prop::collection::vec(-9i64..=9, n + 1), q)
        .prop_filter_map("general position", move |rows| Arrangement::from_i64_rows(n, &rows).ok().filter(general_position))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rationals_stay_canonical(a in rat(), b in rat(), c in nonzero_rat()) {
        for x in [&a + &b, &a - &b, &a * &b, &a / &c] {
            prop_assert!(x.denom() > &BigInt::zero());
            prop_assert!(x.numer().gcd(x.denom()).is_one());
            if x.is_zero() {
                prop_assert!(x.denom().is_one());
            }
        }
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&(&a * &c) / &c, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn rationals_round_trip_as_strings(a in rat()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Rat>().unwrap(), a.clone());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(j, format!("\"{s}\""));
        prop_assert_eq!(s.contains('/'), !a.denom().is_one());
    }

    #[test]
    fn rank_nullity_and_kernel(rows in matrix()) {
        let cols = rows[0].len();
        let m = RatMatrix::from_rows(rows.clone());
        let r = rank(&m);
        let ker = kernel(&m);
        prop_assert_eq!(r, oracle_rank(&int_rows(&rows), cols));
        prop_assert_eq!(r + ker.len(), cols);
        prop_assert!(r <= rows.len().min(cols));
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(Rat::is_zero));
        }
        let kr: Vec<Row> = int_rows(&ker);
        prop_assert_eq!(oracle_rank(&kr, cols), ker.len());
    }

    #[test]
    fn rank_ignores_row_order_and_scaling(rows in matrix(), scales in prop::collection::vec(nonzero_rat(), 5), seed in any::<u64>()) {
        let r = rank(&RatMatrix::from_rows(rows.clone()));
        let mut perm: Vec<usize> = (0..rows.len()).collect();
        let k = (seed as usize) % perm.len().max(1);
        perm.rotate_left(k);
        if seed % 2 == 0 {
            perm.reverse();
        }
        let scaled: Vec<Vec<Rat>> = perm.iter().map(|&i| rows[i].iter().map(|x| x * &scales[i]).collect()).collect();
        prop_assert_eq!(rank(&RatMatrix::from_rows(scaled)), r);
    }

    #[test]
    fn solve_is_exact(rows in matrix(), seed in prop::collection::vec(rat(), 5)) {
        let m = RatMatrix::from_rows(rows.clone());
        let b: Vec<Rat> = seed.iter().cycle().take(m.rows()).cloned().collect();
        match solve(&m, &b) {
            Solution::Solved(x) => prop_assert_eq!(m.mul_vec(&x), b),
            Solution::Inconsistent => {
                let aug: Vec<Vec<Rat>> = rows.iter().zip(&b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
                let cols = rows[0].len();
                prop_assert!(oracle_rank(&int_rows(&aug), cols + 1) > oracle_rank(&int_rows(&rows), cols));
            }
        }
    }

    #[test]
    fn polynomials_are_homogeneous(p in poly(3, 4), x in point(3), l in nonzero_rat()) {
        let lx: Vec<Rat> = x.iter().map(|v| v * &l).collect();
        prop_assert_eq!(p.evaluate(&lx).unwrap(), &p.evaluate(&x).unwrap() * &l.pow(4));
    }

    #[test]
    fn products_evaluate_pointwise(p in poly(3, 2), q in poly(3, 3), x in point(3)) {
        let pq = &p * &q;
        prop_assert_eq!(pq.degree(), 5);
        prop_assert_eq!(pq.evaluate(&x).unwrap(), &p.evaluate(&x).unwrap() * &q.evaluate(&x).unwrap());
        let s = &p.mul_poly(&q) + &q.mul_poly(&p);
        prop_assert_eq!(s, pq.scale(&Rat::from(2)));
    }

    #[test]
    fn reduction_agrees_on_the_hyperplane(p in poly(4, 3), h in form(4), g in poly(4, 2), v in point(4)) {
        let r = p.reduce_mod_form(&h);
        let piv = h.pivot();
        prop_assert!(r.terms().all(|(e, _)| e[piv] == 0));
        // A point of H: v minus its component along the pivot axis.
        let hv = h.eval(&v);
        let mut x = v.clone();
        x[piv] = &x[piv] - &(&hv / &Rat::from(h.coeffs()[piv].clone()));
        prop_assert!(h.eval(&x).is_zero());
        if x.iter().any(|c| !c.is_zero()) {
            prop_assert_eq!(r.evaluate(&x).unwrap(), p.evaluate(&x).unwrap());
        }
        let shifted = &p + &HomoPoly::linear_form(&h).mul_poly(&g);
        prop_assert!(congruent_mod_form(&p, &shifted, &h));
        prop_assert_eq!(shifted.reduce_mod_form(&h), r);
    }

    #[test]
    fn hyperplanes_are_projective_classes(v in prop::collection::vec(rat(), 4), l in nonzero_rat()) {
        let scaled: Vec<Rat> = v.iter().map(|x| x * &l).collect();
        prop_assert_eq!(Hyperplane::from_rats(&v), Hyperplane::from_rats(&scaled));
        if let Some(h) = Hyperplane::from_rats(&v) {
            let c = h.coeffs();
            prop_assert!(c[h.pivot()] > BigInt::zero());
            prop_assert!(c.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn general_position_codimensions(a in gp_family(3, 6)) {
        prop_assert!(a.is_general_position().unwrap().holds());
        for s in 1..=5 {
            for idx in (0..6).combinations(s) {
                prop_assert_eq!(a.intersect(&idx).unwrap().codim, s.min(4));
            }
        }
    }

    #[test]
    fn diagonals_are_symmetric_and_contain_both_centers(a in gp_family(3, 6)) {
        for jk in (0..6).combinations(5) {
            for j in jk.iter().copied().combinations(2) {
                let k: Vec<usize> = jk.iter().copied().filter(|x| !j.contains(x)).collect();
                let d = a.diagonal_hyperplane(&j, &k).unwrap();
                prop_assert_eq!(&d, &a.diagonal_hyperplane(&k, &j).unwrap());
                let oracle = Hyperplane::from_bigints(diagonal(&a, &j, &k)).unwrap();
                prop_assert_eq!(&d, &oracle);
                for side in [&j, &k] {
                    let mut rows = big_rows(&a, side);
                    rows.push(d.coeffs().to_vec());
                    prop_assert_eq!(oracle_rank(&rows, 4), side.len());
                }
            }
        }
    }

    #[test]
    fn generic_implies_general_position(a in gp_family(2, 6)) {
        if a.is_generic().unwrap().holds() {
            prop_assert!(a.is_general_position().unwrap().holds());
            prop_assert!(common::generic_oracle(&a).is_none());
        }
    }

    #[test]
    fn arrangements_round_trip_through_json(a in gp_family(3, 6)) {
        let s = serde_json::to_string(&a).unwrap();
        let b: Arrangement = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(serde_json::to_string(&b).unwrap(), s);
    }

    #[test]
    fn restriction_composes(a in gp_family(4, 7), i in 0usize..7, j in 0usize..6) {
        // Restricting by {i} then {j'} has the same codimension profile as restricting by {i, j}.
        let once = a.restrict(&[i]).unwrap();
        let twice = once.restrict(&[j]).unwrap();
        let orig_j = (0..7).filter(|&x| x != i).nth(j).unwrap();
        let both = a.restrict(&[i, orig_j].into_iter().sorted().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(twice.q(), both.q());
        for s in 1..=twice.q() {
            for idx in (0..twice.q()).combinations(s) {
                prop_assert_eq!(twice.intersect(&idx).unwrap().codim, both.intersect(&idx).unwrap().codim);
            }
        }
    }

    #[test]
    fn lines_through_points_contain_them(p in point(3), q in point(3)) {
        match line_through(&p, &q) {
            Ok(l) => {
                prop_assert!(l.eval(&p).is_zero() && l.eval(&q).is_zero());
            }
            Err(_) => {
                let c = [&(&p[1] * &q[2]) - &(&p[2] * &q[1]), &(&p[2] * &q[0]) - &(&p[0] * &q[2]), &(&p[0] * &q[1]) - &(&p[1] * &q[0])];
                prop_assert!(c.iter().all(Rat::is_zero));
            }
        }
    }

    #[test]
    fn counting_is_monotone_and_bounded(
        pts in prop::collection::btree_map((-40i64..=40, -40i64..=40), 1u32..=5, 1..8),
        r_num in 11i64..=500,
    ) {
        let e = Divisor::new(pts.iter().map(|(&(a, b), &m)| DivisorPoint::new(Rat::new(a, 4), Rat::new(b, 4), m)).collect()).unwrap();
        let r = Rat::new(r_num, 10);
        let n1 = counting_function(&e, Level::Finite(1), &r).unwrap();
        let mut prev = n1.clone();
        for k in 2..=6u32 {
            let nk = counting_function(&e, Level::Finite(k), &r).unwrap();
            prop_assert!(prev.cmp_exact(&nk).is_le());
            prop_assert!(nk.cmp_exact(&n1.scale(&Rat::from(k as i64))).is_le());
            prev = nk;
        }
        let inf = counting_function(&e, Level::Infinite, &r).unwrap();
        prop_assert!(prev.cmp_exact(&inf).is_eq());
        prop_assert!(!n1.to_f64().is_sign_negative());
    }

    #[test]
    fn interpolation_is_minimal(m in 5u64..3000) {
        let r = interpolation_search(m).unwrap();
        let gap = |mm: i128| {
            let (mi, d, k) = (m as i128, (m as i128 + 2) * mm, 3 * mm + 1);
            (d + 1) * (d + 2) / 2 - 1 - mi * k * (k + 1) / 2
        };
        prop_assert_eq!(r.gap, gap(r.m_min as i128));
        prop_assert!(r.gap > 0);
        prop_assert!(r.m_min == 1 || gap(r.m_min as i128 - 1) <= 0);
    }
}
