//! Independent oracles for the integration and acceptance tests.
//!
//! Nothing here calls into the library's linear algebra: ranks use a separate
//! fraction-free elimination and kernels of corank-one systems use signed minors.
#![allow(dead_code)]

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hypdeform::arrangement::{Arrangement, Hyperplane};
use hypdeform::exactalg::Rat;

pub type Row = Vec<BigInt>;

pub fn big_rows(a: &Arrangement, idx: &[usize]) -> Vec<Row> {
    idx.iter().map(|&i| a.hyperplane(i).coeffs().to_vec()).collect()
}

/// Rank by fraction-free elimination; rows are copied.
pub fn rank(rows: &[Row], cols: usize) -> usize {
    let mut m: Vec<Row> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Row]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = BigInt::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Row> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][c] * det(&minor);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Rank as the largest nonvanishing minor.
pub fn minor_rank(rows: &[Row], cols: usize) -> usize {
    for s in (1..=rows.len().min(cols)).rev() {
        for ri in (0..rows.len()).combinations(s) {
            for ci in (0..cols).combinations(s) {
                let sub: Vec<Row> = ri.iter().map(|&i| ci.iter().map(|&j| rows[i][j].clone()).collect()).collect();
                if !det(&sub).is_zero() {
                    return s;
                }
            }
        }
    }
    0
}

/// Kernel of an m × (m+1) matrix of rank m: the signed maximal minors.
pub fn corank_one_kernel(rows: &[Row]) -> Row {
    let cols = rows.len() + 1;
    (0..cols)
        .map(|c| {
            let sub: Vec<Row> =
                rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect()).collect();
            let d = det(&sub);
            if c % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The form spanned by both {h_j} and {h_k}, from the relation Σ a_j h_j = Σ b_k h_k.
pub fn diagonal(a: &Arrangement, j: &[usize], k: &[usize]) -> Row {
    let cols: Vec<Row> = j.iter().chain(k).map(|&i| a.hyperplane(i).coeffs().to_vec()).collect();
    let n1 = a.n() + 1;
    let m: Vec<Row> = (0..n1).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let coef = corank_one_kernel(&m);
    (0..n1).map(|r| j.iter().enumerate().map(|(t, &i)| &coef[t] * &a.hyperplane(i).coeffs()[r]).sum()).collect()
}

pub fn general_position(a: &Arrangement) -> bool {
    let n = a.n();
    (0..a.q()).combinations(n + 1).all(|s| rank(&big_rows(a, &s), n + 1) == n + 1)
}

/// One tuple of the generic condition: base I, removable J, diagonal partners and extras drawn from I.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub partitions: Vec<Vec<usize>>,
    pub extra: Vec<usize>,
}

/// (expected codimension, rank of the stacked forms, verdict).
pub fn check_tuple(a: &Arrangement, t: &Tuple) -> (usize, usize, bool) {
    let n = a.n();
    let mut rows = big_rows(a, &t.j);
    for p in &t.partitions {
        rows.push(diagonal(a, &t.i, p));
    }
    rows.extend(big_rows(a, &t.extra));
    let expected = (t.partitions.len() + t.extra.len()).min(t.i.len()) + t.j.len();
    let r = rank(&rows, n + 1);
    let ok = if expected <= n { r == expected } else { r == n + 1 };
    (expected, r, ok)
}

fn disjoint_families(pool: &[usize], size: usize, out: &mut Vec<Vec<Vec<usize>>>, acc: &mut Vec<Vec<usize>>) {
    out.push(acc.clone());
    let min_next = acc.last().cloned();
    for c in pool.iter().copied().combinations(size) {
        if min_next.as_ref().is_some_and(|m| &c <= m) {
            continue;
        }
        if acc.iter().any(|p| p.iter().any(|x| c.contains(x))) {
            continue;
        }
        acc.push(c);
        disjoint_families(pool, size, out, acc);
        acc.pop();
    }
}

/// Every tuple, checked exhaustively: all J (no emptiness shortcut), all extras, and the k = 0 family.
/// Enumeration runs |I| descending, then extras, then J, then partitions; returns the first failure.
pub fn generic_oracle(a: &Arrangement) -> Option<(Tuple, usize, usize)> {
    let n = a.n();
    let q = a.q();
    for s in (2..=n).rev() {
        let t = n + 2 - s;
        for i in (0..q).combinations(s) {
            let rem: Vec<usize> = (0..q).filter(|x| !i.contains(x)).collect();
            let mut fams = Vec::new();
            disjoint_families(&rem, t, &mut fams, &mut Vec::new());
            let diag: std::collections::HashMap<Vec<usize>, Row> =
                rem.iter().copied().combinations(t).map(|c| (c.clone(), diagonal(a, &i, &c))).collect();
            for l in (0..=s).rev() {
                for extra in i.iter().copied().combinations(l) {
                    for fam in &fams {
                        if fam.is_empty() && l == 0 {
                            continue;
                        }
                        let used: Vec<usize> = fam.iter().flatten().copied().collect();
                        let free: Vec<usize> = rem.iter().copied().filter(|x| !used.contains(x)).collect();
                        for j in free.iter().copied().powerset() {
                            let mut rows = big_rows(a, &j);
                            rows.extend(fam.iter().map(|p| diag[p].clone()));
                            rows.extend(big_rows(a, &extra));
                            let expected = (fam.len() + l).min(s) + j.len();
                            let r = rank(&rows, n + 1);
                            let ok = if expected <= n { r == expected } else { r == n + 1 };
                            if !ok {
                                let tuple = Tuple { i: i.clone(), j, partitions: fam.clone(), extra: extra.clone() };
                                return Some((tuple, expected, r));
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, q: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..q)
        .map(|_| loop {
            let v: Vec<i64> = (0..=n).map(|_| rng.gen_range(-bound..=bound)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Row {
    loop {
        let v: Row = (0..len).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// v − (v·p / p_c) e_c scaled by p_c: a vector orthogonal to p.
pub fn orthogonal_to(v: &[BigInt], p: &[BigInt]) -> Row {
    let c = p.iter().position(|x| !x.is_zero()).expect("nonzero point");
    let vp = dot(v, p);
    let mut out: Row = v.iter().map(|x| x * &p[c]).collect();
    out[c] -= vp;
    out
}

pub fn hyperplane(v: Row) -> Hyperplane {
    Hyperplane::from_bigints(v).expect("nonzero form")
}

pub fn rats(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(Rat::from).collect()
}

pub fn rat_i(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from(x)).collect()
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs_max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.abs().bits()).max().unwrap_or(0)
}

/// Binomial coefficient from Pascal's rule.
pub fn pascal(n: usize, k: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}
