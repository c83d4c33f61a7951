use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{canonical_projective, common_denominator, primitive_part, Rat};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

/// Outcome of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Solved(Vec<Rat>),
    Inconsistent,
}

impl Solution {
    pub fn into_option(self) -> Option<Vec<Rat>> {
        match self {
            Solution::Solved(x) => Some(x),
            Solution::Inconsistent => None,
        }
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        RatMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    /// Matrix with a given column count; allows zero rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        assert!(rows.iter().all(|x| x.len() == cols), "ragged matrix rows");
        RatMatrix { rows: rows.len(), cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rat::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Each row scaled by the lcm of its denominators (row span unchanged).
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = common_denominator(row);
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect()
    }
}

/// Fraction-free echelon form. Returns the reduced rows and their pivot columns.
/// Entries stay integral because every intermediate value is a minor of the input.
pub fn bareiss_echelon(mut m: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let piv_row = &top[r];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &piv_row[c] * &row[j] - &f * &piv_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

fn rank_i128(mut m: Vec<Vec<i128>>, cols: usize) -> Option<usize> {
    let rows = m.len();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            let f = m[i][c];
            m[i][c] = 0;
            for j in c + 1..cols {
                let v = m[r][c].checked_mul(m[i][j])?.checked_sub(f.checked_mul(m[r][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[r][c];
        r += 1;
    }
    Some(r)
}

/// Exact rank of an integer matrix given by rows.
pub fn int_rank<R: AsRef<[BigInt]>>(rows: &[R], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.as_ref().iter().map(|v| v.to_i64().map(i128::from)).collect())
        .collect();
    if let Some(small) = small {
        if let Some(r) = rank_i128(small, cols) {
            return r;
        }
    }
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
    bareiss_echelon(m, cols).1.len()
}

/// Rational back-substitution from an echelon form: reduced row echelon rows.
fn rref_from_echelon(ech: &[Vec<BigInt>], pivots: &[usize], cols: usize) -> Vec<Vec<Rat>> {
    let mut rows: Vec<Vec<Rat>> = ech
        .iter()
        .zip(pivots)
        .map(|(row, &p)| {
            let piv = Rat::from(&row[p]);
            row.iter().map(|v| &Rat::from(v) / &piv).collect()
        })
        .collect();
    for i in (0..rows.len()).rev() {
        let p = pivots[i];
        for k in 0..i {
            let f = rows[k][p].clone();
            if f.is_zero() {
                continue;
            }
            for j in p..cols {
                let d = &f * &rows[i][j];
                rows[k][j] -= &d;
            }
        }
    }
    rows
}

/// Exact rank over the rationals.
pub fn rank(m: &RatMatrix) -> usize {
    int_rank(&m.integer_rows(), m.cols)
}

/// Basis of the right nullspace; `cols - rank` vectors.
pub fn kernel(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let cols = m.cols;
    let (ech, pivots) = bareiss_echelon(m.integer_rows(), cols);
    let rref = rref_from_echelon(&ech, &pivots, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect()
}

/// A particular solution of `m x = b`, or `Inconsistent`.
pub fn solve(m: &RatMatrix, b: &[Rat]) -> Solution {
    assert_eq!(b.len(), m.rows, "right-hand side length mismatch");
    let cols = m.cols;
    let aug: Vec<Vec<Rat>> =
        (0..m.rows).map(|i| m.row(i).iter().cloned().chain(std::iter::once(b[i].clone())).collect()).collect();
    let aug = RatMatrix::from_rows_with_cols(aug, cols + 1);
    let (ech, pivots) = bareiss_echelon(aug.integer_rows(), cols + 1);
    if pivots.last() == Some(&cols) {
        return Solution::Inconsistent;
    }
    let rref = rref_from_echelon(&ech, &pivots, cols + 1);
    let mut x = vec![Rat::zero(); cols];
    for (row, &p) in rref.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    Solution::Solved(x)
}

/// Kernel basis of an integer matrix, each vector primitive with positive leading entry.
pub fn int_kernel<R: AsRef<[BigInt]>>(rows: &[R], cols: usize) -> Vec<Vec<BigInt>> {
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
    let (ech, pivots) = bareiss_echelon(m, cols);
    let rref = rref_from_echelon(&ech, &pivots, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            let l = common_denominator(&v);
            canonical_projective(v.iter().map(|x| x.numer() * (&l / x.denom())).collect())
        })
        .collect()
}

/// Integer kernel vectors without sign normalization (needed when orientation matters).
pub fn int_kernel_raw<R: AsRef<[BigInt]>>(rows: &[R], cols: usize) -> Vec<Vec<BigInt>> {
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
    let (ech, pivots) = bareiss_echelon(m, cols);
    let rref = rref_from_echelon(&ech, &pivots, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            let l = common_denominator(&v);
            primitive_part(v.iter().map(|x| x.numer() * (&l / x.denom())).collect())
        })
        .collect()
}
