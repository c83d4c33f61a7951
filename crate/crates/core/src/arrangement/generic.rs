use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::collections::HashMap;

use super::{diagonal_parts, Arrangement, ArrangementError};
use crate::exactalg::int_rank;
use crate::Verdict;

/// A tuple (I, J, J_1..J_k, extra) whose stacked forms have the wrong rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityViolation {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub partitions: Vec<Vec<usize>>,
    pub extra: Vec<usize>,
    pub expected_codim: usize,
    pub actual_codim: usize,
}

impl GenericityViolation {
    /// The expected intersection was empty but the forms have a common zero.
    pub fn nonempty_though_expected_empty(&self, n: usize) -> bool {
        self.expected_codim > n && self.actual_codim <= n
    }
}

impl Arrangement {
    /// Checks the full generic condition; returns the first violating tuple in enumeration order.
    ///
    /// Order: |I| ascending, I lexicographic, k ascending, partitions in sorted normal form,
    /// J by size then lexicographic, l ascending, extra subsets lexicographic.
    /// Tuples with k = 0 stack distinct original forms only and are discharged by general position.
    pub fn is_generic(&self) -> Result<Verdict<GenericityViolation>, ArrangementError> {
        let n = self.n;
        let q = self.q();
        if q < n + 2 {
            return Err(ArrangementError::TooFewHyperplanes { q, needed: n + 2 });
        }
        if q > 64 {
            return Err(ArrangementError::Precondition("families larger than 64 are not supported".into()));
        }
        self.require_general_position()?;
        let tasks: Vec<Vec<usize>> = (2..=n).flat_map(|s| (0..q).combinations(s)).collect();
        let found = tasks.par_iter().find_map_first(|iset| match check_i(self, iset) {
            Ok(None) => None,
            Ok(Some(v)) => Some(Ok(v)),
            Err(e) => Some(Err(e)),
        });
        match found {
            None => Ok(Verdict::Holds),
            Some(Ok(v)) => Ok(Verdict::Fails(v)),
            Some(Err(e)) => Err(e),
        }
    }
}

fn mask_of(idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

/// Index lists into `combos` forming k pairwise disjoint sets, increasing (sorted normal form).
fn partitions(masks: &[u64], k: usize) -> Vec<Vec<usize>> {
    fn rec(masks: &[u64], k: usize, start: usize, used: u64, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for c in start..masks.len() {
            if masks[c] & used == 0 {
                acc.push(c);
                rec(masks, k, c + 1, used | masks[c], acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(masks, k, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Restriction data for one J: the rank contribution of forms in span(h_I) once ∩_J is imposed.
struct JData {
    /// Column count n + 1 - |J| of the restricted coordinates.
    cols: usize,
    /// Images of the diagonal forms (indexed like `combos`).
    diag_images: Vec<Vec<BigInt>>,
    /// Images of h_i for i in I (in I order).
    i_images: Vec<Vec<BigInt>>,
}

fn j_data(a: &Arrangement, iset: &[usize], jset: &[usize], diag_alpha: &[Vec<BigInt>]) -> JData {
    let basis = a.restriction_basis(jset);
    let g: Vec<Vec<BigInt>> = iset
        .iter()
        .map(|&i| basis.iter().map(|b| a.hyperplane(i).eval_int(b)).collect())
        .collect();
    let cols = basis.len();
    let diag_images = diag_alpha
        .iter()
        .map(|alpha| (0..cols).map(|c| alpha.iter().zip(&g).map(|(x, row)| x * &row[c]).sum()).collect())
        .collect();
    JData { cols, diag_images, i_images: g }
}

fn unit(s: usize, t: usize) -> Vec<BigInt> {
    (0..s).map(|x| BigInt::from((x == t) as i64)).collect()
}

// Every form among the diagonals H_{I J_i} and the extras h_i lies in span(h_I); write V for them.
// With |J| + |I| <= n + 1 the rows of I ∪ J are independent, so rank(J ∪ V) = |J| + rank(V)
// and the verdict equals the J = ∅ verdict, which is checked first. With |J| >= n + 1 the J rows
// alone have full rank. Otherwise rank(J ∪ V) = |J| + rank(V restricted to ∩_J).
fn check_i(a: &Arrangement, iset: &[usize]) -> Result<Option<GenericityViolation>, ArrangementError> {
    let n = a.n;
    let q = a.q();
    let s = iset.len();
    let t = n + 2 - s;
    let imask = mask_of(iset);
    let rem: Vec<usize> = (0..q).filter(|x| imask & (1 << x) == 0).collect();
    let combos: Vec<Vec<usize>> = rem.iter().copied().combinations(t).collect();
    let masks: Vec<u64> = combos.iter().map(|c| mask_of(c)).collect();
    let diag_alpha: Vec<Vec<BigInt>> = combos
        .iter()
        .map(|c| diagonal_parts(a, iset, c).map(|(alpha, _)| alpha))
        .collect::<Result<_, _>>()?;
    let extras: Vec<Vec<Vec<usize>>> = (0..=s).map(|l| (0..s).combinations(l).collect()).collect();
    let units: Vec<Vec<BigInt>> = (0..s).map(|x| unit(s, x)).collect();
    let mut jcache: HashMap<u64, JData> = HashMap::new();

    let violation = |jset: Vec<usize>, part: &[usize], extra: &[usize], expected: usize, actual: usize| {
        GenericityViolation {
            i: iset.to_vec(),
            j: jset,
            partitions: part.iter().map(|&c| combos[c].clone()).collect(),
            extra: extra.iter().map(|&x| iset[x]).collect(),
            expected_codim: expected,
            actual_codim: actual,
        }
    };

    for k in 1..=rem.len() / t {
        for part in partitions(&masks, k) {
            // J = ∅: ranks inside span(h_I), coordinates over I.
            for (l, subsets) in extras.iter().enumerate() {
                let expected = (k + l).min(s);
                for extra in subsets {
                    let mut rows: Vec<&[BigInt]> = part.iter().map(|&c| diag_alpha[c].as_slice()).collect();
                    rows.extend(extra.iter().map(|&x| units[x].as_slice()));
                    let r = int_rank(&rows, s);
                    if r != expected {
                        return Ok(Some(violation(Vec::new(), &part, extra, expected, r)));
                    }
                }
            }
            let used = part.iter().fold(0u64, |m, &c| m | masks[c]);
            let free: Vec<usize> = rem.iter().copied().filter(|x| used & (1 << x) == 0).collect();
            let lo = n + 2 - s;
            for jsize in lo..=free.len().min(n) {
                for jset in free.iter().copied().combinations(jsize) {
                    let jd = jcache.entry(mask_of(&jset)).or_insert_with(|| j_data(a, iset, &jset, &diag_alpha));
                    for (l, subsets) in extras.iter().enumerate() {
                        let expected = (k + l).min(s) + jsize;
                        for extra in subsets {
                            let mut rows: Vec<&[BigInt]> =
                                part.iter().map(|&c| jd.diag_images[c].as_slice()).collect();
                            rows.extend(extra.iter().map(|&x| jd.i_images[x].as_slice()));
                            let r = jsize + int_rank(&rows, jd.cols);
                            let ok = if expected <= n { r == expected } else { r > n };
                            if !ok {
                                return Ok(Some(violation(jset.clone(), &part, extra, expected, r)));
                            }
                        }
                        if expected > n {
                            // Larger tuples contain an already-empty intersection.
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
