//! Hyperplane families in projective space and their incidence predicates.

mod generic;
mod random;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactalg::{
    canonical_projective, int_kernel, int_kernel_raw, int_rank, primitive_integer_vector, primitive_part, Rat,
};
use crate::Verdict;

pub use generic::GenericityViolation;
pub use random::{random_family, random_generic, Generated};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("empty family")]
    EmptyFamily,
    #[error("hyperplane {0} has an all-zero coefficient vector")]
    ZeroForm(usize),
    #[error("hyperplane {index} has {len} coefficients, expected {expected}")]
    LengthMismatch { index: usize, len: usize, expected: usize },
    #[error("hyperplanes {0} and {1} coincide")]
    DuplicateHyperplane(usize, usize),
    #[error("predicate needs q >= {needed}, family has q = {q}")]
    TooFewHyperplanes { q: usize, needed: usize },
    #[error("index {index} out of range for q = {q}")]
    IndexOutOfRange { index: usize, q: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no diagonal hyperplane for J={j:?}, K={k:?}: row spans meet only in zero")]
    NoDiagonal { j: Vec<usize>, k: Vec<usize> },
    #[error("diagonal hyperplane for J={j:?}, K={k:?} is ambiguous: row spans meet in dimension {dim}")]
    Ambiguous { j: Vec<usize>, k: Vec<usize>, dim: usize },
    #[error("family is not in general position: subset {0:?} is dependent")]
    NotInGeneralPosition(Vec<usize>),
    #[error("restricted form of hyperplane {0} vanishes identically")]
    DegenerateRestriction(usize),
    #[error("no generic arrangement found after {tries} tries")]
    ExhaustedTries { tries: usize },
}

/// Linear form up to scale, stored as a primitive integer vector whose first nonzero entry is positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Hyperplane {
    coeffs: Vec<BigInt>,
}

impl Hyperplane {
    pub fn from_bigints(coeffs: Vec<BigInt>) -> Option<Self> {
        if coeffs.is_empty() || coeffs.iter().all(Zero::is_zero) {
            return None;
        }
        Some(Hyperplane { coeffs: canonical_projective(coeffs) })
    }

    pub fn from_rats(coeffs: &[Rat]) -> Option<Self> {
        Self::from_bigints(primitive_integer_vector(coeffs))
    }

    pub fn from_i64(coeffs: &[i64]) -> Option<Self> {
        Self::from_bigints(coeffs.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_rat(&self) -> Vec<Rat> {
        self.coeffs.iter().map(Rat::from).collect()
    }

    /// Number of homogeneous coordinates (n+1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first nonzero coefficient.
    pub fn pivot(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero form")
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.coeffs.len());
        self.coeffs.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| &Rat::from(c) * v).sum()
    }

    pub fn eval_int(&self, x: &[BigInt]) -> BigInt {
        self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

impl Serialize for Hyperplane {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for Hyperplane {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Rat> = Vec::deserialize(d)?;
        Hyperplane::from_rats(&v).ok_or_else(|| serde::de::Error::custom("zero or empty hyperplane"))
    }
}

/// Ordered family of pairwise distinct hyperplanes in P^n. Indices are 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrangement {
    n: usize,
    hyperplanes: Vec<Hyperplane>,
}

/// Intersection of the hyperplanes indexed by `indices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRef {
    pub indices: Vec<usize>,
    pub codim: usize,
}

impl SubspaceRef {
    /// Projective dimension n - codim; -1 encodes the empty set.
    pub fn dim(&self, n: usize) -> i64 {
        n as i64 - self.codim as i64
    }

    pub fn is_empty(&self, n: usize) -> bool {
        self.codim > n
    }
}

#[derive(Serialize, Deserialize)]
struct ArrangementJson {
    n: usize,
    q: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl Serialize for Arrangement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ArrangementJson { n: self.n, q: self.q(), hyperplanes: self.hyperplanes.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arrangement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ArrangementJson::deserialize(d)?;
        if j.q != j.hyperplanes.len() {
            return Err(serde::de::Error::custom(format!(
                "q = {} but {} hyperplanes listed",
                j.q,
                j.hyperplanes.len()
            )));
        }
        Arrangement::new(j.n, j.hyperplanes).map_err(serde::de::Error::custom)
    }
}

impl Arrangement {
    pub fn new(n: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, ArrangementError> {
        if hyperplanes.is_empty() {
            return Err(ArrangementError::EmptyFamily);
        }
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.len() != n + 1 {
                return Err(ArrangementError::LengthMismatch { index: i, len: h.len(), expected: n + 1 });
            }
        }
        for (i, j) in (0..hyperplanes.len()).tuple_combinations() {
            if hyperplanes[i] == hyperplanes[j] {
                return Err(ArrangementError::DuplicateHyperplane(i, j));
            }
        }
        Ok(Arrangement { n, hyperplanes })
    }

    pub fn from_i64_rows(n: usize, rows: &[Vec<i64>]) -> Result<Self, ArrangementError> {
        let hs = rows
            .iter()
            .enumerate()
            .map(|(i, r)| Hyperplane::from_i64(r).ok_or(ArrangementError::ZeroForm(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, hs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn hyperplane(&self, i: usize) -> &Hyperplane {
        &self.hyperplanes[i]
    }

    pub fn rows<'a>(&'a self, idx: &'a [usize]) -> impl Iterator<Item = &'a [BigInt]> + 'a {
        idx.iter().map(move |&i| self.hyperplanes[i].coeffs())
    }

    fn check_indices(&self, idx: &[usize]) -> Result<(), ArrangementError> {
        for &i in idx {
            if i >= self.q() {
                return Err(ArrangementError::IndexOutOfRange { index: i, q: self.q() });
            }
        }
        Ok(())
    }

    /// Rank of the stacked coefficient rows of `idx`.
    pub fn rank_of(&self, idx: &[usize]) -> usize {
        let rows: Vec<&[BigInt]> = self.rows(idx).collect();
        int_rank(&rows, self.n + 1)
    }

    /// True, or the lexicographically first dependent (n+1)-subset.
    pub fn is_general_position(&self) -> Result<Verdict<Vec<usize>>, ArrangementError> {
        let n = self.n;
        if self.q() <= n {
            return Err(ArrangementError::TooFewHyperplanes { q: self.q(), needed: n + 1 });
        }
        for s in (0..self.q()).combinations(n + 1) {
            if self.rank_of(&s) < n + 1 {
                return Ok(Verdict::Fails(s));
            }
        }
        Ok(Verdict::Holds)
    }

    pub fn require_general_position(&self) -> Result<(), ArrangementError> {
        match self.is_general_position()? {
            Verdict::Holds => Ok(()),
            Verdict::Fails(s) => Err(ArrangementError::NotInGeneralPosition(s)),
        }
    }

    pub fn intersect(&self, idx: &[usize]) -> Result<SubspaceRef, ArrangementError> {
        if idx.is_empty() {
            return Err(ArrangementError::Precondition("empty index set".into()));
        }
        self.check_indices(idx)?;
        let mut indices = idx.to_vec();
        indices.sort_unstable();
        indices.dedup();
        let codim = self.rank_of(&indices);
        Ok(SubspaceRef { indices, codim })
    }

    /// Unique hyperplane whose form lies in both row spans of J and K.
    pub fn diagonal_hyperplane(&self, j: &[usize], k: &[usize]) -> Result<Hyperplane, ArrangementError> {
        self.check_indices(j)?;
        self.check_indices(k)?;
        if j.len() < 2 || k.len() < 2 {
            return Err(ArrangementError::Precondition("|J| and |K| must be at least 2".into()));
        }
        if j.len() + k.len() != self.n + 2 {
            return Err(ArrangementError::Precondition(format!(
                "|J| + |K| = {} but n + 2 = {}",
                j.len() + k.len(),
                self.n + 2
            )));
        }
        if j.iter().any(|x| k.contains(x)) {
            return Err(ArrangementError::Precondition("J and K must be disjoint".into()));
        }
        let coeffs = diagonal_coeffs(self, j, k)?;
        let h = Hyperplane { coeffs };
        let mut rows_j: Vec<&[BigInt]> = self.rows(j).collect();
        let rj = int_rank(&rows_j, self.n + 1);
        rows_j.push(h.coeffs());
        let mut rows_k: Vec<&[BigInt]> = self.rows(k).collect();
        let rk = int_rank(&rows_k, self.n + 1);
        rows_k.push(h.coeffs());
        if int_rank(&rows_j, self.n + 1) != rj || int_rank(&rows_k, self.n + 1) != rk {
            return Err(ArrangementError::NoDiagonal { j: j.to_vec(), k: k.to_vec() });
        }
        Ok(h)
    }

    /// Single intersection point of each n-subset, in lexicographic order of the subsets.
    pub fn intersection_points(&self) -> Result<Vec<(Vec<usize>, Vec<BigInt>)>, ArrangementError> {
        let n = self.n;
        if self.q() < n {
            return Err(ArrangementError::TooFewHyperplanes { q: self.q(), needed: n });
        }
        (0..self.q())
            .combinations(n)
            .map(|s| {
                let rows: Vec<&[BigInt]> = self.rows(&s).collect();
                let mut ker = int_kernel(&rows, n + 1);
                if ker.len() != 1 {
                    return Err(ArrangementError::NotInGeneralPosition(s));
                }
                Ok((s, ker.pop().unwrap()))
            })
            .collect()
    }

    /// Family induced on the intersection of the hyperplanes in `idx`, in the remaining index order.
    pub fn restrict(&self, idx: &[usize]) -> Result<Arrangement, ArrangementError> {
        self.check_indices(idx)?;
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() + 1 > self.n {
            return Err(ArrangementError::Precondition(format!(
                "restriction needs |I| <= n - 1, got |I| = {}",
                sorted.len()
            )));
        }
        let rows: Vec<&[BigInt]> = self.rows(&sorted).collect();
        if int_rank(&rows, self.n + 1) != sorted.len() {
            return Err(ArrangementError::NotInGeneralPosition(sorted));
        }
        let basis = self.restriction_basis(&sorted);
        let mut out = Vec::new();
        for j in (0..self.q()).filter(|j| !sorted.contains(j)) {
            let h = self.hyperplanes[j].coeffs();
            let c: Vec<BigInt> = basis.iter().map(|b| b.iter().zip(h).map(|(x, y)| x * y).sum()).collect();
            out.push(Hyperplane::from_bigints(c).ok_or(ArrangementError::DegenerateRestriction(j))?);
        }
        Arrangement::new(self.n - sorted.len(), out)
    }

    /// Kernel basis of the rows in `idx`: columns of the parametrization used by [`Self::restrict`].
    pub fn restriction_basis(&self, idx: &[usize]) -> Vec<Vec<BigInt>> {
        let rows: Vec<&[BigInt]> = self.rows(idx).collect();
        if rows.is_empty() {
            return (0..=self.n)
                .map(|i| (0..=self.n).map(|j| BigInt::from((i == j) as i64)).collect())
                .collect();
        }
        int_kernel_raw(&rows, self.n + 1)
    }

    /// The family with its hyperplanes reordered: new index i holds old index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Arrangement, ArrangementError> {
        assert_eq!(perm.len(), self.q());
        Arrangement::new(self.n, perm.iter().map(|&i| self.hyperplanes[i].clone()).collect())
    }
}

/// Canonical coefficient vector of the row-span intersection of J and K.
pub(crate) fn diagonal_coeffs(a: &Arrangement, j: &[usize], k: &[usize]) -> Result<Vec<BigInt>, ArrangementError> {
    diagonal_parts(a, j, k).map(|(_, c)| c)
}

/// Coordinates over J (primitive, unnormalized sign) and canonical coefficients of the diagonal form.
pub(crate) fn diagonal_parts(
    a: &Arrangement,
    j: &[usize],
    k: &[usize],
) -> Result<(Vec<BigInt>, Vec<BigInt>), ArrangementError> {
    let dim = a.n + 1;
    let cols = j.len() + k.len();
    // Columns: h_j (j in J) then -h_k (k in K); kernel vectors give alpha over J.
    let mat: Vec<Vec<BigInt>> = (0..dim)
        .map(|r| {
            j.iter()
                .map(|&x| a.hyperplanes[x].coeffs()[r].clone())
                .chain(k.iter().map(|&x| -a.hyperplanes[x].coeffs()[r].clone()))
                .collect()
        })
        .collect();
    let ker = int_kernel_raw(&mat, cols);
    let images: Vec<Vec<BigInt>> = ker
        .iter()
        .map(|v| {
            (0..dim)
                .map(|r| j.iter().enumerate().map(|(t, &x)| &v[t] * &a.hyperplanes[x].coeffs()[r]).sum())
                .collect()
        })
        .collect();
    match int_rank(&images, dim) {
        0 => Err(ArrangementError::NoDiagonal { j: j.to_vec(), k: k.to_vec() }),
        1 => {
            let t = images.iter().position(|v| v.iter().any(|x| !x.is_zero())).unwrap();
            let alpha = primitive_part(ker[t][..j.len()].to_vec());
            Ok((alpha, canonical_projective(images[t].clone())))
        }
        d => Err(ArrangementError::Ambiguous { j: j.to_vec(), k: k.to_vec(), dim: d }),
    }
}
