use std::fmt;

use serde::{Deserialize, Serialize};

use super::{binomial, DeformError};

/// A star-subspace inside ∩_{i∈I} H_i: the intersection with H_j for j in `indices`,
/// with every other family member removed. `dim` is its dimension in P^{n−|I|}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSubspace {
    pub indices: Vec<usize>,
    pub dim: usize,
}

/// A complement ∩_I H_i ∖ (∪_J H_j ∖ (punctures ∪ A)) of the hypothesis family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementSpec {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    #[serde(rename = "J")]
    pub j: Vec<usize>,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<StarSubspace>,
}

impl ComplementSpec {
    pub fn new(n: usize, i: Vec<usize>, j: Vec<usize>, m: usize, a: Vec<StarSubspace>) -> Result<Self, String> {
        let c = ComplementSpec { i, j, m, a };
        c.validate(n)?;
        Ok(c)
    }

    pub fn validate(&self, n: usize) -> Result<(), String> {
        let (si, sj) = (self.i.len(), self.j.len());
        if si > n.saturating_sub(2) {
            return Err(format!("|I| = {si} exceeds n - 2"));
        }
        if self.i.iter().any(|x| self.j.contains(x)) {
            return Err("I and J intersect".into());
        }
        if sj + 2 * si < 2 * n + 1 {
            return Err(format!("|J| + 2|I| = {} < 2n + 1", sj + 2 * si));
        }
        let m_max = sj + 2 * si - (2 * n + 1);
        if self.m > m_max {
            return Err(format!("m = {} exceeds {m_max}", self.m));
        }
        if self.a.len() > self.m {
            return Err(format!("|A| = {} exceeds m = {}", self.a.len(), self.m));
        }
        let top = (n - si).checked_sub(2);
        for s in &self.a {
            if top.map_or(true, |t| s.dim > t) {
                return Err(format!("star-subspace {:?} has dimension {} > n - |I| - 2", s.indices, s.dim));
            }
            if s.indices.iter().any(|x| !self.j.contains(x)) {
                return Err(format!("star-subspace {:?} uses indices outside J", s.indices));
            }
        }
        Ok(())
    }
}

/// J = Q ∖ I rows: (|I|, |J|, m_max) and the number of index sets I.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub i_size: usize,
    pub j_size: usize,
    pub m_max: usize,
    pub count: u64,
}

/// Every admissible (|I|, |J|, m) of the hypothesis family, with the number of (I, J) choices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationRow {
    pub i_size: usize,
    pub j_size: usize,
    pub m: usize,
    pub count: u64,
}

/// Which known result gives the starting hyperbolicity of a row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Discharge {
    /// Complements of 2k+1 hyperplanes in general position in P^k.
    FujimotoGreen { ambient: usize },
    /// The starting lemma for complements in P^ambient with m star-subspaces.
    StartingLemma { ambient: usize, m: usize },
}

impl fmt::Display for Discharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discharge::FujimotoGreen { ambient } => write!(f, "Fujimoto-Green in P^{ambient}"),
            Discharge::StartingLemma { ambient, m } => write!(f, "start_lem_P{ambient} for m={m}"),
        }
    }
}

/// A starting-point row: ∩_I H_i ∖ (∪_J H_j ∖ A_{m, n−|I|}) with j_base + |A| ≤ |J| ≤ j_max.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistRow {
    pub i_size: usize,
    pub ambient_dim: usize,
    pub j_base: usize,
    pub j_max: usize,
    pub m: usize,
    pub discharged_by: Discharge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligations {
    pub n: usize,
    pub shapes: Vec<ShapeRow>,
    pub rows: Vec<ObligationRow>,
    pub checklist: Vec<ChecklistRow>,
}

/// The hypothesis complements needed by the deformation and where each starting row comes from.
/// |I| = 0 is absent: |J| + 2|I| ≥ 2n + 1 cannot hold with 2n hyperplanes.
pub fn enumerate_obligations(n: usize) -> Result<Obligations, DeformError> {
    if !(3..=6).contains(&n) {
        return Err(DeformError::UnsupportedDimension(n));
    }
    let q = 2 * n;
    let mut shapes = Vec::new();
    let mut rows = Vec::new();
    let mut checklist = Vec::new();
    for s in 1..=n - 2 {
        let j_full = q - s;
        shapes.push(ShapeRow { i_size: s, j_size: j_full, m_max: s - 1, count: binomial(q as u64, s as u64) });
        let j_base = 2 * (n - s) + 1;
        for j in j_base..=j_full {
            for m in 0..=(j + 2 * s - (2 * n + 1)) {
                rows.push(ObligationRow {
                    i_size: s,
                    j_size: j,
                    m,
                    count: binomial(q as u64, s as u64) * binomial(j_full as u64, j as u64),
                });
            }
        }
        let ambient = n - s;
        let m = s - 1;
        let discharged_by = if m == 0 {
            Discharge::FujimotoGreen { ambient }
        } else {
            Discharge::StartingLemma { ambient, m }
        };
        checklist.push(ChecklistRow { i_size: s, ambient_dim: ambient, j_base, j_max: j_full, m, discharged_by });
    }
    Ok(Obligations { n, shapes, rows, checklist })
}

impl Obligations {
    pub fn to_table(&self) -> String {
        let mut out = format!("n = {}\n\nstarting rows\n", self.n);
        out.push_str("|I|  ambient  |J| range          m  discharged by\n");
        for r in &self.checklist {
            let range = if r.m == 0 {
                format!("{}", r.j_max)
            } else {
                format!("{}+|A_{{{},{}}}|..{}", r.j_base, r.m, r.ambient_dim, r.j_max)
            };
            out.push_str(&format!(
                "{:<4} P^{:<6} {:<18} {:<2} {}\n",
                r.i_size, r.ambient_dim, range, r.m, r.discharged_by
            ));
        }
        out.push_str("\nJ = Q \\ I\n|I|  |J|  m_max  count\n");
        for r in &self.shapes {
            out.push_str(&format!("{:<4} {:<4} {:<6} {}\n", r.i_size, r.j_size, r.m_max, r.count));
        }
        out.push_str("\nall admissible shapes\n|I|  |J|  m  count\n");
        for r in &self.rows {
            out.push_str(&format!("{:<4} {:<4} {:<2} {}\n", r.i_size, r.j_size, r.m, r.count));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardinalityCase {
    /// Y = ∩_K H_k ∩ D has codimension one in ∩_K H_k.
    One,
    /// Y has codimension at least two; Y* joins the punctures.
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent sizes: {0}")]
pub struct CardinalityError(pub String);

/// The chain of lower bounds for the number of remaining hyperplanes, and the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityChain {
    /// Successive lower bounds; each must be ≥ the next.
    pub lines: Vec<i64>,
    pub target: i64,
}

/// Lower-bound chain for |J'| where J' = (J∖K)∖R (minus y in case 1), against the hypothesis
/// requirement 2(n−|K|) + 1 + (number of new star punctures).
#[allow(clippy::too_many_arguments)]
pub fn case_chain(
    n: usize,
    i_size: usize,
    j_size: usize,
    k_size: usize,
    jcapk_size: usize,
    b_size: usize,
    c_size: usize,
    case: CardinalityCase,
) -> Result<CardinalityChain, CardinalityError> {
    let bad = |s: String| Err(CardinalityError(s));
    if k_size <= i_size {
        return bad(format!("I must be a proper subset of K (|I| = {i_size}, |K| = {k_size})"));
    }
    if k_size > n - 1 {
        return bad(format!("|K| = {k_size} leaves no curve (need |K| <= n - 1)"));
    }
    if i_size > n - 2 {
        return bad(format!("|I| = {i_size} exceeds n - 2"));
    }
    if i_size + j_size > 2 * n {
        return bad("I and J are disjoint subsets of 2n indices".into());
    }
    if jcapk_size > j_size || jcapk_size > k_size - i_size {
        return bad(format!("|J ∩ K| = {jcapk_size} exceeds min(|J|, |K ∖ I|)"));
    }
    if j_size + 2 * i_size < 2 * n + 1 {
        return bad(format!("|J| + 2|I| = {} < 2n + 1", j_size + 2 * i_size));
    }
    let m_max = j_size + 2 * i_size - (2 * n + 1);
    if b_size + c_size > m_max {
        return bad(format!("|B| + |C| = {} exceeds m_max = {m_max}", b_size + c_size));
    }
    if b_size > j_size - jcapk_size {
        return bad("R must lie in J ∖ K".into());
    }
    let (n, i, j, k, jk, b, c) =
        (n as i64, i_size as i64, j_size as i64, k_size as i64, jcapk_size as i64, b_size as i64, c_size as i64);
    let y = match case {
        CardinalityCase::One => 1,
        CardinalityCase::Two => 0,
    };
    // |J∖K| − |B| − y, then |B| ≤ m_max − |C|, then the closed form, then 2(K∖I) − |J∩K| ≥ 1.
    let l1 = j - jk - b - y;
    let l2 = j - jk - (j + 2 * i - 2 * n - 1 - c) - y;
    let l3 = 2 * (n - k) + c + 2 * (k - i) - jk + 1 - y;
    let l4 = 2 * (n - k) + 1 + c + (1 - y);
    let target = 2 * (n - k) + 1 + c + (1 - y);
    Ok(CardinalityChain { lines: vec![l1, l2, l3, l4], target })
}

/// Whether the derived complement again has the hypothesis shape: the chain is monotone,
/// its closed form is exact, and the final bound meets the target.
#[allow(clippy::too_many_arguments)]
pub fn case_cardinality_check(
    n: usize,
    i_size: usize,
    j_size: usize,
    k_size: usize,
    jcapk_size: usize,
    b_size: usize,
    c_size: usize,
    case: CardinalityCase,
) -> Result<bool, CardinalityError> {
    let ch = case_chain(n, i_size, j_size, k_size, jcapk_size, b_size, c_size, case)?;
    let l = &ch.lines;
    Ok(l[0] >= l[1] && l[1] == l[2] && l[2] >= l[3] && l[3] >= ch.target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_case_example() {
        let ch = case_chain(4, 1, 7, 2, 0, 0, 0, CardinalityCase::One).unwrap();
        assert_eq!(ch.target, 5);
        assert!(ch.lines[0] >= 5);
        assert!(case_cardinality_check(4, 1, 7, 2, 0, 0, 0, CardinalityCase::One).unwrap());
        assert!(case_cardinality_check(4, 2, 6, 2, 0, 0, 0, CardinalityCase::One).is_err());
    }

    #[test]
    fn checklist_n6() {
        let o = enumerate_obligations(6).unwrap();
        assert_eq!(o.checklist.len(), 4);
        assert_eq!(o.checklist[3].discharged_by, Discharge::StartingLemma { ambient: 2, m: 3 });
        assert_eq!((o.checklist[3].j_base, o.checklist[3].j_max), (5, 8));
        assert!(enumerate_obligations(7).is_err());
    }
}
