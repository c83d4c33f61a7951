use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::NevanError;

/// Search cap on M.
pub const MAX_M: u64 = 1_000_000;
/// Largest supported m; keeps every gap within i128.
pub const MAX_COUNT: u64 = 1_000_000;

/// Parameters d = (m+2)M, k = 3M+1 satisfying both interpolation relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpolation {
    pub m: u64,
    #[serde(rename = "M")]
    pub m_min: u64,
    pub d: u64,
    pub k: u64,
    /// (d+1)(d+2)/2 − 1 − m·k(k+1)/2 at the returned M.
    pub gap: i128,
    /// The same gap at M − 1 (absent when M = 1).
    pub gap_before: Option<i128>,
}

/// Relation 1: k(m+2) > 3d.
pub fn relation1(m: u64, d: u64, k: u64) -> bool {
    BigInt::from(k) * (m + 2) > BigInt::from(3u8) * d
}

/// Relation 2 gap: (d+1)(d+2)/2 − 1 − m·k(k+1)/2, exact.
pub fn relation2_gap(m: u64, d: u64, k: u64) -> BigInt {
    let d = BigInt::from(d);
    let k = BigInt::from(k);
    (&d + 1u8) * (&d + 2u8) / 2u8 - 1u8 - BigInt::from(m) * &k * (&k + 1u8) / 2u8
}

/// Twice the gap as a quadratic in M: (m−1)(m−4)M² − 6(m−1)M − 2m.
pub fn gap_quadratic(m: u64) -> [BigInt; 3] {
    let m = BigInt::from(m);
    [&m * -2, (&m - 1u8) * -6, (&m - 1u8) * (&m - 4u8)]
}

/// Minimal M ≥ 1 for which d = (m+2)M, k = 3M+1 satisfy both relations.
pub fn interpolation_search(m: u64) -> Result<Interpolation, NevanError> {
    if m < 4 {
        return Err(NevanError::Precondition(format!("m = {m} is below 4")));
    }
    if m > MAX_COUNT {
        return Err(NevanError::Precondition(format!("m = {m} exceeds {MAX_COUNT}")));
    }
    // Relation 1 reads 3M + 1 > 3M and holds for every M.
    let [c0, c1, c2] = gap_quadratic(m);
    let zero = BigInt::from(0);
    if c2 <= zero && c1 <= zero && c0 <= zero {
        return Err(NevanError::Infeasible(format!(
            "m = {m}: twice the gap is {c2}·M² + {c1}·M + {c0}, never positive for M ≥ 1"
        )));
    }
    let mut prev: Option<i128> = None;
    for mm in 1..=MAX_M {
        let d = (m + 2) * mm;
        let k = 3 * mm + 1;
        debug_assert!(relation1(m, d, k));
        let gap = relation2_gap(m, d, k);
        let g = i128::try_from(&gap).expect("gap fits in i128");
        if gap > zero {
            return Ok(Interpolation { m, m_min: mm, d, k, gap: g, gap_before: prev });
        }
        prev = Some(g);
    }
    Err(NevanError::Infeasible(format!("m = {m}: no M ≤ {MAX_M}")))
}
