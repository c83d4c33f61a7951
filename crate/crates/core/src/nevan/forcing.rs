use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::NevanError;
use crate::arrangement::Hyperplane;
use crate::exactalg::{int_rank, kernel, solve, Rat, RatMatrix, Solution};

/// Which stacked system to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingSystem {
    /// Value, first and second derivative rows for both forms: 6 equations in N unknowns, N λ's.
    TwoForms,
    /// The last coordinate eliminated via t = a_{2N} h1 − a_{1N} h2: 3 equations in N−1 unknowns.
    Eliminated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    /// No solution has all exponential coordinates nonzero.
    ForcedDependent,
    /// An explicit solution with every coordinate nonzero.
    NotForced { witness: Vec<Rat> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub system: ForcingSystem,
    pub rows: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub forms_dependent: bool,
    pub outcome: Forcing,
}

impl ForcingReport {
    /// Independent forms must be forced into a contradiction.
    pub fn confirms_forcing(&self) -> bool {
        self.forms_dependent || self.outcome == Forcing::ForcedDependent
    }
}

/// Rows Σ_j c_j λ_j^p x_j = −c_0 δ_{p0}, p = 0, 1, 2, for a form c with coefficients c_0..c_N.
fn vandermonde_rows(c: &[Rat], lambdas: &[Rat], rows: &mut Vec<Vec<Rat>>, rhs: &mut Vec<Rat>) {
    for p in 0..3 {
        rows.push(c[1..=lambdas.len()].iter().zip(lambdas).map(|(a, l)| a * &l.pow(p)).collect());
        rhs.push(if p == 0 { -&c[0] } else { Rat::zero() });
    }
}

/// Decides whether the stacked Vandermonde system admits a solution with all unknowns nonzero.
pub fn vandermonde_forcing(
    h1: &Hyperplane,
    h2: &Hyperplane,
    lambdas: &[Rat],
    system: ForcingSystem,
) -> Result<ForcingReport, NevanError> {
    if h1.len() != h2.len() {
        return Err(NevanError::Precondition("forms live in different dimensions".into()));
    }
    let nn = h1.len() - 1;
    if nn < 2 {
        return Err(NevanError::Precondition("forms need at least three coordinates".into()));
    }
    if system == ForcingSystem::Eliminated && (h1.coeffs()[nn].is_zero() || h2.coeffs()[nn].is_zero()) {
        return Err(NevanError::Precondition("elimination needs nonzero last coefficients".into()));
    }
    let expected = match system {
        ForcingSystem::TwoForms => nn,
        ForcingSystem::Eliminated => nn - 1,
    };
    if lambdas.len() != expected {
        return Err(NevanError::BadLambdas(format!("expected {expected} values, got {}", lambdas.len())));
    }
    for (i, l) in lambdas.iter().enumerate() {
        if l.is_zero() {
            return Err(NevanError::BadLambdas(format!("λ_{} is zero", i + 1)));
        }
        if lambdas[..i].contains(l) {
            return Err(NevanError::BadLambdas(format!("λ_{} repeats {l}", i + 1)));
        }
    }
    let forms_dependent = int_rank(&[h1.coeffs(), h2.coeffs()], nn + 1) < 2;
    let (a1, a2) = (h1.coeffs_rat(), h2.coeffs_rat());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    match system {
        ForcingSystem::TwoForms => {
            vandermonde_rows(&a1, lambdas, &mut rows, &mut rhs);
            vandermonde_rows(&a2, lambdas, &mut rows, &mut rhs);
        }
        ForcingSystem::Eliminated => {
            let t: Vec<Rat> = a1.iter().zip(&a2).map(|(x, y)| &(&a2[nn] * x) - &(&a1[nn] * y)).collect();
            vandermonde_rows(&t, lambdas, &mut rows, &mut rhs);
        }
    }
    let unknowns = expected;
    let m = RatMatrix::from_rows_with_cols(rows, unknowns);
    let rank = crate::exactalg::rank(&m);
    let outcome = match solve(&m, &rhs) {
        Solution::Inconsistent => Forcing::ForcedDependent,
        Solution::Solved(x0) => {
            let ker = kernel(&m);
            // Over an infinite field the affine solution set avoids every coordinate hyperplane
            // unless it lies inside one.
            let stuck = (0..unknowns).any(|j| x0[j].is_zero() && ker.iter().all(|k| k[j].is_zero()));
            if stuck {
                Forcing::ForcedDependent
            } else {
                Forcing::NotForced { witness: nonzero_point(&x0, &ker) }
            }
        }
    };
    Ok(ForcingReport { system, rows: m.rows(), unknowns, rank, forms_dependent, outcome })
}

/// x0 + Σ s^{i+1} k_i for the least s ≥ 0 making every coordinate nonzero.
///
/// Each coordinate is a nonzero polynomial in s of degree at most dim ker, so the search is finite.
fn nonzero_point(x0: &[Rat], ker: &[Vec<Rat>]) -> Vec<Rat> {
    (0i64..)
        .map(|s| {
            let s = Rat::from(s);
            let mut x = x0.to_vec();
            let mut w = s.clone();
            for k in ker {
                for (xi, ki) in x.iter_mut().zip(k) {
                    *xi += &(&w * ki);
                }
                w *= &s;
            }
            x
        })
        .find(|x| x.iter().all(|v| !v.is_zero()))
        .expect("finite search")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from(x)).collect()
    }

    #[test]
    fn dependent_forms_are_not_forced() {
        let h1 = Hyperplane::from_i64(&[1, 2, 3, 4]).unwrap();
        let h2 = Hyperplane::from_i64(&[2, 4, 6, 8]).unwrap();
        let r = vandermonde_forcing(&h1, &h2, &lam(&[1, 2, 3]), ForcingSystem::TwoForms).unwrap();
        assert!(r.forms_dependent);
        let Forcing::NotForced { witness } = &r.outcome else { panic!("expected a witness") };
        assert!(witness.iter().all(|v| !v.is_zero()));
        let e = vandermonde_forcing(&h1, &h2, &lam(&[1, 2]), ForcingSystem::Eliminated).unwrap();
        assert!(matches!(e.outcome, Forcing::NotForced { .. }));
    }

    #[test]
    fn independent_forms_are_forced() {
        let h1 = Hyperplane::from_i64(&[1, 2, 3, 4]).unwrap();
        let h2 = Hyperplane::from_i64(&[1, -1, 5, 2]).unwrap();
        for sys in [ForcingSystem::TwoForms, ForcingSystem::Eliminated] {
            let l = if sys == ForcingSystem::TwoForms { lam(&[1, 2, 3]) } else { lam(&[1, 3]) };
            let r = vandermonde_forcing(&h1, &h2, &l, sys).unwrap();
            assert!(!r.forms_dependent);
            assert_eq!(r.outcome, Forcing::ForcedDependent);
        }
    }

    #[test]
    fn bad_lambdas() {
        let h = Hyperplane::from_i64(&[1, 2, 3, 4]).unwrap();
        assert!(vandermonde_forcing(&h, &h, &lam(&[1, 1, 2]), ForcingSystem::TwoForms).is_err());
        assert!(vandermonde_forcing(&h, &h, &lam(&[0, 1, 2]), ForcingSystem::TwoForms).is_err());
        assert!(vandermonde_forcing(&h, &h, &lam(&[1, 2]), ForcingSystem::TwoForms).is_err());
    }
}
