use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NevanError;
use crate::exactalg::Rat;

/// Maximum equality witnesses kept per inequality (the total count is always reported).
pub const WITNESS_CAP: usize = 64;

/// An inequality lhs(x) ≤ rhs(x) over integer tuples x ∈ [1..B]^arity satisfying a side condition.
pub struct Inequality {
    pub name: &'static str,
    pub anchor: &'static str,
    pub formula: &'static str,
    pub variables: &'static [&'static str],
    pub side_conditions: &'static str,
    pub side: fn(&[u32]) -> bool,
    pub lhs: fn(&[u32]) -> Rat,
    pub rhs: fn(&[u32]) -> Rat,
}

fn tr(o: u32, k: u32) -> u32 {
    o.min(k)
}

fn min3(x: &[u32]) -> u32 {
    x[0].min(x[1]).min(x[2])
}

fn sum_tr3(x: &[u32]) -> u32 {
    tr(x[0], 3) + tr(x[1], 3) + tr(x[2], 3)
}

fn pairwise_min_at_most(x: &[u32], b: u32) -> bool {
    x[0].min(x[1]) <= b && x[0].min(x[2]) <= b && x[1].min(x[2]) <= b
}

fn int(v: u32) -> Rat {
    Rat::from(v as i64)
}

fn ratio(p: i64, q: i64, v: u32) -> Rat {
    &Rat::new(p, q) * &int(v)
}

/// The elementary order inequalities used by the star-subspace and curve-avoidance arguments.
///
/// Variables o_i are vanishing orders of the coordinate forms at a preimage point; r, s, c, l
/// are orders of auxiliary curves (quintic, quadric, cubic, lines) through the same point.
pub fn inventory() -> Vec<Inequality> {
    vec![
        Inequality {
            name: "two lines through a point",
            anchor: "≤ 3 min_{1≤j≤2}",
            formula: "min(o1,2) + min(o2,2) ≤ 3·min(o1,o2)",
            variables: &["o1", "o2"],
            side_conditions: "none",
            side: |_| true,
            lhs: |x| int(tr(x[0], 2) + tr(x[1], 2)),
            rhs: |x| int(3 * x[0].min(x[1])),
        },
        Inequality {
            name: "pair of forms at level 3",
            anchor: "≤ 4 min_{4≤i≤5}",
            formula: "min(o1,3) + min(o2,3) ≤ 4·min(o1,o2)",
            variables: &["o1", "o2"],
            side_conditions: "none",
            side: |_| true,
            lhs: |x| int(tr(x[0], 3) + tr(x[1], 3)),
            rhs: |x| int(4 * x[0].min(x[1])),
        },
        Inequality {
            name: "three forms, low orders",
            anchor: "≤ 5 min_{1≤i≤3}",
            formula: "Σ_{i≤3} min(o_i,3) ≤ 5·min(o1,o2,o3)",
            variables: &["o1", "o2", "o3"],
            side_conditions: "all o_i ≤ 2",
            side: |x| x.iter().all(|&o| o <= 2),
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| int(5 * min3(x)),
        },
        Inequality {
            name: "three forms, one high order",
            anchor: "≤ 3 min_{1≤i≤3}",
            formula: "min(o2,3) + min(o3,3) ≤ 3·min(o1,o2,o3)",
            variables: &["o1", "o2", "o3"],
            side_conditions: "o1 ≥ 3, o2 ≤ 2, o3 ≤ 2",
            side: |x| x[0] >= 3 && x[1] <= 2 && x[2] <= 2,
            lhs: |x| int(tr(x[1], 3) + tr(x[2], 3)),
            rhs: |x| int(3 * min3(x)),
        },
        Inequality {
            name: "three forms, simple point",
            anchor: "≤ 6 = 6 min",
            formula: "Σ_{i≤3} min(o_i,3) ≤ 6·min(o1,o2,o3)",
            variables: &["o1", "o2", "o3"],
            side_conditions: "min(o) = 1, o2 ≤ 2, o3 ≤ 2",
            side: |x| min3(x) == 1 && x[1] <= 2 && x[2] <= 2,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| int(6 * min3(x)),
        },
        Inequality {
            name: "quadric through a simple point",
            anchor: "3 min ≤ ord(p1) + ord(p2)",
            formula: "3·min(o1,o2,o3) ≤ p1 + p2",
            variables: &["o1", "o2", "o3", "p1", "p2"],
            side_conditions: "min(o) = 1, p1 ≥ 2",
            side: |x| min3(x) == 1 && x[3] >= 2,
            lhs: |x| int(3 * min3(x)),
            rhs: |x| int(x[3] + x[4]),
        },
        Inequality {
            name: "three forms, pairwise bounded",
            anchor: "≤ 6 (pairwise min ≤ 2)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ 6",
            variables: &["o1", "o2", "o3"],
            side_conditions: "min(o) = 1, every pairwise min ≤ 2",
            side: |x| min3(x) == 1 && pairwise_min_at_most(x, 2),
            lhs: |x| int(sum_tr3(x)),
            rhs: |_| int(6),
        },
        Inequality {
            name: "three forms, pairwise simple",
            anchor: "≤ 5 = 5 min_{1≤i≤3}",
            formula: "Σ_{i≤3} min(o_i,3) ≤ 5·min(o1,o2,o3)",
            variables: &["o1", "o2", "o3"],
            side_conditions: "every pairwise min = 1",
            side: |x| pairwise_min_at_most(x, 1),
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| int(5 * min3(x)),
        },
        Inequality {
            name: "quintic ratio 6/5",
            anchor: "≤ 6/5 ord(r)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (6/5)·r",
            variables: &["o1", "o2", "o3", "r"],
            side_conditions: "min(o) = 1, every pairwise min ≤ 2, r ≥ 5",
            side: |x| min3(x) == 1 && pairwise_min_at_most(x, 2) && x[3] >= 5,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(6, 5, x[3]),
        },
        Inequality {
            name: "quintic ratio 5/4",
            anchor: "≤ 5/4 ord(r)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (5/4)·r",
            variables: &["o1", "o2", "o3", "r"],
            side_conditions: "o1 = o2 = 1, r ≥ 4",
            side: |x| x[0] == 1 && x[1] == 1 && x[3] >= 4,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(5, 4, x[3]),
        },
        Inequality {
            name: "quadric ratio 6/3",
            anchor: "≤ 6/3 ord(s)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (6/3)·s",
            variables: &["o1", "o2", "o3", "s"],
            side_conditions: "min(o) = 1, every pairwise min ≤ 2, s ≥ 3",
            side: |x| min3(x) == 1 && pairwise_min_at_most(x, 2) && x[3] >= 3,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(6, 3, x[3]),
        },
        Inequality {
            name: "quadric ratio 5/2",
            anchor: "≤ 5/2 ord(s)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (5/2)·s",
            variables: &["o1", "o2", "o3", "s"],
            side_conditions: "o1 = o2 = 1, s ≥ 2",
            side: |x| x[0] == 1 && x[1] == 1 && x[3] >= 2,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(5, 2, x[3]),
        },
        Inequality {
            name: "cubic ratio 1/4",
            anchor: "≤ 1/4 Σ ord(b_i)",
            formula: "min(o1,o2,o3) ≤ (1/4)·(b1 + b2 + b3)",
            variables: &["o1", "o2", "o3", "b1", "b2", "b3"],
            side_conditions: "min(o) = 1, b1 + b2 + b3 ≥ 4",
            side: |x| min3(x) == 1 && x[3] + x[4] + x[5] >= 4,
            lhs: |x| int(min3(x)),
            rhs: |x| ratio(1, 4, x[3] + x[4] + x[5]),
        },
        Inequality {
            name: "cubic ratio 1/3",
            anchor: "≤ 1/3 ord(c)",
            formula: "min(o1,o2,o3) ≤ (1/3)·c",
            variables: &["o1", "o2", "o3", "c"],
            side_conditions: "min(o) = 1, c ≥ 3",
            side: |x| min3(x) == 1 && x[3] >= 3,
            lhs: |x| int(min3(x)),
            rhs: |x| ratio(1, 3, x[3]),
        },
        Inequality {
            name: "cubic ratio 3/2",
            anchor: "≤ 3/2 ord(c)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (3/2)·c",
            variables: &["o1", "o2", "o3", "c"],
            side_conditions: "min(o) = 1, every pairwise min ≤ 2, c ≥ 4",
            side: |x| min3(x) == 1 && pairwise_min_at_most(x, 2) && x[3] >= 4,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(3, 2, x[3]),
        },
        Inequality {
            name: "cubic ratio 5/3",
            anchor: "≤ 5/3 ord(c)",
            formula: "Σ_{i≤3} min(o_i,3) ≤ (5/3)·c",
            variables: &["o1", "o2", "o3", "c"],
            side_conditions: "every pairwise min = 1, c ≥ 3",
            side: |x| pairwise_min_at_most(x, 1) && x[3] >= 3,
            lhs: |x| int(sum_tr3(x)),
            rhs: |x| ratio(5, 3, x[3]),
        },
        Inequality {
            name: "two lines of a degenerate cubic",
            anchor: "2 min ≤ ord(ℓ_AB) + ord(ℓ_CA)",
            formula: "2·min(o1,o2) ≤ l1 + l2",
            variables: &["o1", "o2", "l1", "l2"],
            side_conditions: "l1 ≥ min(o1,o2), l2 ≥ min(o1,o2)",
            side: |x| x[2] >= x[0].min(x[1]) && x[3] >= x[0].min(x[1]),
            lhs: |x| int(2 * x[0].min(x[1])),
            rhs: |x| int(x[2] + x[3]),
        },
        Inequality {
            name: "tangent conic ratio 1/3",
            anchor: "≤ 1/3 ord(e)",
            formula: "min(o1,o2) ≤ (1/3)·e",
            variables: &["o1", "o2", "e"],
            side_conditions: "min(o1,o2) = 1, e ≥ 3",
            side: |x| x[0].min(x[1]) == 1 && x[2] >= 3,
            lhs: |x| int(x[0].min(x[1])),
            rhs: |x| ratio(1, 3, x[2]),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub anchor: String,
    pub formula: String,
    pub variables: Vec<String>,
    pub side_conditions: String,
    pub domain: String,
    pub tuples_swept: u64,
    pub tuples_in_domain: u64,
    pub pass: bool,
    pub counterexamples: Vec<Vec<u32>>,
    pub equality_count: u64,
    pub equality_witnesses: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub bound: u32,
    pub all_pass: bool,
    pub inequalities: Vec<InequalityReport>,
}

impl CertificateReport {
    pub fn to_table(&self) -> String {
        let mut s = format!("bound {}\n", self.bound);
        for r in &self.inequalities {
            s.push_str(&format!(
                "{:<4} {:<34} {:<32} domain {:>7} equalities {:>5} counterexamples {}\n",
                if r.pass { "ok" } else { "FAIL" },
                r.name,
                r.anchor,
                r.tuples_in_domain,
                r.equality_count,
                r.counterexamples.len()
            ));
        }
        s
    }
}

#[derive(Default)]
struct Partial {
    in_domain: u64,
    counter: Vec<Vec<u32>>,
    eq_count: u64,
    eq: Vec<Vec<u32>>,
}

impl Partial {
    fn merge(mut self, o: Partial) -> Partial {
        self.in_domain += o.in_domain;
        self.counter.extend(o.counter);
        self.eq_count += o.eq_count;
        self.eq.extend(o.eq);
        self.eq.truncate(WITNESS_CAP);
        self
    }
}

/// Sweeps one inequality over [1..B]^arity; the first coordinate is split across workers.
pub fn sweep(ineq: &Inequality, bound: u32) -> InequalityReport {
    let k = ineq.variables.len();
    let p = (1..=bound)
        .into_par_iter()
        .map(|first| {
            let mut part = Partial::default();
            let mut x = vec![1u32; k];
            x[0] = first;
            loop {
                if (ineq.side)(&x) {
                    part.in_domain += 1;
                    let (l, r) = ((ineq.lhs)(&x), (ineq.rhs)(&x));
                    if l > r {
                        part.counter.push(x.clone());
                    } else if l == r {
                        part.eq_count += 1;
                        if part.eq.len() < WITNESS_CAP {
                            part.eq.push(x.clone());
                        }
                    }
                }
                // Odometer over coordinates 1..k.
                let mut i = k;
                loop {
                    if i == 1 {
                        return part;
                    }
                    i -= 1;
                    if x[i] < bound {
                        x[i] += 1;
                        break;
                    }
                    x[i] = 1;
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::default(), Partial::merge);
    InequalityReport {
        name: ineq.name.into(),
        anchor: ineq.anchor.into(),
        formula: ineq.formula.into(),
        variables: ineq.variables.iter().map(|v| v.to_string()).collect(),
        side_conditions: ineq.side_conditions.into(),
        domain: format!("[1..{bound}]^{k}"),
        tuples_swept: (bound as u64).pow(k as u32),
        tuples_in_domain: p.in_domain,
        pass: p.counter.is_empty(),
        counterexamples: p.counter,
        equality_count: p.eq_count,
        equality_witnesses: p.eq,
    }
}

/// Sweeps the whole inventory.
pub fn certify_inequalities(bound: u32) -> Result<CertificateReport, NevanError> {
    if bound < 2 {
        return Err(NevanError::Precondition(format!("sweep bound {bound} is below 2")));
    }
    let inequalities: Vec<InequalityReport> = inventory().iter().map(|i| sweep(i, bound)).collect();
    Ok(CertificateReport { bound, all_pass: inequalities.iter().all(|r| r.pass), inequalities })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_inequality_has_a_nonempty_domain() {
        let r = certify_inequalities(6).unwrap();
        for i in &r.inequalities {
            assert!(i.tuples_in_domain > 0, "{}", i.name);
        }
    }

    #[test]
    fn a_false_inequality_is_caught() {
        let bad = Inequality {
            name: "false",
            anchor: "",
            formula: "o1 + o2 ≤ 3",
            variables: &["o1", "o2"],
            side_conditions: "none",
            side: |_| true,
            lhs: |x| int(x[0] + x[1]),
            rhs: |_| int(3),
        };
        let r = sweep(&bad, 3);
        assert!(!r.pass);
        assert_eq!(r.counterexamples, vec![vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 1], vec![3, 2], vec![3, 3]]);
        assert_eq!(r.equality_witnesses, vec![vec![1, 2], vec![2, 1]]);
    }
}
