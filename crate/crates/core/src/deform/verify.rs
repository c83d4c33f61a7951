use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    check_family, congruence_check, exponent_rule, first_zero_value, pow2, schedule, Ctx, DeformationTrace, GpMethod,
    PointValues, Retention, VerificationRecord,
};
use crate::polyring::{product_of_forms, random_poly, HomoPoly};
use crate::Verdict;

/// A failed re-check, localized to a step (1-based) or to the trace header/final polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyError {
    pub step: Option<usize>,
    pub condition: String,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(t) => write!(f, "step {t}: {}", self.condition),
            None => write!(f, "{}", self.condition),
        }
    }
}

impl std::error::Error for VerifyError {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub steps_checked: usize,
    pub intersection_points: usize,
    pub final_degree: u32,
}

fn fail<T>(step: Option<usize>, condition: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError { step, condition: condition.into() })
}

fn first_difference(expected: &HomoPoly, got: &HomoPoly) -> String {
    if expected.degree() != got.degree() || expected.nvars() != got.nvars() {
        return format!(
            "degree/variables differ: expected {}/{}, recorded {}/{}",
            expected.degree(),
            expected.nvars(),
            got.degree(),
            got.nvars()
        );
    }
    let mut exps: Vec<Vec<u32>> = expected.terms().chain(got.terms()).map(|(e, _)| e.to_vec()).collect();
    exps.sort();
    exps.dedup();
    for e in exps {
        let (a, b) = (expected.coeff(&e), got.coeff(&e));
        if a != b {
            return format!("coefficient of monomial {e:?} is {b}, recomputed {a}");
        }
    }
    "polynomials differ".into()
}

/// Re-runs every check of a trace from its serialized contents.
pub fn verify(tr: &DeformationTrace) -> Result<VerifyReport, VerifyError> {
    let a = &tr.arrangement;
    let opts = &tr.options;
    let n = tr.n;
    if a.n() != n {
        return fail(None, format!("trace dimension {n} differs from the arrangement's {}", a.n()));
    }
    check_family(a).or_else(|e| fail(None, e.to_string()))?;
    match a.is_general_position() {
        Ok(Verdict::Holds) => {}
        Ok(Verdict::Fails(w)) => return fail(None, format!("arrangement not in general position at {w:?}")),
        Err(e) => return fail(None, e.to_string()),
    }
    if opts.check_generic {
        match a.is_generic() {
            Ok(Verdict::Holds) => {}
            Ok(Verdict::Fails(v)) => return fail(None, format!("arrangement not generic: {v:?}")),
            Err(e) => return fail(None, e.to_string()),
        }
    }
    let ctx = Ctx::new(a).or_else(|e| fail(None, e.to_string()))?;
    let deg = 2 * n as u32;

    let lo = opts.initial_seed;
    let used = tr.initial_seed_used;
    if used < lo || used - lo >= opts.max_seed_tries as u64 {
        return fail(None, format!("initial seed {used} outside the allowed range starting at {lo}"));
    }
    let expected_initial = random_poly(n, deg, opts.coeff_bound, used);
    if expected_initial != tr.initial {
        return fail(None, format!("initial polynomial: {}", first_difference(&expected_initial, &tr.initial)));
    }
    if let Some(w) = ctx.points.first_zero(&tr.initial) {
        return fail(None, format!("initial polynomial vanishes at the intersection of {w:?}"));
    }

    let sched = schedule(n);
    if tr.steps.len() != sched.len() {
        return fail(None, format!("trace has {} steps, schedule has {}", tr.steps.len(), sched.len()));
    }
    let mut cur = tr.initial.clone();
    let mut values = match opts.gp_method {
        GpMethod::Incremental => Some(PointValues::of(&ctx, &cur)),
        GpMethod::Direct => None,
    };
    for (k, (rec, (level, d))) in tr.steps.iter().zip(sched).enumerate() {
        let t = k + 1;
        let at = Some(t);
        let step = &rec.step;
        if rec.index != t {
            return fail(at, format!("recorded index {}", rec.index));
        }
        if step.level != level || step.d_indices != d {
            return fail(at, format!("subspace {:?} at level {} differs from the schedule {d:?}", step.d_indices, step.level));
        }
        if step.exponents != exponent_rule(n, &d) {
            return fail(at, "exponents differ from the exponent rule");
        }
        step.validate(n, a.q()).or_else(|e| fail(at, e.to_string()))?;
        if rec.halvings > opts.max_halvings {
            return fail(at, format!("{} halvings exceed the bound {}", rec.halvings, opts.max_halvings));
        }
        let eps = &opts.epsilon_rule.at(t) / &pow2(rec.halvings);
        if step.epsilon != eps {
            return fail(at, format!("epsilon {} differs from the rule value {eps}", step.epsilon));
        }
        let pi = product_of_forms(a, &step.exponents).or_else(|e| fail(at, e.to_string()))?;
        let scaled = cur.scale(&eps);
        let result = &scaled + &pi;
        match (&rec.result, opts.retention) {
            (Some(stored), _) => {
                if stored != &result {
                    return fail(at, format!("result polynomial: {}", first_difference(&result, stored)));
                }
            }
            (None, Retention::All) => return fail(at, "result polynomial missing"),
            (None, Retention::DigestsOnly) => {}
        }
        if result.digest() != rec.result_digest {
            return fail(at, "result digest mismatch");
        }
        if result.max_coeff_bits() != rec.max_coeff_bits {
            return fail(at, "recorded coefficient size mismatch");
        }
        if let Some(limit) = opts.max_coeff_bits {
            if rec.max_coeff_bits > limit {
                return fail(at, format!("coefficient size {} exceeds the limit {limit}", rec.max_coeff_bits));
            }
        }
        if result.degree() != deg {
            return fail(at, format!("degree {} is not {deg}", result.degree()));
        }
        let zero = match values.as_mut() {
            Some(v) => {
                let nv = v.advanced(&eps, &PointValues::product_values(&ctx, &step.exponents));
                let z = first_zero_value(&ctx, &nv);
                v.values = nv;
                z
            }
            None => ctx.points.first_zero(&result),
        };
        if let Some(w) = zero {
            return fail(at, format!("general position lost at the intersection of {w:?}"));
        }
        let (forms, congruence) = congruence_check(a, &scaled, &pi, &result, step, opts.congruence_method);
        if let Verdict::Fails(m) = congruence {
            return fail(at, format!("congruence modulo h_{m} fails"));
        }
        let expected_rec =
            VerificationRecord { degree: deg, general_position: Verdict::Holds, congruence_forms: forms, congruence };
        if rec.verification != expected_rec {
            return fail(at, "recorded verification verdicts differ from the recomputed ones");
        }
        cur = result;
    }

    let fin = Some(tr.steps.len() + 1);
    let fr = &tr.final_verification;
    if fr.halvings > opts.max_halvings {
        return fail(fin, "final halvings exceed the bound");
    }
    let eps = &opts.epsilon_rule.at(tr.steps.len() + 1) / &pow2(fr.halvings);
    if tr.final_epsilon != eps {
        return fail(fin, format!("final epsilon {} differs from the rule value {eps}", tr.final_epsilon));
    }
    let all = (0..2 * n).map(|i| (i, 1)).collect();
    let pi = product_of_forms(a, &all).or_else(|e| fail(fin, e.to_string()))?;
    let sigma = &cur.scale(&eps) + &pi;
    if sigma != tr.final_sigma {
        return fail(fin, format!("final polynomial: {}", first_difference(&sigma, &tr.final_sigma)));
    }
    if sigma.degree() != deg || fr.degree != deg {
        return fail(fin, "final degree mismatch");
    }
    if let Some(w) = ctx.points.first_zero(&sigma) {
        return fail(fin, format!("final polynomial vanishes at the intersection of {w:?}"));
    }
    if !fr.general_position.holds() {
        return fail(fin, "recorded final verdict is not a pass");
    }
    Ok(VerifyReport {
        n,
        steps_checked: tr.steps.len(),
        intersection_points: ctx.points.entries.len(),
        final_degree: deg,
    })
}
