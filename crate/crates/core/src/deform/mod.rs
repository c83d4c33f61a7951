//! The level-by-level deformation S ↦ εS + Π h_i^{n_i}, its verification, and the proof obligations.
//!
//! Indices are 0-based. The schedule visits levels l = n−1 down to 2 and, within a level,
//! every l-subset D of {0..2n−1} in lexicographic order. Step t (1-based, global) uses
//! the ε given by the rule at t; the final Σ uses the rule at (steps + 1).

mod obligations;
mod verify;

pub use obligations::{
    case_cardinality_check, case_chain, enumerate_obligations, CardinalityCase, CardinalityChain, CardinalityError, ChecklistRow,
    ComplementSpec, Discharge, ObligationRow, Obligations, ShapeRow, StarSubspace,
};
pub use verify::{verify, VerifyError, VerifyReport};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arrangement::{Arrangement, ArrangementError, GenericityViolation};
use crate::exactalg::Rat;
use crate::polyring::{product_of_forms, product_value, random_poly, HomoPoly, IntersectionPoints, PolyError};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("exponents sum to {sum}, expected {expected}")]
    DegreeMismatch { sum: u32, expected: u32 },
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("step {step}: general position lost at the intersection of {witness:?}")]
    GeneralPositionLost { step: usize, witness: Vec<usize> },
    #[error("no initial polynomial in general position after {tries} seeds")]
    InitialSeedExhausted { tries: usize },
    #[error("step {step}: coefficient size {bits} bits exceeds the limit of {limit}")]
    CoeffGuard { step: usize, bits: u64, limit: u64 },
    #[error("arrangement is not generic: {0:?}")]
    NotGeneric(Box<GenericityViolation>),
    #[error("dimension {0} is not supported (need 3 <= n <= 6)")]
    UnsupportedDimension(usize),
    #[error("family has {q} hyperplanes, expected {expected}")]
    WrongFamilySize { q: usize, expected: usize },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Per-step choice of ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonRule {
    /// ε_t = r^t.
    Geometric(Rat),
    /// ε_t = r for every step.
    Constant(Rat),
}

impl EpsilonRule {
    pub fn at(&self, t: usize) -> Rat {
        match self {
            EpsilonRule::Geometric(r) => r.pow(t as i32),
            EpsilonRule::Constant(r) => r.clone(),
        }
    }
}

impl Default for EpsilonRule {
    fn default() -> Self {
        EpsilonRule::Geometric(Rat::new(1, 1000))
    }
}

impl fmt::Display for EpsilonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonRule::Geometric(r) => write!(f, "geometric:{r}"),
            EpsilonRule::Constant(r) => write!(f, "constant:{r}"),
        }
    }
}

impl FromStr for EpsilonRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, val) = s.split_once(':').ok_or_else(|| format!("expected KIND:RATIONAL, got {s:?}"))?;
        let r: Rat = val.parse().map_err(|e| format!("{e}"))?;
        if r.is_zero() {
            return Err("epsilon must be nonzero".into());
        }
        match kind {
            "geometric" => Ok(EpsilonRule::Geometric(r)),
            "constant" => Ok(EpsilonRule::Constant(r)),
            _ => Err(format!("unknown epsilon rule {kind:?} (geometric or constant)")),
        }
    }
}

impl Serialize for EpsilonRule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EpsilonRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One application of the deformation at the subspace D = ∩_{i∈D} H_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationStep {
    pub level: usize,
    #[serde(rename = "D_indices")]
    pub d_indices: Vec<usize>,
    pub exponents: BTreeMap<usize, u32>,
    pub epsilon: Rat,
}

impl DeformationStep {
    pub fn validate(&self, n: usize, q: usize) -> Result<(), DeformError> {
        if self.d_indices.len() != self.level {
            return Err(DeformError::InvalidStep(format!(
                "|D| = {} but level is {}",
                self.d_indices.len(),
                self.level
            )));
        }
        if self.epsilon.is_zero() {
            return Err(DeformError::InvalidStep("epsilon is zero".into()));
        }
        if self.d_indices.iter().any(|&i| i >= q) || !self.d_indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(DeformError::InvalidStep(format!("D indices {:?} not increasing in range", self.d_indices)));
        }
        for (&i, &e) in &self.exponents {
            if i >= q || self.d_indices.contains(&i) {
                return Err(DeformError::InvalidStep(format!("exponent key {i} not outside D")));
            }
            if e == 0 {
                return Err(DeformError::InvalidStep(format!("exponent for {i} is zero")));
            }
        }
        let sum: u32 = self.exponents.values().sum();
        let expected = 2 * n as u32;
        if sum != expected {
            return Err(DeformError::DegreeMismatch { sum, expected });
        }
        Ok(())
    }
}

/// The l lowest indices outside D get exponent 2, the remaining 2n − 2l get 1.
pub fn exponent_rule(n: usize, d_indices: &[usize]) -> BTreeMap<usize, u32> {
    let l = d_indices.len();
    (0..2 * n).filter(|i| !d_indices.contains(i)).enumerate().map(|(k, i)| (i, if k < l { 2 } else { 1 })).collect()
}

/// (level, D) pairs in application order.
pub fn schedule(n: usize) -> Vec<(usize, Vec<usize>)> {
    (2..n).rev().flat_map(|l| (0..2 * n).combinations(l).map(move |d| (l, d))).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Σ_{l=2}^{n−1} C(2n, l).
pub fn step_count(n: usize) -> u64 {
    (2..n as u64).map(|l| binomial(2 * n as u64, l)).sum()
}

/// How check (ii) is evaluated during a build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GpMethod {
    /// Evaluate each new polynomial at every intersection point.
    #[default]
    Direct,
    /// Track values at the intersection points through v ↦ ε v + Π(x), which is exact by linearity.
    Incremental,
}

/// How check (iii) is established.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CongruenceMethod {
    /// Reduce (result − ε·S) modulo each h_m and require zero; equivalent to equal remainders.
    #[default]
    Reduce,
    /// Require result − ε·S to equal the product, which carries every h_m (m ∉ D) as a factor.
    Structural,
}

/// Whether every intermediate polynomial is stored or only its digest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retention {
    #[default]
    All,
    DigestsOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub epsilon_rule: EpsilonRule,
    pub initial_seed: u64,
    pub coeff_bound: i64,
    pub max_seed_tries: usize,
    pub max_halvings: u32,
    pub max_coeff_bits: Option<u64>,
    pub retention: Retention,
    pub gp_method: GpMethod,
    pub congruence_method: CongruenceMethod,
    pub check_generic: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            epsilon_rule: EpsilonRule::default(),
            initial_seed: 0,
            coeff_bound: 9,
            max_seed_tries: 100,
            max_halvings: 32,
            max_coeff_bits: Some(65536),
            retention: Retention::All,
            gp_method: GpMethod::Direct,
            congruence_method: CongruenceMethod::Reduce,
            check_generic: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub degree: u32,
    pub general_position: Verdict<Vec<usize>>,
    /// The indices m ∉ D whose congruence was checked.
    pub congruence_forms: Vec<usize>,
    /// Fails with the first m whose congruence does not hold.
    pub congruence: Verdict<usize>,
}

impl VerificationRecord {
    pub fn passed(&self, n: usize) -> bool {
        self.degree == 2 * n as u32 && self.general_position.holds() && self.congruence.holds()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Global 1-based step index t.
    pub index: usize,
    pub step: DeformationStep,
    /// Number of times ε was halved before general position held.
    pub halvings: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<HomoPoly>,
    pub result_digest: String,
    pub max_coeff_bits: u64,
    pub verification: VerificationRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRecord {
    pub degree: u32,
    pub general_position: Verdict<Vec<usize>>,
    pub halvings: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationTrace {
    pub tool_version: String,
    pub n: usize,
    pub arrangement: Arrangement,
    pub options: BuildOptions,
    /// Seed actually used for the initial polynomial (options.initial_seed + tries − 1).
    pub initial_seed_used: u64,
    pub initial: HomoPoly,
    pub steps: Vec<StepRecord>,
    pub final_epsilon: Rat,
    pub final_sigma: HomoPoly,
    pub final_verification: FinalRecord,
}

impl DeformationTrace {
    /// The last intermediate polynomial S_{n−2}, if retained.
    pub fn last_polynomial(&self) -> Option<&HomoPoly> {
        match self.steps.last() {
            None => Some(&self.initial),
            Some(r) => r.result.as_ref(),
        }
    }
}

/// Precomputed per-arrangement data shared by all steps.
struct Ctx<'a> {
    a: &'a Arrangement,
    points: IntersectionPoints,
}

impl<'a> Ctx<'a> {
    fn new(a: &'a Arrangement) -> Result<Self, DeformError> {
        Ok(Ctx { a, points: IntersectionPoints::of(a)? })
    }
}

fn check_family(a: &Arrangement) -> Result<(), DeformError> {
    let n = a.n();
    if !(3..=6).contains(&n) {
        return Err(DeformError::UnsupportedDimension(n));
    }
    if a.q() != 2 * n {
        return Err(DeformError::WrongFamilySize { q: a.q(), expected: 2 * n });
    }
    Ok(())
}

/// ε·S + Π without verification.
pub fn deform_once(s: &HomoPoly, a: &Arrangement, step: &DeformationStep) -> Result<HomoPoly, DeformError> {
    step.validate(a.n(), a.q())?;
    let pi = product_of_forms(a, &step.exponents)?;
    Ok(&s.scale(&step.epsilon) + &pi)
}

fn congruence_check(
    a: &Arrangement,
    scaled: &HomoPoly,
    pi: &HomoPoly,
    result: &HomoPoly,
    step: &DeformationStep,
    method: CongruenceMethod,
) -> (Vec<usize>, Verdict<usize>) {
    let forms: Vec<usize> = (0..a.q()).filter(|i| !step.d_indices.contains(i)).collect();
    let diff = result - scaled;
    let failing = match method {
        CongruenceMethod::Reduce => {
            forms.iter().copied().find(|&m| !diff.reduce_mod_form_scaled(a.hyperplane(m)).1.is_empty())
        }
        CongruenceMethod::Structural => {
            if &diff != pi {
                forms.first().copied()
            } else {
                forms.iter().copied().find(|m| !step.exponents.contains_key(m))
            }
        }
    };
    (forms, failing.map_or(Verdict::Holds, Verdict::Fails))
}

/// Applies one step and verifies degree, general position and the congruences modulo every h_m, m ∉ D.
pub fn step_apply(
    s: &HomoPoly,
    a: &Arrangement,
    step: &DeformationStep,
) -> Result<(HomoPoly, VerificationRecord), DeformError> {
    let n = a.n();
    step.validate(n, a.q())?;
    if s.degree() != 2 * n as u32 || s.nvars() != n + 1 {
        return Err(DeformError::Precondition(format!("S must have degree {} in {} variables", 2 * n, n + 1)));
    }
    let ctx = Ctx::new(a)?;
    if let Some(w) = ctx.points.first_zero(s) {
        return Err(DeformError::Precondition(format!("S is not in general position (meets the point of {w:?})")));
    }
    let pi = product_of_forms(a, &step.exponents)?;
    let scaled = s.scale(&step.epsilon);
    let result = &scaled + &pi;
    if let Some(w) = ctx.points.first_zero(&result) {
        return Err(DeformError::GeneralPositionLost { step: 0, witness: w });
    }
    let (forms, congruence) = congruence_check(a, &scaled, &pi, &result, step, CongruenceMethod::Reduce);
    let rec = VerificationRecord {
        degree: result.degree(),
        general_position: Verdict::Holds,
        congruence_forms: forms,
        congruence,
    };
    Ok((result, rec))
}

fn pow2(h: u32) -> Rat {
    Rat::from_int(BigInt::from(1) << h as usize)
}

/// Values of S at the intersection points, scaled per point by a positive constant.
struct PointValues {
    values: Vec<Rat>,
}

impl PointValues {
    fn of(ctx: &Ctx, s: &HomoPoly) -> Self {
        let values = ctx
            .points
            .entries
            .iter()
            .map(|(_, x)| {
                let pt: Vec<Rat> = x.iter().map(Rat::from).collect();
                s.evaluate(&pt).expect("intersection points are nonzero")
            })
            .collect();
        PointValues { values }
    }

    fn product_values(ctx: &Ctx, exps: &BTreeMap<usize, u32>) -> Vec<Rat> {
        ctx.points.entries.iter().map(|(_, x)| Rat::from_int(product_value(ctx.a, exps, x))).collect()
    }

    fn advanced(&self, eps: &Rat, pi: &[Rat]) -> Vec<Rat> {
        self.values.iter().zip(pi).map(|(v, p)| &(eps * v) + p).collect()
    }
}

fn first_zero_value(ctx: &Ctx, vals: &[Rat]) -> Option<Vec<usize>> {
    vals.iter().position(Rat::is_zero).map(|k| ctx.points.entries[k].0.clone())
}

/// Runs the full pipeline: initial S₀, every scheduled step, and the final Σ.
pub fn build(a: &Arrangement, opts: &BuildOptions) -> Result<DeformationTrace, DeformError> {
    build_with_progress(a, opts, |_, _| {})
}

/// As [`build`], calling `progress(t, total)` after each step.
pub fn build_with_progress(
    a: &Arrangement,
    opts: &BuildOptions,
    mut progress: impl FnMut(usize, usize),
) -> Result<DeformationTrace, DeformError> {
    check_family(a)?;
    let n = a.n();
    let deg = 2 * n as u32;
    if opts.check_generic {
        if let Verdict::Fails(v) = a.is_generic()? {
            return Err(DeformError::NotGeneric(Box::new(v)));
        }
    }
    let ctx = Ctx::new(a)?;

    let mut initial = None;
    for k in 0..opts.max_seed_tries {
        let seed = opts.initial_seed.wrapping_add(k as u64);
        let s0 = random_poly(n, deg, opts.coeff_bound, seed);
        if s0.degree() == deg && !s0.is_zero() && ctx.points.first_zero(&s0).is_none() {
            initial = Some((seed, s0));
            break;
        }
    }
    let (initial_seed_used, initial) =
        initial.ok_or(DeformError::InitialSeedExhausted { tries: opts.max_seed_tries })?;

    let sched = schedule(n);
    let total = sched.len();
    let mut cur = initial.clone();
    let mut values = match opts.gp_method {
        GpMethod::Incremental => Some(PointValues::of(&ctx, &cur)),
        GpMethod::Direct => None,
    };
    let mut steps = Vec::with_capacity(total);
    for (k, (level, d)) in sched.into_iter().enumerate() {
        let t = k + 1;
        let exponents = exponent_rule(n, &d);
        let pi = product_of_forms(a, &exponents)?;
        let pi_vals = values.as_ref().map(|_| PointValues::product_values(&ctx, &exponents));
        let base = opts.epsilon_rule.at(t);
        let mut accepted = None;
        let mut last_witness = Vec::new();
        for h in 0..=opts.max_halvings {
            let eps = &base / &pow2(h);
            let scaled = cur.scale(&eps);
            let result = &scaled + &pi;
            let (zero, new_vals) = match (&values, &pi_vals) {
                (Some(v), Some(pv)) => {
                    let nv = v.advanced(&eps, pv);
                    (first_zero_value(&ctx, &nv), Some(nv))
                }
                _ => (ctx.points.first_zero(&result), None),
            };
            match zero {
                None => {
                    accepted = Some((h, eps, scaled, result, new_vals));
                    break;
                }
                Some(w) => last_witness = w,
            }
        }
        let Some((halvings, eps, scaled, result, new_vals)) = accepted else {
            return Err(DeformError::GeneralPositionLost { step: t, witness: last_witness });
        };
        let bits = result.max_coeff_bits();
        if let Some(limit) = opts.max_coeff_bits {
            if bits > limit {
                return Err(DeformError::CoeffGuard { step: t, bits, limit });
            }
        }
        let step = DeformationStep { level, d_indices: d, exponents, epsilon: eps };
        let (forms, congruence) = congruence_check(a, &scaled, &pi, &result, &step, opts.congruence_method);
        if let Verdict::Fails(m) = congruence {
            return Err(DeformError::InvalidStep(format!("step {t}: congruence modulo h_{m} failed")));
        }
        let verification =
            VerificationRecord { degree: result.degree(), general_position: Verdict::Holds, congruence_forms: forms, congruence };
        if let (Some(v), Some(nv)) = (values.as_mut(), new_vals) {
            v.values = nv;
        }
        let result_digest = result.digest();
        steps.push(StepRecord {
            index: t,
            step,
            halvings,
            result: match opts.retention {
                Retention::All => Some(result.clone()),
                Retention::DigestsOnly => None,
            },
            result_digest,
            max_coeff_bits: bits,
            verification,
        });
        cur = result;
        progress(t, total);
    }

    let all: BTreeMap<usize, u32> = (0..2 * n).map(|i| (i, 1)).collect();
    let pi = product_of_forms(a, &all)?;
    let base = opts.epsilon_rule.at(total + 1);
    let mut last_witness = Vec::new();
    for h in 0..=opts.max_halvings {
        let eps = &base / &pow2(h);
        let sigma = &cur.scale(&eps) + &pi;
        match ctx.points.first_zero(&sigma) {
            None => {
                return Ok(DeformationTrace {
                    tool_version: crate::TOOL_VERSION.to_string(),
                    n,
                    arrangement: a.clone(),
                    options: opts.clone(),
                    initial_seed_used,
                    initial,
                    steps,
                    final_epsilon: eps,
                    final_verification: FinalRecord {
                        degree: sigma.degree(),
                        general_position: Verdict::Holds,
                        halvings: h,
                    },
                    final_sigma: sigma,
                });
            }
            Some(w) => last_witness = w,
        }
    }
    Err(DeformError::GeneralPositionLost { step: total + 1, witness: last_witness })
}
