//! Sparse homogeneous polynomials over exact rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arrangement::{Arrangement, ArrangementError, Hyperplane};
use crate::exactalg::{common_denominator, Rat};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("point is the zero vector")]
    ZeroVector,
    #[error("expected {expected} variables, got {got}")]
    NvarsMismatch { expected: usize, got: usize },
    #[error("exponent vector {exp:?} does not have degree {degree}")]
    BadExponent { exp: Vec<u32>, degree: u32 },
    #[error("duplicate monomial {0:?}")]
    DuplicateMonomial(Vec<u32>),
    #[error("exponent key {index} out of range for q = {q}")]
    IndexOutOfRange { index: usize, q: usize },
    #[error("exponent for index {0} must be at least 1")]
    ZeroExponent(usize),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// Exponent vector. Ordered by total degree, then lexicographically with the
/// larger power of the earlier variable first (graded-lex, z0^d leading).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneous polynomial in `nvars` variables; the zero polynomial keeps its nominal degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomoPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Rat>,
}

impl HomoPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomoPoly { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars, 0);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn monomial(exp: Vec<u32>, c: Rat) -> Self {
        let nvars = exp.len();
        let m = Monomial(exp);
        let mut p = Self::zero(nvars, m.degree());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from (exponent, coefficient) pairs; zero coefficients are dropped.
    pub fn from_terms(nvars: usize, degree: u32, terms: Vec<(Vec<u32>, Rat)>) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars, degree);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(PolyError::NvarsMismatch { expected: nvars, got: exp.len() });
            }
            if exp.iter().sum::<u32>() != degree {
                return Err(PolyError::BadExponent { exp, degree });
            }
            let m = Monomial(exp);
            if p.terms.contains_key(&m) {
                return Err(PolyError::DuplicateMonomial(m.0));
            }
            if !c.is_zero() {
                p.terms.insert(m, c);
            }
        }
        Ok(p)
    }

    pub fn linear_form(h: &Hyperplane) -> Self {
        let nvars = h.len();
        let mut p = Self::zero(nvars, 1);
        for (i, c) in h.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars];
                e[i] = 1;
                p.terms.insert(Monomial(e), Rat::from(c));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn coeff(&self, exp: &[u32]) -> Rat {
        self.terms.get(&Monomial(exp.to_vec())).cloned().unwrap_or_else(Rat::zero)
    }

    /// Largest bit length of any numerator or denominator.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(Rat::bits).max().unwrap_or(0)
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials in different numbers of variables");
        assert_eq!(self.degree, other.degree, "adding polynomials of different degrees");
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.degree);
        }
        HomoPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn add_scaled(&self, other: &Self, negate: bool) -> Self {
        self.assert_compatible(other);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let c = if negate { -c } else { c.clone() };
            match terms.get_mut(m) {
                Some(v) => {
                    *v += &c;
                    if v.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c);
                }
            }
        }
        HomoPoly { nvars: self.nvars, degree: self.degree, terms }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomials in different numbers of variables");
        let mut acc: HashMap<Vec<u32>, Rat> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                let v = c1 * c2;
                match acc.get_mut(&e) {
                    Some(x) => *x += &v,
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        HomoPoly {
            nvars: self.nvars,
            degree: self.degree + other.degree,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (Monomial(e), c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::constant(self.nvars, Rat::one());
        for _ in 0..e {
            r = r.mul_poly(self);
        }
        r
    }

    /// Common denominator and integer numerators: self = (1/D)·Σ N_α z^α.
    pub fn integer_form(&self) -> (BigInt, Vec<(&[u32], BigInt)>) {
        let d = common_denominator(self.terms.values());
        let ints = self.terms.iter().map(|(m, c)| (m.0.as_slice(), c.numer() * (&d / c.denom()))).collect();
        (d, ints)
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::NvarsMismatch { expected: self.nvars, got: point.len() });
        }
        if point.iter().all(Rat::is_zero) {
            return Err(PolyError::ZeroVector);
        }
        let l = common_denominator(point);
        let ints: Vec<BigInt> = point.iter().map(|v| v.numer() * (&l / v.denom())).collect();
        let (d, num) = self.integer_form();
        let val = eval_integer_terms(&num, &ints, self.degree);
        Ok(Rat::new(val, d * num_traits::pow(l, self.degree as usize)))
    }

    /// Numerator of the value at an integer point, up to the positive factor of the common denominator.
    pub fn evaluate_int_numerator(&self, point: &[BigInt]) -> BigInt {
        let (_, num) = self.integer_form();
        eval_integer_terms(&num, point, self.degree)
    }

    /// Remainder after eliminating the pivot variable of `h` through h = 0.
    pub fn reduce_mod_form(&self, h: &Hyperplane) -> Self {
        let (den, acc) = self.reduce_mod_form_scaled(h);
        HomoPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: acc.into_iter().map(|(e, c)| (Monomial(e), Rat::new(c, den.clone()))).collect(),
        }
    }

    /// The remainder as (D, N) with remainder = N / D; N has no zero entries. Not normalized.
    pub fn reduce_mod_form_scaled(&self, h: &Hyperplane) -> (BigInt, BTreeMap<Vec<u32>, BigInt>) {
        assert_eq!(h.len(), self.nvars, "form and polynomial in different numbers of variables");
        let pv = h.pivot();
        let a = h.coeffs()[pv].clone();
        let d = self.degree;
        // -L' where the pivot variable satisfies a·z_pv = -L'.
        let neg_l: Vec<(usize, BigInt)> =
            h.coeffs().iter().enumerate().filter(|(j, c)| *j != pv && !c.is_zero()).map(|(j, c)| (j, -c)).collect();
        let mut powers: Vec<HashMap<Vec<u32>, BigInt>> = vec![HashMap::from([(vec![0u32; self.nvars], BigInt::one())])];
        let max_e = self.terms.keys().map(|m| m.0[pv]).max().unwrap_or(0);
        for _ in 0..max_e {
            let prev = powers.last().unwrap();
            let mut next: HashMap<Vec<u32>, BigInt> = HashMap::new();
            for (e, c) in prev {
                for (j, lj) in &neg_l {
                    let mut e2 = e.clone();
                    e2[*j] += 1;
                    *next.entry(e2).or_insert_with(BigInt::zero) += c * lj;
                }
            }
            next.retain(|_, c| !c.is_zero());
            powers.push(next);
        }
        let a_pows: Vec<BigInt> = (0..=d).map(|k| num_traits::pow(a.clone(), k as usize)).collect();
        let (den, num) = self.integer_form();
        let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (exp, c) in num {
            let e = exp[pv] as usize;
            let mut base = exp.to_vec();
            base[pv] = 0;
            for (pe, pc) in &powers[e] {
                let key: Vec<u32> = base.iter().zip(pe).map(|(x, y)| x + y).collect();
                // Small factors first, the large coefficient once.
                let f = pc * &a_pows[d as usize - e];
                *acc.entry(key).or_insert_with(BigInt::zero) += &c * f;
            }
        }
        let total_den = den * &a_pows[d as usize];
        (total_den, acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

impl HomoPoly {
    /// SHA-256 over a canonical binary encoding (term order, exponents, numerator and denominator bytes).
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update((self.nvars as u64).to_le_bytes());
        h.update(self.degree.to_le_bytes());
        for (m, c) in &self.terms {
            for e in &m.0 {
                h.update(e.to_le_bytes());
            }
            for part in [c.numer(), c.denom()] {
                let b = part.to_signed_bytes_le();
                h.update((b.len() as u64).to_le_bytes());
                h.update(&b);
            }
        }
        hex::encode(h.finalize())
    }
}

/// Whether p and q agree on {h = 0}, i.e. have equal remainders modulo h.
pub fn congruent_mod_form(p: &HomoPoly, q: &HomoPoly, h: &Hyperplane) -> bool {
    if p.nvars != q.nvars || p.degree != q.degree {
        return false;
    }
    let (dp, np) = p.reduce_mod_form_scaled(h);
    let (dq, nq) = q.reduce_mod_form_scaled(h);
    np.len() == nq.len()
        && np.iter().all(|(e, cp)| nq.get(e).is_some_and(|cq| cp * &dq == cq * &dp))
}

fn eval_integer_terms(terms: &[(&[u32], BigInt)], point: &[BigInt], degree: u32) -> BigInt {
    let powers: Vec<Vec<BigInt>> = point
        .iter()
        .map(|x| {
            let mut v = Vec::with_capacity(degree as usize + 1);
            v.push(BigInt::one());
            for k in 1..=degree as usize {
                let next = &v[k - 1] * x;
                v.push(next);
            }
            v
        })
        .collect();
    let mut total = BigInt::zero();
    for (exp, c) in terms {
        if exp.iter().enumerate().any(|(i, &e)| e > 0 && point[i].is_zero()) {
            continue;
        }
        let mut f = BigInt::one();
        for (i, &e) in exp.iter().enumerate() {
            if e > 0 && !powers[i][e as usize].is_one() {
                f *= &powers[i][e as usize];
            }
        }
        total += c * f;
    }
    total
}

impl Add for &HomoPoly {
    type Output = HomoPoly;
    fn add(self, rhs: &HomoPoly) -> HomoPoly {
        self.add_scaled(rhs, false)
    }
}

impl Sub for &HomoPoly {
    type Output = HomoPoly;
    fn sub(self, rhs: &HomoPoly) -> HomoPoly {
        self.add_scaled(rhs, true)
    }
}

impl Mul for &HomoPoly {
    type Output = HomoPoly;
    fn mul(self, rhs: &HomoPoly) -> HomoPoly {
        self.mul_poly(rhs)
    }
}

impl Neg for &HomoPoly {
    type Output = HomoPoly;
    fn neg(self) -> HomoPoly {
        self.scale(&-Rat::one())
    }
}

impl Add for HomoPoly {
    type Output = HomoPoly;
    fn add(self, rhs: HomoPoly) -> HomoPoly {
        &self + &rhs
    }
}

impl Sub for HomoPoly {
    type Output = HomoPoly;
    fn sub(self, rhs: HomoPoly) -> HomoPoly {
        &self - &rhs
    }
}

impl Mul for HomoPoly {
    type Output = HomoPoly;
    fn mul(self, rhs: HomoPoly) -> HomoPoly {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    c: Rat,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    degree: u32,
    terms: Vec<TermJson>,
}

impl Serialize for HomoPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Terms<'a>(&'a BTreeMap<Monomial, Rat>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                #[derive(Serialize)]
                struct T<'a> {
                    exp: &'a [u32],
                    c: &'a Rat,
                }
                s.collect_seq(self.0.iter().map(|(m, c)| T { exp: &m.0, c }))
            }
        }
        let mut st = s.serialize_struct("HomoPoly", 3)?;
        st.serialize_field("nvars", &self.nvars)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HomoPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        HomoPoly::from_terms(j.nvars, j.degree, j.terms.into_iter().map(|t| (t.exp, t.c)).collect())
            .map_err(serde::de::Error::custom)
    }
}

fn check_exponents(a: &Arrangement, exponents: &BTreeMap<usize, u32>) -> Result<(), PolyError> {
    for (&i, &e) in exponents {
        if i >= a.q() {
            return Err(PolyError::IndexOutOfRange { index: i, q: a.q() });
        }
        if e == 0 {
            return Err(PolyError::ZeroExponent(i));
        }
    }
    Ok(())
}

/// Expanded product Π h_i^{n_i}.
pub fn product_of_forms(a: &Arrangement, exponents: &BTreeMap<usize, u32>) -> Result<HomoPoly, PolyError> {
    check_exponents(a, exponents)?;
    let mut p = HomoPoly::constant(a.n() + 1, Rat::one());
    for (&i, &e) in exponents {
        let l = HomoPoly::linear_form(a.hyperplane(i));
        for _ in 0..e {
            p = p.mul_poly(&l);
        }
    }
    Ok(p)
}

/// Value of Π h_i(x)^{n_i} at an integer point.
pub fn product_value(a: &Arrangement, exponents: &BTreeMap<usize, u32>, x: &[BigInt]) -> BigInt {
    exponents.iter().map(|(&i, &e)| num_traits::pow(a.hyperplane(i).eval_int(x), e as usize)).product()
}

/// Intersection points of all n-subsets of a general-position family.
#[derive(Clone, Debug)]
pub struct IntersectionPoints {
    pub entries: Vec<(Vec<usize>, Vec<BigInt>)>,
}

impl IntersectionPoints {
    pub fn of(a: &Arrangement) -> Result<Self, PolyError> {
        a.require_general_position()?;
        Ok(IntersectionPoints { entries: a.intersection_points()? })
    }

    /// First n-subset whose point lies on {s = 0}.
    pub fn first_zero(&self, s: &HomoPoly) -> Option<Vec<usize>> {
        let (_, num) = s.integer_form();
        self.entries
            .iter()
            .find(|(_, x)| eval_integer_terms(&num, x, s.degree).is_zero())
            .map(|(i, _)| i.clone())
    }
}

/// Whether {s = 0} avoids every intersection point of n hyperplanes of the family.
pub fn is_general_position_wrt(s: &HomoPoly, a: &Arrangement) -> Result<Verdict<Vec<usize>>, PolyError> {
    if s.nvars != a.n() + 1 {
        return Err(PolyError::NvarsMismatch { expected: a.n() + 1, got: s.nvars });
    }
    let pts = IntersectionPoints::of(a)?;
    Ok(match pts.first_zero(s) {
        None => Verdict::Holds,
        Some(i) => Verdict::Fails(i),
    })
}

/// All exponent vectors of the given degree, in canonical order.
pub fn monomials(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, left: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if acc.len() + 1 == nvars {
            acc.push(left);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for e in (0..=left).rev() {
            acc.push(e);
            rec(nvars, left - e, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(nvars, degree, &mut Vec::new(), &mut out);
    }
    out
}

/// Dense polynomial in P^n with integer coefficients drawn uniformly from [-bound, bound].
pub fn random_poly(n: usize, degree: u32, coeff_bound: i64, seed: u64) -> HomoPoly {
    assert!(degree >= 1, "degree must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = HomoPoly::zero(n + 1, degree);
    for e in monomials(n + 1, degree) {
        let c: i64 = rng.gen_range(-coeff_bound..=coeff_bound);
        if c != 0 {
            p.terms.insert(Monomial(e), Rat::from(c));
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(c: &[i64]) -> HomoPoly {
        HomoPoly::linear_form(&Hyperplane::from_i64(c).unwrap())
    }

    fn pt(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from(x)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let p = &lin(&[1, 0, 0]) * &lin(&[0, 1, 0]);
        assert_eq!(p.evaluate(&pt(&[1, 0, 5])).unwrap(), Rat::zero());
        assert_eq!(lin(&[1, 1, 1]).evaluate(&pt(&[1, 1, 1])).unwrap(), Rat::from(3));
        assert_eq!(p.evaluate(&pt(&[0, 0, 0])), Err(PolyError::ZeroVector));
        let half = vec![Rat::new(1, 2), Rat::new(1, 3), Rat::one()];
        assert_eq!(p.evaluate(&half).unwrap(), Rat::new(1, 6));
    }

    #[test]
    fn reduce_examples() {
        let h = Hyperplane::from_i64(&[1, 1]).unwrap();
        assert!(lin(&[1, 1]).reduce_mod_form(&h).is_zero());
        let z0sq = HomoPoly::monomial(vec![2, 0], Rat::one());
        let g = Hyperplane::from_i64(&[1, -1]).unwrap();
        assert_eq!(z0sq.reduce_mod_form(&g), HomoPoly::monomial(vec![0, 2], Rat::one()));
    }

    #[test]
    fn graded_lex_order_in_json() {
        let p = &lin(&[1, 2, 0]) * &lin(&[0, 1, 3]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with(r#"{"nvars":3,"degree":2,"terms":[{"exp":[1,1,0],"c":"1"}"#), "{s}");
        let back: HomoPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(4, 6).len(), 84);
        assert_eq!(monomials(7, 12).len(), 18564);
        let r = random_poly(3, 6, 9, 3);
        assert!(r.term_count() <= 84);
        assert_eq!(r, random_poly(3, 6, 9, 3));
    }

    #[test]
    fn product_of_forms_example() {
        let a = Arrangement::from_i64_rows(2, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let p = product_of_forms(&a, &BTreeMap::from([(0, 1), (1, 1)])).unwrap();
        assert_eq!(p, HomoPoly::monomial(vec![1, 1, 0], Rat::one()));
        assert!(matches!(product_of_forms(&a, &BTreeMap::from([(5, 1)])), Err(PolyError::IndexOutOfRange { .. })));
        assert!(matches!(product_of_forms(&a, &BTreeMap::from([(0, 0)])), Err(PolyError::ZeroExponent(0))));
    }
}
