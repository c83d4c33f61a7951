use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NevanError;
use crate::exactalg::Rat;

/// A point of C with rational coordinates and a positive multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub re: Rat,
    pub im: Rat,
    pub mult: u32,
}

impl DivisorPoint {
    pub fn new(re: Rat, im: Rat, mult: u32) -> Self {
        DivisorPoint { re, im, mult }
    }

    pub fn modulus_squared(&self) -> Rat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
}

/// Finite divisor Σ μ_ν a_ν on C.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divisor {
    entries: Vec<DivisorPoint>,
}

impl Divisor {
    pub fn new(entries: Vec<DivisorPoint>) -> Result<Self, NevanError> {
        for (i, e) in entries.iter().enumerate() {
            if e.mult == 0 {
                return Err(NevanError::InvalidDivisor(format!("entry {i} has multiplicity 0")));
            }
            if entries[..i].iter().any(|f| f.re == e.re && f.im == e.im) {
                return Err(NevanError::InvalidDivisor(format!("point {} + {}i repeated", e.re, e.im)));
            }
        }
        Ok(Divisor { entries })
    }

    pub fn entries(&self) -> &[DivisorPoint] {
        &self.entries
    }

    /// Sum of divisors: multiplicities add at common points.
    pub fn sum(&self, other: &Divisor) -> Divisor {
        let mut entries = self.entries.clone();
        for e in &other.entries {
            match entries.iter_mut().find(|f| f.re == e.re && f.im == e.im) {
                Some(f) => f.mult += e.mult,
                None => entries.push(e.clone()),
            }
        }
        Divisor { entries }
    }
}

impl<'de> Deserialize<'de> for Divisor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            entries: Vec<DivisorPoint>,
        }
        Divisor::new(Raw::deserialize(d)?.entries).map_err(serde::de::Error::custom)
    }
}

/// Truncation level k, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl Level {
    pub fn cap(self, mult: u32) -> u32 {
        match self {
            Level::Finite(k) => k.min(mult),
            Level::Infinite => mult,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(k) => write!(f, "{k}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Level::Infinite),
            _ => s.parse::<u32>().map(Level::Finite).map_err(|_| format!("bad level {s:?}")),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// n^{[k]}(t, E): truncated multiplicities of the points with |a| < t.
pub fn truncated_count(e: &Divisor, k: Level, t: &Rat) -> Result<u64, NevanError> {
    if !t.is_positive() {
        return Err(NevanError::Precondition("t must be positive".into()));
    }
    let t2 = t * t;
    Ok(e.entries.iter().filter(|p| p.modulus_squared() < t2).map(|p| k.cap(p.mult) as u64).sum())
}

/// One term weight · ½ ln(arg) with arg ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: Rat,
    pub log_arg_squared: Rat,
}

/// Exact value Σ weight·½·ln(log_arg_squared), with atoms merged by argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingValue {
    atoms: Vec<Atom>,
    value: f64,
}

impl CountingValue {
    pub fn zero() -> Self {
        CountingValue { atoms: Vec::new(), value: 0.0 }
    }

    /// Atoms with nonpositive weight sum or argument 1 are dropped.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
        for a in atoms {
            assert!(a.log_arg_squared >= Rat::one(), "log argument below 1");
            if a.log_arg_squared.is_one() {
                continue;
            }
            *merged.entry(a.log_arg_squared).or_insert_with(Rat::zero) += &a.weight;
        }
        let atoms: Vec<Atom> = merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(arg, weight)| Atom { weight, log_arg_squared: arg })
            .collect();
        let value = atoms.iter().fold(0.0, |acc, a| acc + a.weight.to_f64() * 0.5 * ln_rat(&a.log_arg_squared));
        CountingValue { atoms, value }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn to_f64(&self) -> f64 {
        self.value
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_atoms(self.atoms.iter().map(|a| Atom { weight: &a.weight * c, log_arg_squared: a.log_arg_squared.clone() }))
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Exact comparison: the sign of Σ c_i ln x_i is decided by comparing Π x_i^{c_i·L} across signs.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let diff = CountingValue::from_atoms(self.atoms.iter().cloned().chain(
            other.atoms.iter().map(|a| Atom { weight: -&a.weight, log_arg_squared: a.log_arg_squared.clone() }),
        ));
        if diff.atoms.is_empty() {
            return Ordering::Equal;
        }
        let l = diff.atoms.iter().fold(BigInt::one(), |acc, a| crate::exactalg::lcm(&acc, a.weight.denom()));
        let mut pos = Rat::one();
        let mut neg = Rat::one();
        for a in &diff.atoms {
            let e = a.weight.numer() * (&l / a.weight.denom());
            let p = e.abs().to_i32().expect("exponent fits in i32");
            let f = a.log_arg_squared.pow(p);
            if e.is_positive() {
                pos *= &f;
            } else {
                neg *= &f;
            }
        }
        pos.cmp(&neg)
    }
}

impl Add for &CountingValue {
    type Output = CountingValue;
    fn add(self, rhs: &CountingValue) -> CountingValue {
        CountingValue::from_atoms(self.atoms.iter().chain(&rhs.atoms).cloned())
    }
}

fn ln_rat(x: &Rat) -> f64 {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    if nb < 1000 && db < 1000 {
        return x.numer().to_f64().unwrap().ln() - x.denom().to_f64().unwrap().ln();
    }
    // Shift both parts to 64 significant bits.
    let sn = (nb - 64).max(0) as usize;
    let sd = (db - 64).max(0) as usize;
    let n = (x.numer() >> sn).to_f64().unwrap();
    let d = (x.denom() >> sd).to_f64().unwrap();
    n.ln() - d.ln() + (sn as f64 - sd as f64) * std::f64::consts::LN_2
}

/// N^{[k]}(r, E) = Σ_{|a|<r} min(k, μ) · log(r / max(1, |a|)).
pub fn counting_function(e: &Divisor, k: Level, r: &Rat) -> Result<CountingValue, NevanError> {
    if *r <= Rat::one() {
        return Err(NevanError::Precondition("r must exceed 1".into()));
    }
    let r2 = r * r;
    Ok(CountingValue::from_atoms(e.entries.iter().filter_map(|p| {
        let m2 = p.modulus_squared();
        if m2 >= r2 {
            return None;
        }
        let base = if m2 > Rat::one() { m2 } else { Rat::one() };
        Some(Atom { weight: Rat::from(k.cap(p.mult) as i64), log_arg_squared: &r2 / &base })
    })))
}

/// Orders ord_z(h_i ∘ f) recorded per preimage label; absent entries are 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderTable {
    pub rows: BTreeMap<String, BTreeMap<usize, u32>>,
}

impl OrderTable {
    pub fn insert(&mut self, label: impl Into<String>, orders: impl IntoIterator<Item = (usize, u32)>) {
        self.rows.insert(label.into(), orders.into_iter().collect());
    }

    pub fn order(&self, label: &str, i: usize) -> Option<u32> {
        self.rows.get(label).map(|r| r.get(&i).copied().unwrap_or(0))
    }
}

/// n_f(t, P_{k,I}): Σ over the listed labels of min_{i∈I} ord, counting only rows on the subspace.
pub fn subspace_count(tbl: &OrderTable, i_k: &[usize], labels: &[&str]) -> Result<u64, NevanError> {
    let mut total = 0u64;
    for &l in labels {
        let row = tbl.rows.get(l).ok_or_else(|| NevanError::UnknownLabel(l.to_string()))?;
        let m = i_k.iter().map(|i| row.get(i).copied().unwrap_or(0)).min().unwrap_or(0);
        total += m as u64;
    }
    Ok(total)
}
