use std::num::NonZeroU32;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::NevanError;
use crate::arrangement::Hyperplane;
use crate::exactalg::{canonical_projective, int_kernel, primitive_integer_vector, rank, Rat, RatMatrix};
use crate::polyring::{monomials, HomoPoly};

/// Degree-2 form in z0, z1, z2 with coefficients of z0², z0z1, z0z2, z1², z1z2, z2².
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conic {
    coeffs: Vec<Rat>,
}

fn quad_row(p: &[Rat]) -> Vec<Rat> {
    monomials(3, 2)
        .iter()
        .map(|e| e.iter().zip(p).fold(Rat::one(), |acc, (&k, x)| &acc * &x.pow(k as i32)))
        .collect()
}

/// Row of the bilinear form B(p, q) with c(p + s q) = c(p) + s·B(p, q) + s²·c(q).
fn polar_row(p: &[Rat], q: &[Rat]) -> Vec<Rat> {
    monomials(3, 2)
        .iter()
        .map(|e| {
            let idx: Vec<usize> = (0..3).flat_map(|i| std::iter::repeat(i).take(e[i] as usize)).collect();
            let (i, j) = (idx[0], idx[1]);
            &(&p[i] * &q[j]) + &(&p[j] * &q[i])
        })
        .collect()
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Conic {
    /// Canonical primitive integer scaling; None for the zero vector.
    pub fn new(coeffs: &[Rat]) -> Option<Self> {
        if coeffs.len() != 6 || coeffs.iter().all(|c| c.is_zero()) {
            return None;
        }
        let v = canonical_projective(primitive_integer_vector(coeffs));
        Some(Conic { coeffs: v.into_iter().map(Rat::from).collect() })
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, p: &[Rat]) -> Rat {
        dot(&self.coeffs, &quad_row(p))
    }

    /// Coefficients [c(p), B(p,q), c(q)] of the restriction s ↦ c(p + s q).
    pub fn restrict(&self, p: &[Rat], q: &[Rat]) -> [Rat; 3] {
        [self.eval(p), dot(&self.coeffs, &polar_row(p, q)), self.eval(q)]
    }

    /// Symmetric matrix with c(z) = zᵀ S z.
    pub fn symmetric_matrix(&self) -> [[Rat; 3]; 3] {
        let c = &self.coeffs;
        let h = Rat::new(1, 2);
        [
            [c[0].clone(), &c[1] * &h, &c[2] * &h],
            [&c[1] * &h, c[3].clone(), &c[4] * &h],
            [&c[2] * &h, &c[4] * &h, c[5].clone()],
        ]
    }

    /// Zero exactly when the conic splits into lines.
    pub fn determinant(&self) -> Rat {
        det3(&self.symmetric_matrix())
    }

    pub fn to_poly(&self) -> HomoPoly {
        let terms = monomials(3, 2).into_iter().zip(self.coeffs.iter().cloned()).collect();
        HomoPoly::from_terms(3, 2, terms).expect("distinct monomials")
    }
}

fn det3(m: &[[Rat; 3]; 3]) -> Rat {
    let minor = |a: usize, b: usize, c: usize, d: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d]);
    &(&(&m[0][0] * &minor(1, 2, 2, 1)) - &(&m[0][1] * &minor(0, 2, 2, 0))) + &(&m[0][2] * &minor(0, 1, 1, 0))
}

fn check_point(p: &[Rat]) -> Result<(), NevanError> {
    if p.len() != 3 {
        return Err(NevanError::Precondition(format!("point {p:?} is not in P^2")));
    }
    if p.iter().all(|x| x.is_zero()) {
        return Err(NevanError::Precondition("zero vector is not a projective point".into()));
    }
    Ok(())
}

fn proportional(p: &[Rat], q: &[Rat]) -> bool {
    cross(p, q).iter().all(|x| x.is_zero())
}

fn cross(p: &[Rat], q: &[Rat]) -> [Rat; 3] {
    [
        &(&p[1] * &q[2]) - &(&p[2] * &q[1]),
        &(&p[2] * &q[0]) - &(&p[0] * &q[2]),
        &(&p[0] * &q[1]) - &(&p[1] * &q[0]),
    ]
}

fn collinear(p: &[Rat], q: &[Rat], r: &[Rat]) -> bool {
    dot(&cross(p, q), r).is_zero()
}

/// Conic through four points, tangent to `tangent_line` at `points[tangent_at]`.
pub fn conic_fit(points: &[Vec<Rat>], tangent_line: &Hyperplane, tangent_at: usize) -> Result<Conic, NevanError> {
    if points.len() != 4 {
        return Err(NevanError::Precondition(format!("expected 4 points, got {}", points.len())));
    }
    if tangent_line.len() != 3 {
        return Err(NevanError::Precondition("tangent line is not a line in P^2".into()));
    }
    if tangent_at >= 4 {
        return Err(NevanError::Precondition(format!("tangent point index {tangent_at} out of range")));
    }
    for p in points {
        check_point(p)?;
    }
    let p = &points[tangent_at];
    if !tangent_line.eval(p).is_zero() {
        return Err(NevanError::Precondition("tangent point does not lie on the tangent line".into()));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if proportional(&points[i], &points[j]) {
                return Err(NevanError::Precondition(format!("points {i} and {j} coincide")));
            }
        }
    }
    for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        if collinear(&points[t[0]], &points[t[1]], &points[t[2]]) {
            return Err(NevanError::DegenerateConfiguration(format!("points {t:?} are collinear")));
        }
    }
    let q = second_point_on_line(tangent_line, p);
    let mut rows: Vec<Vec<Rat>> = points.iter().map(|x| quad_row(x)).collect();
    rows.push(polar_row(p, &q));
    let m = RatMatrix::from_rows_with_cols(rows, 6);
    let r = rank(&m);
    if r < 5 {
        return Err(NevanError::DegenerateConfiguration(format!("conic conditions have rank {r} < 5")));
    }
    let ker = int_kernel(&m.integer_rows(), 6);
    let c = Conic::new(&ker[0].iter().map(Rat::from).collect::<Vec<_>>()).expect("kernel vector is nonzero");
    let det = c.determinant();
    if det.is_zero() {
        return Err(NevanError::DegenerateConfiguration("the unique conic splits into lines".into()));
    }
    for (i, x) in points.iter().enumerate() {
        assert!(c.eval(x).is_zero(), "conic misses point {i}");
    }
    let [v, s, _] = c.restrict(p, &q);
    assert!(v.is_zero() && s.is_zero(), "no double root at the tangent point");
    Ok(c)
}

/// A point of the line not proportional to p, from its integer kernel basis.
pub fn second_point_on_line(line: &Hyperplane, p: &[Rat]) -> Vec<Rat> {
    let basis = int_kernel(&[line.coeffs()], line.len());
    basis
        .into_iter()
        .map(|v| v.into_iter().map(Rat::from).collect::<Vec<_>>())
        .find(|v| !proportional(v, p))
        .expect("a line has two independent points")
}

/// Π ℓ_i^{m_i}.
pub fn degenerate_curve(lines: &[(Hyperplane, NonZeroU32)]) -> Result<HomoPoly, NevanError> {
    let Some((first, _)) = lines.first() else {
        return Err(NevanError::Precondition("no lines given".into()));
    };
    let nv = first.len();
    let mut acc = HomoPoly::constant(nv, Rat::one());
    for (l, m) in lines {
        if l.len() != nv {
            return Err(NevanError::Precondition("lines live in different dimensions".into()));
        }
        acc = acc.mul_poly(&HomoPoly::linear_form(l).pow(m.get()));
    }
    Ok(acc)
}

/// The line through two distinct points of P², via the cross product.
pub fn line_through(p: &[Rat], q: &[Rat]) -> Result<Hyperplane, NevanError> {
    check_point(p)?;
    check_point(q)?;
    let c = cross(p, q);
    if c.iter().all(|x| x.is_zero()) {
        return Err(NevanError::CoincidentPoints);
    }
    let v: Vec<BigInt> = canonical_projective(primitive_integer_vector(&c));
    Ok(Hyperplane::from_bigints(v).expect("nonzero"))
}
