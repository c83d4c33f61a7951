use malachite_base::num::arithmetic::traits::Gcd;
use malachite_nz::natural::Natural;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

// Below this size the binary gcd in num-integer is competitive.
const SMALL_BITS: u64 = 192;

fn to_natural(x: &BigInt) -> Natural {
    Natural::from_owned_limbs_asc(x.magnitude().to_u64_digits())
}

fn from_natural(x: &Natural) -> BigInt {
    let limbs = x.to_limbs_asc();
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigInt::from_biguint(Sign::Plus, BigUint::new(digits))
}

/// Nonnegative gcd; uses a subquadratic algorithm for large operands.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return abs(b);
    }
    if b.is_zero() {
        return abs(a);
    }
    if a.magnitude().is_one() || b.magnitude().is_one() {
        return BigInt::one();
    }
    if a.bits().max(b.bits()) <= SMALL_BITS {
        return a.gcd(b);
    }
    from_natural(&to_natural(a).gcd(to_natural(b)))
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let g = gcd(a, b);
    abs(&(a / &g * b))
}

fn abs(x: &BigInt) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.magnitude().clone())
}
