//! Arbitrary-precision modular arithmetic: the Jacobi symbol, modular
//! exponentiation and inversion, and gcd.
//!
//! Every other module builds on these. The Jacobi symbol is evaluated with
//! the binary algorithm (strip factors of two, then flip with reciprocity),
//! so it works for composite moduli and never needs a factorization.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Errors raised by the arithmetic kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{value} is not invertible modulo {modulus} (gcd {gcd})")]
    NotInvertible {
        value: BigUint,
        modulus: BigUint,
        gcd: BigUint,
    },
}

/// Value of a Jacobi symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JacobiValue {
    MinusOne,
    Zero,
    One,
}

impl JacobiValue {
    pub fn as_i8(self) -> i8 {
        match self {
            JacobiValue::MinusOne => -1,
            JacobiValue::Zero => 0,
            JacobiValue::One => 1,
        }
    }

    /// Returns `None` for anything outside `{-1, 0, 1}`.
    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(JacobiValue::MinusOne),
            0 => Some(JacobiValue::Zero),
            1 => Some(JacobiValue::One),
            _ => None,
        }
    }
}

impl Mul for JacobiValue {
    type Output = JacobiValue;

    fn mul(self, rhs: JacobiValue) -> JacobiValue {
        JacobiValue::from_i8(self.as_i8() * rhs.as_i8()).expect("product of symbols is a symbol")
    }
}

impl Neg for JacobiValue {
    type Output = JacobiValue;

    fn neg(self) -> JacobiValue {
        JacobiValue::from_i8(-self.as_i8()).expect("negated symbol is a symbol")
    }
}

impl fmt::Display for JacobiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

impl Serialize for JacobiValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

fn check_jacobi_modulus(n: &BigUint) -> Result<(), ArithError> {
    if n.is_zero() || n.is_even() {
        return Err(ArithError::InvalidArgument(format!(
            "Jacobi modulus must be odd and positive, got {n}"
        )));
    }
    Ok(())
}

/// The Jacobi symbol `(a/n)` for odd `n >= 1`; `a` may be negative.
///
/// A negative numerator is split as `(-1/n) * (|a|/n)` before reduction.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<JacobiValue, ArithError> {
    check_jacobi_modulus(n)?;

    let mut sign = 1i8;
    if a.sign() == Sign::Minus && n.iter_u32_digits().next().unwrap_or(0) & 3 == 3 {
        sign = -sign;
    }
    let magnitude = a.magnitude();

    if let Some(small_n) = n.to_u64() {
        let r = (magnitude % small_n).to_u64().expect("residue fits in u64");
        return Ok(JacobiValue::from_i8(sign * jacobi_odd_u64(r, small_n)).unwrap());
    }

    let mut a = magnitude % n;
    let mut n = n.clone();
    while !a.is_zero() {
        let tz = a.trailing_zeros().expect("nonzero");
        if tz & 1 == 1 {
            let n8 = low_bits(&n) & 7;
            if n8 == 3 || n8 == 5 {
                sign = -sign;
            }
        }
        a >>= tz;
        if low_bits(&a) & 3 == 3 && low_bits(&n) & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        if let Some(small_n) = n.to_u64() {
            let r = (&a % small_n).to_u64().expect("residue fits in u64");
            return Ok(JacobiValue::from_i8(sign * jacobi_odd_u64(r, small_n)).unwrap());
        }
        a %= &n;
    }
    Ok(if n.is_one() {
        JacobiValue::from_i8(sign).unwrap()
    } else {
        JacobiValue::Zero
    })
}

/// Convenience wrapper over [`jacobi`] for machine-sized arguments.
pub fn jacobi_i64(a: i64, n: u64) -> Result<JacobiValue, ArithError> {
    if n == 0 || n & 1 == 0 {
        return Err(ArithError::InvalidArgument(format!(
            "Jacobi modulus must be odd and positive, got {n}"
        )));
    }
    let mut sign = 1i8;
    if a < 0 && n & 3 == 3 {
        sign = -1;
    }
    let r = a.unsigned_abs() % n;
    Ok(JacobiValue::from_i8(sign * jacobi_odd_u64(r, n)).unwrap())
}

fn low_bits(x: &BigUint) -> u32 {
    x.iter_u32_digits().next().unwrap_or(0)
}

// n odd, a < n.
fn jacobi_odd_u64(mut a: u64, mut n: u64) -> i8 {
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        if tz & 1 == 1 && matches!(n & 7, 3 | 5) {
            sign = -sign;
        }
        a >>= tz;
        if a & 3 == 3 && n & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// `base^exponent mod modulus`, for `modulus >= 2`.
pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint, ArithError> {
    if *modulus < BigUint::from(2u32) {
        return Err(ArithError::InvalidArgument(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    Ok(base.modpow(exponent, modulus))
}

/// The inverse of `a` modulo `modulus`, in `[0, modulus)`.
pub fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Result<BigUint, ArithError> {
    if *modulus < BigUint::from(2u32) {
        return Err(ArithError::InvalidArgument(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let m = BigInt::from(modulus.clone());
    let (mut old_r, mut r) = (BigInt::from(a % modulus), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(ArithError::NotInvertible {
            value: a.clone(),
            modulus: modulus.clone(),
            gcd: old_r.magnitude().clone(),
        });
    }
    Ok(old_s.mod_floor(&m).magnitude().clone())
}

/// Greatest common divisor, with `gcd(0, b) = b`.
pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// Exact number of decimal digits of `n` (1 for zero).
pub fn decimal_digits(n: &BigUint) -> u64 {
    if n.is_zero() {
        return 1;
    }
    // log10(2) underestimates by at most one digit from below.
    let estimate = ((n.bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1;
    let mut digits = estimate.max(1);
    let mut threshold = num_traits::pow(BigUint::from(10u32), digits as usize);
    while *n >= threshold {
        digits += 1;
        threshold *= 10u32;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn brute_jacobi_prime(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    fn is_small_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_i64(5, 23).unwrap(), JacobiValue::MinusOne);
        assert_eq!(jacobi_i64(1, 9999).unwrap(), JacobiValue::One);
        assert_eq!(jacobi_i64(10, 21).unwrap(), JacobiValue::MinusOne);
        assert_eq!(jacobi(&BigInt::from(10), &big(21)).unwrap(), JacobiValue::MinusOne);
    }

    #[test]
    fn jacobi_rejects_even_or_zero_modulus() {
        assert!(jacobi_i64(3, 10).is_err());
        assert!(jacobi_i64(3, 0).is_err());
        assert!(jacobi(&BigInt::from(3), &big(0)).is_err());
        assert!(matches!(
            jacobi(&BigInt::from(3), &big(1 << 40)),
            Err(ArithError::InvalidArgument(_))
        ));
    }

    #[test]
    fn jacobi_matches_residue_enumeration_for_small_primes() {
        for p in (3..200).filter(|&p| is_small_prime(p)) {
            for a in -(p as i64)..(2 * p as i64) {
                assert_eq!(
                    jacobi_i64(a, p).unwrap().as_i8(),
                    brute_jacobi_prime(a, p),
                    "({a}/{p})"
                );
            }
        }
    }

    #[test]
    fn big_path_matches_small_path() {
        // Moduli above 2^64 exercise the multi-limb loop; compare through
        // multiplicativity in the numerator against a machine-sized factor.
        let n = (BigUint::one() << 127u32) - 1u32; // Mersenne prime
        let n2 = &n * &n;
        for a in [-7i64, -3, -1, 2, 3, 5, 10, 1234567] {
            let a_big = BigInt::from(a);
            let direct = jacobi(&a_big, &n).unwrap();
            // Over a square modulus every coprime symbol is +1.
            assert_eq!(jacobi(&a_big, &n2).unwrap(), JacobiValue::One);
            // (a/n) for prime n agrees with Euler's criterion.
            let e = (&n - 1u32) >> 1u32;
            let r = a_big.mod_floor(&BigInt::from(n.clone())).magnitude().modpow(&e, &n);
            let euler = if r.is_one() { JacobiValue::One } else { JacobiValue::MinusOne };
            assert_eq!(direct, euler, "({a}/M127)");
        }
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert_eq!(mod_pow(&big(12345), &big(0), &big(23)).unwrap(), big(1));
        let mut direct = 1u64;
        for _ in 0..22 {
            direct = direct * 3 % 23;
        }
        assert_eq!(direct, 1);
        assert_eq!(mod_pow(&big(3), &big(22), &big(23)).unwrap(), big(direct));
        assert!(mod_pow(&big(3), &big(2), &big(1)).is_err());
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&big(3), &big(7)).unwrap(), big(5));
        assert_eq!(mod_inverse(&big(1), &big(1_000_003)).unwrap(), big(1));
        match mod_inverse(&big(2), &big(4)) {
            Err(ArithError::NotInvertible { gcd, .. }) => assert_eq!(gcd, big(2)),
            other => panic!("expected not-invertible, got {other:?}"),
        }
    }

    #[test]
    fn mod_inverse_exhaustive_below_1000() {
        for n in 2u64..1000 {
            for a in 1..n {
                let g = gcd(&big(a), &big(n));
                match mod_inverse(&big(a), &big(n)) {
                    Ok(u) => {
                        assert!(g.is_one());
                        assert!(u < big(n));
                        assert_eq!(big(a) * u % big(n), big(1) % big(n));
                    }
                    Err(_) => assert!(!g.is_one()),
                }
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&big(12), &big(18)), big(6));
        assert_eq!(gcd(&big(0), &big(5)), big(5));
        let n = (big(3) << 100u32) - 1u32;
        assert_eq!(gcd(&n, &big(2)), big(1));
    }

    #[test]
    fn decimal_digits_matches_string_length() {
        for v in [0u64, 1, 9, 10, 99, 100, 999_999, 1_000_000, u64::MAX] {
            assert_eq!(decimal_digits(&big(v)), v.to_string().len() as u64);
        }
        let n = (big(3) << 10_000u32) - 1u32;
        assert_eq!(decimal_digits(&n), n.to_string().len() as u64);
        let p10 = num_traits::pow(big(10), 500);
        assert_eq!(decimal_digits(&p10), 501);
        assert_eq!(decimal_digits(&(p10 - 1u32)), 500);
    }
}
