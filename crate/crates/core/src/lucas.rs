//! Companion Lucas sequences `V_n(P, Q)` and the squaring iteration
//! `S_{j+1} = S_j^2 - 2`.
//!
//! [`lucas_v_mod`] is the fast path used by the test engine. The other two
//! evaluators, [`lucas_v_naive`] (linear recurrence) and [`lucas_v_sum`]
//! (binomial sum), compute exact integers and exist to cross-check it.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::ArithError;
use crate::modulus::{GenericModulus, Reducer};

/// Parameters `(P, Q)` of a Lucas sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LucasParams {
    pub p: BigInt,
    pub q: BigInt,
}

impl LucasParams {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        LucasParams {
            p: p.into(),
            q: q.into(),
        }
    }

    /// `D = P^2 - 4Q`, recomputed on every call.
    pub fn discriminant(&self) -> BigInt {
        &self.p * &self.p - BigInt::from(4) * &self.q
    }
}

fn residue(v: &BigInt, n: &BigUint) -> BigUint {
    v.mod_floor(&BigInt::from(n.clone()))
        .magnitude()
        .clone()
}

fn check_odd_modulus(modulus: &BigUint) -> Result<(), ArithError> {
    if *modulus < BigUint::from(2u32) || modulus.is_even() {
        return Err(ArithError::InvalidArgument(format!(
            "Lucas modulus must be odd and at least 3, got {modulus}"
        )));
    }
    Ok(())
}

/// `V_n(P, Q) mod modulus` for an odd modulus.
pub fn lucas_v_mod(params: &LucasParams, n: &BigUint, modulus: &BigUint) -> Result<BigUint, ArithError> {
    check_odd_modulus(modulus)?;
    Ok(lucas_v_mod_with(params, n, &GenericModulus::new(modulus.clone())))
}

/// [`lucas_v_mod`] over any [`Reducer`].
///
/// Walks the bits of `n` from the top, keeping `(V_j, V_{j+1}, Q^j)` and
/// applying `V_{2j} = V_j^2 - 2Q^j`, `V_{2j+1} = V_j V_{j+1} - P Q^j`.
pub fn lucas_v_mod_with<R: Reducer>(params: &LucasParams, n: &BigUint, reducer: &R) -> BigUint {
    let modulus = reducer.modulus();
    let p = residue(&params.p, modulus);
    let q = residue(&params.q, modulus);
    let two = BigUint::from(2u32) % modulus;
    let q_is_one = q.is_one();

    let mut v_j = two.clone();
    let mut v_next = p.clone();
    let mut q_j = BigUint::one() % modulus;

    for bit in (0..n.bits()).rev() {
        let cross = reducer.sub(&reducer.mul(&v_j, &v_next), &reducer.mul(&p, &q_j));
        if n.bit(bit) {
            // j -> 2j + 1
            let q_next = if q_is_one { q_j.clone() } else { reducer.mul(&q_j, &q) };
            let two_q_next = reducer.reduce(&q_next << 1u32);
            v_next = reducer.sub(&reducer.square(&v_next), &two_q_next);
            v_j = cross;
            q_j = if q_is_one { q_j } else { reducer.mul(&q_j, &q_next) };
        } else {
            // j -> 2j
            let two_q_j = reducer.reduce(&q_j << 1u32);
            v_j = reducer.sub(&reducer.square(&v_j), &two_q_j);
            v_next = cross;
            q_j = if q_is_one { q_j } else { reducer.square(&q_j) };
        }
    }
    v_j
}

/// Exact `V_n(P, Q)` by the defining recurrence. Intended for small `n`.
pub fn lucas_v_naive(params: &LucasParams, n: u64) -> BigInt {
    let mut prev = BigInt::from(2);
    if n == 0 {
        return prev;
    }
    let mut cur = params.p.clone();
    for _ in 1..n {
        let next = &params.p * &cur - &params.q * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Exact `V_n(P, Q)` by the closed binomial sum
/// `sum_{r=0}^{n/2} n/(n-r) * C(n-r, r) * P^(n-2r) * (-Q)^r`.
///
/// Each coefficient `n * C(n-r, r) / (n-r)` is an integer, so it is formed
/// with one exact division. For `n = 0` the sum is undefined and `V_0 = 2`
/// is returned.
pub fn lucas_v_sum(params: &LucasParams, n: u64) -> BigInt {
    if n == 0 {
        return BigInt::from(2);
    }
    let neg_q = -&params.q;
    let mut total = BigInt::zero();
    for r in 0..=n / 2 {
        let numerator = BigInt::from(n) * binomial(n - r, r);
        let (coefficient, rem) = numerator.div_rem(&BigInt::from(n - r));
        debug_assert!(rem.is_zero(), "n/(n-r)*C(n-r,r) is integral");
        let term = coefficient
            * num_traits::pow(params.p.clone(), (n - 2 * r) as usize)
            * num_traits::pow(neg_q.clone(), r as usize);
        total += term;
    }
    total
}

fn binomial(n: u64, r: u64) -> BigInt {
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Record of a run of the squaring iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SIterationTrace {
    pub initial: BigUint,
    pub steps: u64,
    pub final_residue: BigUint,
}

impl SIterationTrace {
    pub fn vanished(&self) -> bool {
        self.final_residue.is_zero()
    }
}

/// `S_iterations(x) mod modulus` where `S_0 = x` and `S_{j+1} = S_j^2 - 2`.
pub fn s_iterate(x: &BigUint, iterations: u64, modulus: &BigUint) -> Result<SIterationTrace, ArithError> {
    if *modulus < BigUint::from(2u32) {
        return Err(ArithError::InvalidArgument(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    s_iterate_with(x, iterations, &GenericModulus::new(modulus.clone()))
}

/// [`s_iterate`] over any [`Reducer`]. This loop is the hot kernel.
pub fn s_iterate_with<R: Reducer>(x: &BigUint, iterations: u64, reducer: &R) -> Result<SIterationTrace, ArithError> {
    let modulus = reducer.modulus();
    if x >= modulus {
        return Err(ArithError::InvalidArgument(format!(
            "seed must be reduced below the modulus ({} bits >= {} bits)",
            x.bits(),
            modulus.bits()
        )));
    }
    let two = BigUint::from(2u32) % modulus;
    let mut s = x.clone();
    for _ in 0..iterations {
        s = reducer.sub(&reducer.square(&s), &two);
    }
    Ok(SIterationTrace {
        initial: x.clone(),
        steps: iterations,
        final_residue: s,
    })
}
