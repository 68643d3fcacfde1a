//! Reduction strategies for the squaring kernel.
//!
//! [`GenericModulus`] reduces by long division and works for any modulus.
//! [`SpecialFormModulus`] exploits `k*2^m = -+1 (mod N)`: the high part of a
//! product is folded back onto the low `m` bits with one short division by
//! `k`, so a reduction costs linear time instead of a full long division.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::candidate::{Candidate, Sign};

/// A modulus together with a way to reduce values by it.
pub trait Reducer {
    fn modulus(&self) -> &BigUint;

    /// Reduces `x` into `[0, modulus)`.
    fn reduce(&self, x: BigUint) -> BigUint;

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        self.reduce(a * b)
    }

    fn square(&self, a: &BigUint) -> BigUint {
        self.reduce(a * a)
    }

    /// `a - b mod N` for `a, b` already reduced.
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + self.modulus() - b
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericModulus {
    n: BigUint,
}

impl GenericModulus {
    pub fn new(n: BigUint) -> Self {
        GenericModulus { n }
    }
}

impl Reducer for GenericModulus {
    fn modulus(&self) -> &BigUint {
        &self.n
    }

    fn reduce(&self, x: BigUint) -> BigUint {
        if x < self.n {
            x
        } else {
            x % &self.n
        }
    }
}

/// Reduction modulo `N = k*2^m + s` with `s = +-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialFormModulus {
    k: u64,
    m: u64,
    sign: Sign,
    n: BigUint,
    low_mask: BigUint,
    // k*2^m, the point below which no fold is possible
    k_shifted: BigUint,
}

impl SpecialFormModulus {
    pub fn new(k: u64, m: u64, sign: Sign) -> Self {
        assert!(k > 0, "k must be positive");
        let k_shifted = BigUint::from(k) << m;
        let n = match sign {
            Sign::Plus => &k_shifted + 1u32,
            Sign::Minus => &k_shifted - 1u32,
        };
        let low_mask = (BigUint::one() << m) - 1u32;
        SpecialFormModulus {
            k,
            m,
            sign,
            n,
            low_mask,
            k_shifted,
        }
    }

    pub fn for_candidate(cand: &Candidate) -> Self {
        Self::new(cand.k(), cand.m(), cand.sign())
    }
}

impl Reducer for SpecialFormModulus {
    fn modulus(&self) -> &BigUint {
        &self.n
    }

    fn reduce(&self, mut x: BigUint) -> BigUint {
        // x = q*2^m + r and q = q1*k + q0, so x = q0*2^m + r + q1*(k*2^m)
        // and k*2^m = -s (mod N). Each pass shrinks x to about N + x/(k*2^m).
        while x >= self.n {
            if x < self.k_shifted {
                // only N itself (minus form) lands here
                x -= &self.n;
                continue;
            }
            let high = &x >> self.m;
            let low = x & &self.low_mask;
            let (q1, q0) = high.div_rem(&BigUint::from(self.k));
            let folded = (q0 << self.m) | low;
            x = match self.sign {
                Sign::Minus => folded + q1,
                Sign::Plus => {
                    let mut folded = folded;
                    while folded < q1 {
                        folded += &self.n;
                    }
                    folded - q1
                }
            };
        }
        debug_assert!(x < self.n || x.is_zero());
        x
    }
}
