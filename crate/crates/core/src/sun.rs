//! The general test engine for `N = k*2^m +- 1`.
//!
//! Given integers `b, c` with `gcd(N, c) = 1` and
//! `(2c+b / N) = (2c-b / N) = -(c / N)`, the number `N` is prime exactly when
//! `N` divides `S_{m-2}(x)` with seed `x = c^{-k} V_k(b, c^2) mod N`.
//! All symbols are Jacobi symbols over `N`, whose primality is unknown.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, jacobi, mod_inverse, ArithError, JacobiValue};
use crate::candidate::Candidate;
use crate::lucas::{lucas_v_mod_with, s_iterate_with, LucasParams, SIterationTrace};
use crate::modulus::{Reducer, SpecialFormModulus};

/// The pair `(b, c)` fed to the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SunParams {
    pub b: i64,
    pub c: i64,
}

impl SunParams {
    pub fn new(b: i64, c: i64) -> Self {
        SunParams { b, c }
    }

    /// `(2c + b, 2c - b)`, computed without overflow.
    pub fn shifted(&self) -> (BigInt, BigInt) {
        let two_c = BigInt::from(self.c) * 2;
        let b = BigInt::from(self.b);
        (&two_c + &b, two_c - b)
    }
}

impl fmt::Display for SunParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b={},c={}", self.b, self.c)
    }
}

/// Outcome of checking the Jacobi preconditions for one `(b, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunConditions {
    /// `gcd(N, |c|)`.
    pub gcd_n_c: BigUint,
    /// `(2c + b / N)`.
    pub plus_symbol: JacobiValue,
    /// `(2c - b / N)`.
    pub minus_symbol: JacobiValue,
    /// `(c / N)`.
    pub c_symbol: JacobiValue,
    pub satisfied: bool,
}

impl SunConditions {
    /// A proper factor of `N` exposed by a zero symbol or by `gcd(N, c)`.
    pub fn witness(&self, cand: &Candidate, params: SunParams) -> Option<BigUint> {
        let n = cand.n();
        let proper = |g: BigUint| (!g.is_one() && !g.is_zero() && &g < n).then_some(g);
        if let Some(f) = proper(self.gcd_n_c.clone()) {
            return Some(f);
        }
        let (plus, minus) = params.shifted();
        for (symbol, value) in [(self.plus_symbol, plus), (self.minus_symbol, minus)] {
            if symbol == JacobiValue::Zero {
                if let Some(f) = proper(gcd(n, value.magnitude())) {
                    return Some(f);
                }
            }
        }
        None
    }
}

/// Checks `gcd(N, c) = 1` and `(2c+b/N) = (2c-b/N) = -(c/N) != 0`.
pub fn check_sun_conditions(cand: &Candidate, params: SunParams) -> SunConditions {
    let n = cand.n();
    let symbol = |v: &BigInt| jacobi(v, n).expect("N is odd");
    let gcd_n_c = gcd(n, &BigUint::from(params.c.unsigned_abs()));
    let (plus, minus) = params.shifted();
    let plus_symbol = symbol(&plus);
    let minus_symbol = symbol(&minus);
    let c_symbol = symbol(&BigInt::from(params.c));
    let satisfied = params.c != 0
        && gcd_n_c.is_one()
        && c_symbol != JacobiValue::Zero
        && plus_symbol == -c_symbol
        && minus_symbol == -c_symbol;
    SunConditions {
        gcd_n_c,
        plus_symbol,
        minus_symbol,
        c_symbol,
        satisfied,
    }
}

/// The seed `x = c^{-k} V_k(b, c^2) mod N`.
pub fn sun_seed(cand: &Candidate, params: SunParams) -> Result<BigUint, ArithError> {
    sun_seed_with(cand, params, &SpecialFormModulus::for_candidate(cand))
}

fn sun_seed_with<R: Reducer>(cand: &Candidate, params: SunParams, reducer: &R) -> Result<BigUint, ArithError> {
    let n = reducer.modulus();
    let c = BigInt::from(params.c);
    let lucas = LucasParams::new(params.b, &c * &c);
    let v = lucas_v_mod_with(&lucas, &BigUint::from(cand.k()), reducer);
    if params.c == 1 {
        return Ok(v);
    }
    let c_residue = {
        let r = BigUint::from(params.c.unsigned_abs()) % n;
        if params.c < 0 && !r.is_zero() {
            n - r
        } else {
            r
        }
    };
    let c_inv = mod_inverse(&c_residue, n)?;
    let mut scale = BigUint::one();
    // c^{-k} by square-and-multiply through the same reducer
    let k = cand.k();
    for bit in (0..u64::BITS - k.leading_zeros()).rev() {
        scale = reducer.square(&scale);
        if (k >> bit) & 1 == 1 {
            scale = reducer.mul(&scale, &c_inv);
        }
    }
    Ok(reducer.mul(&scale, &v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Prime,
    Composite,
    NotApplicable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Prime => "prime",
            Outcome::Composite => "composite",
            Outcome::NotApplicable => "not-applicable",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of running a test on one candidate.
///
/// A `Prime` or `Composite` reached through the iteration carries its trace
/// with `m - 2` steps. A `Composite` found through a gcd carries the factor
/// in `witness` and no trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rule: String,
    pub params: Option<SunParams>,
    pub trace: Option<SIterationTrace>,
    pub witness: Option<BigUint>,
    pub reason: Option<String>,
}

impl Verdict {
    pub fn not_applicable(rule: impl Into<String>, reason: impl Into<String>) -> Self {
        Verdict {
            outcome: Outcome::NotApplicable,
            rule: rule.into(),
            params: None,
            trace: None,
            witness: None,
            reason: Some(reason.into()),
        }
    }

    pub fn is_prime(&self) -> bool {
        self.outcome == Outcome::Prime
    }
}

pub(crate) fn generic_rule_label(params: SunParams) -> String {
    format!("sun({params})")
}

/// Runs the general test with explicit `(b, c)`.
pub fn sun_test(cand: &Candidate, params: SunParams) -> Verdict {
    sun_test_labeled(cand, params, generic_rule_label(params))
}

pub(crate) fn sun_test_labeled(cand: &Candidate, params: SunParams, rule: String) -> Verdict {
    let conditions = check_sun_conditions(cand, params);
    if !conditions.satisfied {
        if let Some(factor) = conditions.witness(cand, params) {
            return Verdict {
                outcome: Outcome::Composite,
                rule,
                params: Some(params),
                trace: None,
                witness: Some(factor),
                reason: None,
            };
        }
        let reason = if params.c == 0 {
            "c must be nonzero".to_string()
        } else if !conditions.gcd_n_c.is_one() {
            format!("gcd(N, c) = {}", conditions.gcd_n_c)
        } else {
            format!(
                "Jacobi preconditions fail: (2c+b/N)={}, (2c-b/N)={}, (c/N)={}",
                conditions.plus_symbol, conditions.minus_symbol, conditions.c_symbol
            )
        };
        let mut verdict = Verdict::not_applicable(rule, reason);
        verdict.params = Some(params);
        return verdict;
    }

    let reducer = SpecialFormModulus::for_candidate(cand);
    let seed = match sun_seed_with(cand, params, &reducer) {
        Ok(seed) => seed,
        Err(err) => {
            // gcd(N, c) = 1 was checked, so this is unreachable in practice.
            let mut verdict = Verdict::not_applicable(rule, err.to_string());
            verdict.params = Some(params);
            return verdict;
        }
    };
    let trace = s_iterate_with(&seed, cand.m() - 2, &reducer).expect("seed is reduced");
    Verdict {
        outcome: if trace.vanished() {
            Outcome::Prime
        } else {
            Outcome::Composite
        },
        rule,
        params: Some(params),
        trace: Some(trace),
        witness: None,
        reason: None,
    }
}

/// Smallest `(c, b)` in lexicographic order with `1 <= c <= c_max`,
/// `1 <= b <= b_max`, `2c != b`, satisfying the preconditions.
pub fn find_params(cand: &Candidate, b_max: u32, c_max: u32) -> Option<SunParams> {
    (1..=i64::from(c_max))
        .flat_map(|c| (1..=i64::from(b_max)).map(move |b| SunParams::new(b, c)))
        .filter(|p| 2 * p.c != p.b)
        .find(|&p| check_sun_conditions(cand, p).satisfied)
}
