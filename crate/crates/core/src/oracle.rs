//! Independent primality ground truth and the cross-check driver.
//!
//! Nothing here touches the Lucas-sequence code: trial division and the
//! strong probable-prime test use their own arithmetic.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::candidate::{Candidate, Sign};
use crate::rules::{applicable_rules, class_test};
use crate::sun::{find_params, sun_test, Outcome, Verdict};

/// Default upper bound for exact trial division.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000_000_000;

/// Bases that make the strong test exact for every `n < 2^64`.
pub const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} is outside the exact range [2, {bound}]")]
    OutOfRange { n: String, bound: u64 },
    #[error("invalid cross-check range: {0}")]
    InvalidRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    TrialDivision,
    StrongProbablePrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleOutcome {
    Prime,
    /// Passed the strong test above the deterministic range.
    ProbablePrime,
    Composite {
        #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_big")]
        factor: Option<BigUint>,
        #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_big")]
        base: Option<BigUint>,
    },
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub outcome: OracleOutcome,
    pub method: OracleMethod,
}

impl OracleVerdict {
    pub fn is_composite(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Composite { .. })
    }
}

/// Exact verdict by trial division, for `2 <= n <= TRIAL_DIVISION_BOUND`.
pub fn trial_division(n: &BigUint) -> Result<OracleVerdict, OracleError> {
    trial_division_bounded(n, TRIAL_DIVISION_BOUND)
}

pub fn trial_division_bounded(n: &BigUint, bound: u64) -> Result<OracleVerdict, OracleError> {
    let small = n
        .to_u64()
        .filter(|&v| (2..=bound).contains(&v))
        .ok_or_else(|| OracleError::OutOfRange {
            n: n.to_string(),
            bound,
        })?;
    let composite = |f: u64| OracleVerdict {
        outcome: OracleOutcome::Composite {
            factor: Some(BigUint::from(f)),
            base: None,
        },
        method: OracleMethod::TrialDivision,
    };
    if small % 2 == 0 && small != 2 {
        return Ok(composite(2));
    }
    let mut d = 3u64;
    while d * d <= small {
        if small % d == 0 {
            return Ok(composite(d));
        }
        d += 2;
    }
    Ok(OracleVerdict {
        outcome: OracleOutcome::Prime,
        method: OracleMethod::TrialDivision,
    })
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

// true when `a` is a witness to the compositeness of odd n
fn strong_witness_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return false;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return false;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return false;
        }
    }
    true
}

fn strong_witness_big(n: &BigUint, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return false;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return false;
        }
    }
    true
}

/// Strong probable-prime test. Exact below `2^64` (fixed base set);
/// above that, `rounds` random bases give a `ProbablePrime` at best.
pub fn probable_prime(n: &BigUint, rounds: u32) -> OracleVerdict {
    let method = OracleMethod::StrongProbablePrime;
    let composite = |factor: Option<BigUint>, base: Option<BigUint>| OracleVerdict {
        outcome: OracleOutcome::Composite { factor, base },
        method,
    };
    let two = BigUint::from(2u32);
    if *n < two {
        return composite(None, None);
    }
    if *n == two || *n == BigUint::from(3u32) {
        return OracleVerdict {
            outcome: OracleOutcome::Prime,
            method,
        };
    }
    if n.is_even() {
        return composite(Some(two), None);
    }
    if let Some(small) = n.to_u64() {
        for &a in &DETERMINISTIC_BASES {
            if small == a {
                return OracleVerdict {
                    outcome: OracleOutcome::Prime,
                    method,
                };
            }
            if strong_witness_u64(small, a) {
                return composite(None, Some(BigUint::from(a)));
            }
        }
        return OracleVerdict {
            outcome: OracleOutcome::Prime,
            method,
        };
    }
    for &a in &DETERMINISTIC_BASES {
        if strong_witness_big(n, &BigUint::from(a)) {
            return composite(None, Some(BigUint::from(a)));
        }
    }
    let mut rng = rand::thread_rng();
    let upper = n - 2u32;
    for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &upper);
        if strong_witness_big(n, &a) {
            return composite(None, Some(a));
        }
    }
    OracleVerdict {
        outcome: OracleOutcome::ProbablePrime,
        method,
    }
}

/// Trial division where it is exact and cheap, the strong test otherwise.
pub fn reference_verdict(n: &BigUint) -> OracleVerdict {
    match trial_division(n) {
        Ok(v) => v,
        Err(_) => probable_prime(n, 32),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CrossCheckMode {
    ClassRules,
    Generic { b_max: u32, c_max: u32 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RuleTally {
    pub cases: u64,
    pub primes: u64,
    pub composites: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub k: u64,
    pub m: u64,
    pub sign: Sign,
    pub n: String,
    pub rule: String,
    pub lucasian: Outcome,
    pub oracle: OracleOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub mode: CrossCheckMode,
    pub m_min: u64,
    pub m_max: u64,
    pub signs: Vec<Sign>,
    pub cases: u64,
    pub primes: u64,
    pub composites: u64,
    /// Lucasian primes the oracle could only call probable primes.
    pub probable_only: u64,
    pub per_rule: BTreeMap<String, RuleTally>,
    pub disagreements: Vec<Disagreement>,
}

impl CrossCheckReport {
    fn empty(mode: CrossCheckMode, m_min: u64, m_max: u64, signs: &[Sign]) -> Self {
        CrossCheckReport {
            mode,
            m_min,
            m_max,
            signs: signs.to_vec(),
            cases: 0,
            primes: 0,
            composites: 0,
            probable_only: 0,
            per_rule: BTreeMap::new(),
            disagreements: Vec::new(),
        }
    }

    /// Associative merge; disagreements keep the order of `self` then `other`.
    pub fn merge(mut self, other: CrossCheckReport) -> Self {
        self.cases += other.cases;
        self.primes += other.primes;
        self.composites += other.composites;
        self.probable_only += other.probable_only;
        for (rule, t) in other.per_rule {
            let e = self.per_rule.entry(rule).or_default();
            e.cases += t.cases;
            e.primes += t.primes;
            e.composites += t.composites;
        }
        self.disagreements.extend(other.disagreements);
        self
    }

    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Largest `m` for which every `N = k*2^m +- 1` with `k < 2^m` stays below
/// `2^64`, the oracle's exact regime.
pub const CROSS_CHECK_MAX_M: u64 = 31;

fn lucasian_verdict(cand: &Candidate, mode: CrossCheckMode) -> Option<Verdict> {
    match mode {
        CrossCheckMode::ClassRules => {
            let rules = applicable_rules(cand).ok()?;
            if rules.is_empty() {
                return None;
            }
            Some(class_test(cand))
        }
        CrossCheckMode::Generic { b_max, c_max } => {
            let params = find_params(cand, b_max, c_max)?;
            Some(sun_test(cand, params))
        }
    }
}

fn check_one(cand: &Candidate, mode: CrossCheckMode, report: &mut CrossCheckReport) {
    let Some(verdict) = lucasian_verdict(cand, mode) else {
        return;
    };
    let oracle = reference_verdict(cand.n());
    report.cases += 1;
    let tally = report.per_rule.entry(verdict.rule.clone()).or_default();
    tally.cases += 1;
    match verdict.outcome {
        Outcome::Prime => {
            report.primes += 1;
            tally.primes += 1;
        }
        Outcome::Composite => {
            report.composites += 1;
            tally.composites += 1;
        }
        Outcome::NotApplicable => {}
    }
    let agrees = match (&verdict.outcome, &oracle.outcome) {
        (Outcome::Prime, OracleOutcome::Prime) => true,
        (Outcome::Prime, OracleOutcome::ProbablePrime) => {
            report.probable_only += 1;
            true
        }
        (Outcome::Composite, OracleOutcome::Composite { .. }) => true,
        _ => false,
    };
    if !agrees {
        report.disagreements.push(Disagreement {
            k: cand.k(),
            m: cand.m(),
            sign: cand.sign(),
            n: cand.n().to_string(),
            rule: verdict.rule,
            lucasian: verdict.outcome,
            oracle: oracle.outcome,
        });
    }
}

/// Runs the Lucasian verdict against the oracle for every odd `k < 2^m`,
/// `m` in `[m_min, m_max]` and every requested sign. Work is spread over the
/// rayon pool; the report is identical to a sequential run.
pub fn cross_check(
    m_min: u64,
    m_max: u64,
    signs: &[Sign],
    mode: CrossCheckMode,
) -> Result<CrossCheckReport, OracleError> {
    if m_min < 3 || m_min > m_max {
        return Err(OracleError::InvalidRange(format!(
            "need 3 <= m_min <= m_max, got [{m_min}, {m_max}]"
        )));
    }
    if m_max > CROSS_CHECK_MAX_M {
        return Err(OracleError::InvalidRange(format!(
            "m_max {m_max} exceeds {CROSS_CHECK_MAX_M}, beyond the exact oracle regime"
        )));
    }
    let mut signs: Vec<Sign> = signs.to_vec();
    signs.sort();
    signs.dedup();

    let mut report = CrossCheckReport::empty(mode, m_min, m_max, &signs);
    for m in m_min..=m_max {
        const CHUNK: u64 = 1 << 10;
        let k_count = 1u64 << (m - 1); // odd k below 2^m
        let part = (0..k_count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let mut local = CrossCheckReport::empty(mode, m_min, m_max, &signs);
                let lo = chunk * CHUNK;
                let hi = (lo + CHUNK).min(k_count);
                for idx in lo..hi {
                    let k = 2 * idx + 1;
                    for &sign in &signs {
                        let cand = Candidate::new(k, m, sign).expect("odd k below 2^m");
                        check_one(&cand, mode, &mut local);
                    }
                }
                local
            })
            .reduce(
                || CrossCheckReport::empty(mode, m_min, m_max, &signs),
                CrossCheckReport::merge,
            );
        report = report.merge(part);
    }
    Ok(report)
}

/// Factor of a composite verdict, if the method exposed one.
pub fn witness_factor(v: &OracleVerdict) -> Option<&BigUint> {
    match &v.outcome {
        OracleOutcome::Composite { factor, .. } => factor.as_ref(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn trial_division_examples() {
        assert_eq!(trial_division(&big(23)).unwrap().outcome, OracleOutcome::Prime);
        let v = trial_division(&big(143)).unwrap();
        assert_eq!(witness_factor(&v), Some(&big(11)));
        let v = trial_division(&big(767)).unwrap();
        assert_eq!(witness_factor(&v), Some(&big(13)));
        assert_eq!(trial_division(&big(2)).unwrap().outcome, OracleOutcome::Prime);
        assert_eq!(witness_factor(&trial_division(&big(1 << 20)).unwrap()), Some(&big(2)));
    }

    #[test]
    fn trial_division_range() {
        assert!(trial_division(&big(1)).is_err());
        assert!(trial_division(&big(0)).is_err());
        assert!(trial_division(&big(TRIAL_DIVISION_BOUND + 1)).is_err());
        assert!(trial_division_bounded(&big(101), 100).is_err());
        assert!(trial_division(&big(999_999_999_989)).unwrap().outcome == OracleOutcome::Prime);
    }

    #[test]
    fn probable_prime_examples() {
        let m61 = (BigUint::one() << 61u32) - 1u32;
        assert_eq!(probable_prime(&m61, 1).outcome, OracleOutcome::Prime);
        let v = probable_prime(&big(341), 1);
        assert_eq!(
            v.outcome,
            OracleOutcome::Composite {
                factor: None,
                base: Some(big(2))
            }
        );
        assert_eq!(probable_prime(&big(113), 1).outcome, OracleOutcome::Prime);
        for p in DETERMINISTIC_BASES {
            assert_eq!(probable_prime(&big(p), 1).outcome, OracleOutcome::Prime);
        }
    }

    #[test]
    fn strong_pseudoprimes_to_small_bases_are_caught() {
        // 3215031751 is a strong pseudoprime to bases 2, 3, 5, 7.
        assert!(probable_prime(&big(3_215_031_751), 1).is_composite());
        // 3825123056546413051 fools bases 2..=23.
        assert!(probable_prime(&big(3_825_123_056_546_413_051), 1).is_composite());
        // Largest prime below 2^64.
        assert_eq!(
            probable_prime(&big(18_446_744_073_709_551_557), 1).outcome,
            OracleOutcome::Prime
        );
    }

    #[test]
    fn beyond_two_to_64() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert_eq!(probable_prime(&m127, 8).outcome, OracleOutcome::ProbablePrime);
        let composite = &m127 * big(3);
        assert!(probable_prime(&composite, 8).is_composite());
        let m61 = (BigUint::one() << 61u32) - 1u32;
        assert!(probable_prime(&(&m61 * &m61), 8).is_composite());
    }

    #[test]
    fn oracles_agree_below_100k() {
        for n in 2u64..100_000 {
            let t = trial_division(&big(n)).unwrap();
            let p = probable_prime(&big(n), 1);
            assert_eq!(t.is_composite(), p.is_composite(), "{n}");
            if let Some(f) = witness_factor(&t) {
                assert!(n % f.to_u64().unwrap() == 0 && f > &big(1) && f < &big(n));
            }
        }
    }

    #[test]
    fn cross_check_small() {
        let r = cross_check(3, 3, &[Sign::Minus], CrossCheckMode::ClassRules).unwrap();
        assert!(r.is_clean());
        assert!(r.per_rule["T3.1"].primes >= 1);
        let r = cross_check(3, 8, &[], CrossCheckMode::ClassRules).unwrap();
        assert_eq!(r.cases, 0);
        assert!(cross_check(2, 8, &[Sign::Minus], CrossCheckMode::ClassRules).is_err());
        assert!(cross_check(9, 8, &[Sign::Minus], CrossCheckMode::ClassRules).is_err());
        assert!(cross_check(3, 40, &[Sign::Minus], CrossCheckMode::ClassRules).is_err());
    }

    #[test]
    fn merge_is_associative() {
        let mode = CrossCheckMode::ClassRules;
        let a = cross_check(3, 5, &Sign::ALL, mode).unwrap();
        let b = cross_check(6, 7, &Sign::ALL, mode).unwrap();
        let c = cross_check(8, 8, &Sign::ALL, mode).unwrap();
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left, right);
    }
}
