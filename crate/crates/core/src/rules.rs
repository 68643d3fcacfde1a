//! The four class tests as congruence tables.
//!
//! Each [`ClassRule`] fixes the form sign, the Lucas parameter `b` (with
//! `c = 1`), an optional divisor of `k`, and a list of branches. A branch is
//! a conjunction of congruences on `k` plus a set of allowed residues of `m`.
//! A candidate matches a rule when it matches any branch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{jacobi, JacobiValue};
use crate::candidate::{Candidate, Sign};
use crate::residue::residue_table;
use crate::sun::{sun_test_labeled, SunParams, Verdict};
#[cfg(test)]
use crate::sun::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    #[serde(rename = "T3.1")]
    T31,
    #[serde(rename = "T3.2")]
    T32,
    #[serde(rename = "T3.3")]
    T33,
    #[serde(rename = "T3.4")]
    T34,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::T31 => "T3.1",
            RuleId::T32 => "T3.2",
            RuleId::T33 => "T3.3",
            RuleId::T34 => "T3.4",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `x mod modulus` lies in `residues`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl Congruence {
    pub fn new(modulus: u64, residues: &[u64]) -> Self {
        Congruence {
            modulus,
            residues: residues.to_vec(),
        }
    }

    pub fn holds(&self, x: u64) -> bool {
        self.residues.contains(&(x % self.modulus))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// All must hold.
    pub k: Vec<Congruence>,
    pub m: Congruence,
}

impl Branch {
    pub fn matches(&self, k: u64, m: u64) -> bool {
        self.k.iter().all(|c| c.holds(k)) && self.m.holds(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRule {
    pub id: RuleId,
    pub sign: Sign,
    pub b: i64,
    pub k_divisor: Option<u64>,
    pub branches: Vec<Branch>,
}

impl ClassRule {
    /// Index of the first branch matching `(k, m)`, ignoring sign.
    pub fn matching_branch(&self, k: u64, m: u64) -> Option<usize> {
        if let Some(d) = self.k_divisor {
            if k % d != 0 {
                return None;
            }
        }
        self.branches.iter().position(|br| br.matches(k, m))
    }

    /// Period in `k` and in `m` after which membership repeats.
    pub fn periods(&self) -> (u64, u64) {
        let k_period = self
            .branches
            .iter()
            .flat_map(|br| br.k.iter().map(|c| c.modulus))
            .chain(self.k_divisor)
            .fold(1u64, |acc, m| acc.lcm(&m));
        let m_period = self
            .branches
            .iter()
            .map(|br| br.m.modulus)
            .fold(1u64, |acc, m| acc.lcm(&m));
        (k_period, m_period)
    }
}

fn branch(k: &[(u64, &[u64])], m_mod: u64, m_res: &[u64]) -> Branch {
    Branch {
        k: k.iter().map(|&(md, r)| Congruence::new(md, r)).collect(),
        m: Congruence::new(m_mod, m_res),
    }
}

fn build_rules() -> Vec<ClassRule> {
    vec![
        ClassRule {
            id: RuleId::T31,
            sign: Sign::Minus,
            b: 3,
            k_divisor: Some(3),
            branches: vec![
                branch(&[(10, &[1])], 4, &[2, 3]),
                branch(&[(10, &[3])], 4, &[0, 3]),
                branch(&[(10, &[7])], 4, &[1, 2]),
                branch(&[(10, &[9])], 4, &[0, 1]),
            ],
        },
        ClassRule {
            id: RuleId::T32,
            sign: Sign::Minus,
            b: 5,
            k_divisor: Some(3),
            branches: vec![
                branch(&[(42, &[3])], 3, &[0, 2]),
                branch(&[(42, &[9])], 3, &[0]),
                branch(&[(42, &[15])], 3, &[1]),
                branch(&[(42, &[27])], 3, &[1, 2]),
                branch(&[(42, &[33])], 3, &[0, 1]),
                branch(&[(42, &[39])], 3, &[2]),
            ],
        },
        ClassRule {
            id: RuleId::T33,
            sign: Sign::Plus,
            b: 5,
            k_divisor: None,
            branches: vec![
                branch(&[(42, &[1])], 6, &[2, 4]),
                branch(&[(42, &[5])], 6, &[3]),
                branch(&[(42, &[11])], 6, &[3, 5]),
                branch(&[(42, &[13])], 6, &[4]),
                branch(&[(42, &[17])], 6, &[5]),
                branch(&[(42, &[19])], 6, &[0]),
                branch(&[(42, &[23])], 6, &[1, 3]),
                branch(&[(42, &[25])], 6, &[0, 2]),
                branch(&[(42, &[29])], 6, &[1, 5]),
                branch(&[(42, &[31])], 6, &[2]),
                branch(&[(42, &[37])], 6, &[0, 4]),
                branch(&[(42, &[41])], 6, &[1]),
            ],
        },
        ClassRule {
            id: RuleId::T34,
            sign: Sign::Plus,
            b: 8,
            k_divisor: None,
            branches: vec![
                branch(&[(6, &[1]), (10, &[1, 7])], 4, &[0]),
                branch(&[(6, &[5]), (10, &[1, 3])], 4, &[1]),
                branch(&[(6, &[1]), (10, &[3, 9])], 4, &[2]),
                branch(&[(6, &[5]), (10, &[7, 9])], 4, &[3]),
            ],
        },
    ]
}

static RULES: std::sync::LazyLock<Vec<ClassRule>> = std::sync::LazyLock::new(build_rules);

/// The four class rules, in id order.
pub fn rule_table() -> &'static [ClassRule] {
    &RULES
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("rules disagree on {candidate}: {details}")]
    Disagreement { candidate: String, details: String },
}

/// Every rule whose hypotheses cover `cand`, with the matching branch index.
pub fn applicable_rules(cand: &Candidate) -> Result<Vec<(&'static ClassRule, usize)>, RuleError> {
    applicable_in(rule_table(), cand)
}

fn applicable_in<'a>(rules: &'a [ClassRule], cand: &Candidate) -> Result<Vec<(&'a ClassRule, usize)>, RuleError> {
    if cand.m() <= 2 {
        return Err(RuleError::InvalidCandidate("m must exceed 2".into()));
    }
    Ok(rules
        .iter()
        .filter(|r| r.sign == cand.sign())
        .filter_map(|r| r.matching_branch(cand.k(), cand.m()).map(|i| (r, i)))
        .collect())
}

fn run_rule(cand: &Candidate, rule: &ClassRule) -> Verdict {
    sun_test_labeled(cand, SunParams::new(rule.b, 1), rule.id.to_string())
}

/// Tests `cand` with the lowest-numbered applicable rule.
pub fn class_test(cand: &Candidate) -> Verdict {
    match applicable_rules(cand) {
        Err(err) => Verdict::not_applicable("none", err.to_string()),
        Ok(rules) => match rules.first() {
            None => Verdict::not_applicable("none", "no class rule covers this candidate"),
            Some((rule, _)) => run_rule(cand, rule),
        },
    }
}

/// Like [`class_test`], but runs every applicable rule and fails if their
/// outcomes differ. The returned verdict is the lowest-numbered rule's.
pub fn class_test_verified(cand: &Candidate) -> Result<Verdict, RuleError> {
    let rules = match applicable_rules(cand) {
        Err(err) => return Ok(Verdict::not_applicable("none", err.to_string())),
        Ok(rules) => rules,
    };
    let verdicts: Vec<Verdict> = rules.iter().map(|(r, _)| run_rule(cand, r)).collect();
    match verdicts.first() {
        None => Ok(Verdict::not_applicable("none", "no class rule covers this candidate")),
        Some(first) => {
            if verdicts.iter().any(|v| v.outcome != first.outcome) {
                let details = verdicts
                    .iter()
                    .map(|v| format!("{}={}", v.rule, v.outcome))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(RuleError::Disagreement {
                    candidate: cand.to_string(),
                    details,
                });
            }
            Ok(first.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyViolation {
    pub k: u64,
    pub m: u64,
    pub n: String,
    pub plus_symbol: JacobiValue,
    pub minus_symbol: JacobiValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub rule: RuleId,
    pub k_period: u64,
    pub m_period: u64,
    pub classes_checked: u64,
    pub witnesses_checked: u64,
    /// Residues of `N` seen modulo each lemma table used by the rule's two
    /// symbols, keyed by numerator.
    pub observed_residues: BTreeMap<i64, (u64, BTreeSet<u64>)>,
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Witnesses taken per axis in each residue class.
const WITNESSES_PER_AXIS: usize = 2;

/// Checks that every candidate the rule admits has `(2+b/N) = (2-b/N) = -1`.
///
/// Each residue class `(k mod K, m mod M)` over the rule's periods is
/// instantiated with its smallest witnesses: the two smallest odd `k` in the
/// class, each with the two smallest `m > 2` in the class with `k < 2^m`.
pub fn verify_rule_consistency(rule: &ClassRule) -> ConsistencyReport {
    let (k_period, m_period) = rule.periods();
    let plus_numerator = 2 + rule.b;
    let minus_numerator = 2 - rule.b;
    let mut observed: BTreeMap<i64, (u64, BTreeSet<u64>)> = BTreeMap::new();
    for numerator in [plus_numerator, minus_numerator] {
        if let Some(table) = residue_table(numerator) {
            observed.insert(numerator, (table.cases[0].modulus, BTreeSet::new()));
        }
    }

    let mut classes_checked = 0;
    let mut witnesses_checked = 0;
    let mut violations = Vec::new();
    let k_step = k_period.lcm(&2);

    for k_res in 0..k_period {
        for m_res in 0..m_period {
            // Smallest odd k in the class, if the class contains odd numbers.
            let Some(k0) = (0..2).map(|i| k_res + i * k_period).find(|k| k % 2 == 1 && *k > 0) else {
                continue;
            };
            // Membership only depends on the residues, so test the first witness.
            let m_first = (3..3 + m_period).find(|m| m % m_period == m_res).unwrap();
            if rule.matching_branch(k0, m_first).is_none() {
                continue;
            }
            classes_checked += 1;
            for i in 0..WITNESSES_PER_AXIS as u64 {
                let k = k0 + i * k_step;
                let m_min = (3..).find(|&m| m % m_period == m_res && m < 64 && (1u64 << m) > k).unwrap();
                for j in 0..WITNESSES_PER_AXIS as u64 {
                    let m = m_min + j * m_period;
                    let cand = Candidate::new(k, m, rule.sign).expect("witness is valid");
                    debug_assert!(rule.matching_branch(k, m).is_some());
                    witnesses_checked += 1;
                    let n = cand.n();
                    for (modulus, seen) in observed.values_mut() {
                        seen.insert((n % *modulus).to_u64().unwrap());
                    }
                    let plus_symbol = jacobi(&BigInt::from(plus_numerator), n).unwrap();
                    let minus_symbol = jacobi(&BigInt::from(minus_numerator), n).unwrap();
                    if plus_symbol != JacobiValue::MinusOne || minus_symbol != JacobiValue::MinusOne {
                        violations.push(ConsistencyViolation {
                            k,
                            m,
                            n: n.to_string(),
                            plus_symbol,
                            minus_symbol,
                        });
                    }
                }
            }
        }
    }

    ConsistencyReport {
        rule: rule.id,
        k_period,
        m_period,
        classes_checked,
        witnesses_checked,
        observed_residues: observed,
        violations,
    }
}

/// Outcome of [`class_test`] restricted to a rule, for callers that need a
/// specific rule rather than the dispatch choice.
pub fn rule_test(cand: &Candidate, rule: &ClassRule) -> Verdict {
    if cand.sign() != rule.sign || cand.m() <= 2 || rule.matching_branch(cand.k(), cand.m()).is_none() {
        return Verdict::not_applicable(rule.id.to_string(), "rule hypotheses do not hold");
    }
    run_rule(cand, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(k: u64, m: u64, sign: Sign) -> Candidate {
        Candidate::new(k, m, sign).unwrap()
    }

    fn ids(c: &Candidate) -> Vec<(RuleId, usize)> {
        applicable_rules(c).unwrap().into_iter().map(|(r, i)| (r.id, i)).collect()
    }

    #[test]
    fn table_shape() {
        let rules = rule_table();
        assert_eq!(rules.len(), 4);
        let bs: Vec<i64> = rules.iter().map(|r| r.b).collect();
        assert_eq!(bs, vec![3, 5, 5, 8]);
        let counts: Vec<usize> = rules.iter().map(|r| r.branches.len()).collect();
        assert_eq!(counts, vec![4, 6, 12, 4]);
        assert_eq!(rules[0].periods(), (30, 4));
        assert_eq!(rules[1].periods(), (42, 3));
        assert_eq!(rules[2].periods(), (42, 6));
        assert_eq!(rules[3].periods(), (30, 4));
    }

    #[test]
    fn transcribed_rows() {
        let rules = rule_table();
        assert!(rules[0].branches.contains(&branch(&[(10, &[3])], 4, &[0, 3])));
        assert!(rules[2].branches.contains(&branch(&[(42, &[19])], 6, &[0])));
        assert!(rules[3].branches.contains(&branch(&[(6, &[1]), (10, &[3, 9])], 4, &[2])));
    }

    #[test]
    fn every_branch_residue_is_odd() {
        for rule in rule_table() {
            for br in &rule.branches {
                for c in &br.k {
                    assert!(c.residues.iter().all(|r| r % 2 == 1), "{} {:?}", rule.id, c);
                }
            }
        }
    }

    #[test]
    fn dispatch_examples() {
        assert_eq!(ids(&cand(3, 3, Sign::Minus)), vec![(RuleId::T31, 1), (RuleId::T32, 0)]);
        assert_eq!(ids(&cand(5, 4, Sign::Minus)), vec![]);
        assert_eq!(ids(&cand(7, 4, Sign::Plus)), vec![(RuleId::T34, 0)]);
        assert!(matches!(
            applicable_rules(&cand(3, 2, Sign::Minus)),
            Err(RuleError::InvalidCandidate(_))
        ));
    }

    #[test]
    fn class_test_examples() {
        let v = class_test(&cand(3, 4, Sign::Minus));
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::Prime, "T3.1"));
        let v = class_test(&cand(9, 4, Sign::Minus));
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::Composite, "T3.1"));
        let v = class_test(&cand(7, 4, Sign::Plus));
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::Prime, "T3.4"));
        let v = class_test(&cand(5, 4, Sign::Minus));
        assert_eq!(v.outcome, Outcome::NotApplicable);
        let v = class_test(&cand(3, 2, Sign::Minus));
        assert_eq!(v.outcome, Outcome::NotApplicable);
        assert!(v.reason.unwrap().contains("m must exceed 2"));
    }

    #[test]
    fn verified_mode_agrees() {
        let v = class_test_verified(&cand(3, 3, Sign::Minus)).unwrap();
        assert_eq!(v.outcome, Outcome::Prime);
        assert_eq!(v.rule, "T3.1");
    }

    #[test]
    fn rule_test_respects_hypotheses() {
        let rules = rule_table();
        let c = cand(3, 3, Sign::Minus);
        assert_eq!(rule_test(&c, &rules[1]).outcome, Outcome::Prime);
        assert_eq!(rule_test(&c, &rules[1]).rule, "T3.2");
        assert_eq!(rule_test(&c, &rules[2]).outcome, Outcome::NotApplicable);
    }

    #[test]
    fn rules_are_consistent() {
        for rule in rule_table() {
            let report = verify_rule_consistency(rule);
            assert!(report.is_clean(), "{:?}", report.violations);
            assert!(report.classes_checked > 0);
            assert_eq!(report.witnesses_checked, report.classes_checked * 4);
        }
    }

    #[test]
    fn t34_lands_on_17_mod_24() {
        let report = verify_rule_consistency(&rule_table()[3]);
        let (modulus, seen) = &report.observed_residues[&-6];
        assert_eq!(*modulus, 24);
        assert_eq!(seen.iter().copied().collect::<Vec<_>>(), vec![17]);
        let (modulus, seen) = &report.observed_residues[&10];
        assert_eq!(*modulus, 40);
        assert!(seen.iter().all(|r| [17, 33].contains(r)));
    }

    #[test]
    fn single_residue_flip_is_detected() {
        let mut rule = rule_table()[0].clone();
        // k = 1 (mod 10) with m = 2,3 (mod 4) becomes m = 1,3 (mod 4)
        rule.branches[0].m.residues = vec![1, 3];
        let report = verify_rule_consistency(&rule);
        assert!(!report.violations.is_empty());
    }
}
