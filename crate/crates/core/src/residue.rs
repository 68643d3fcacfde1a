//! Closed-form Jacobi symbol tables for the eight small numerators the
//! class tests rely on: -1, 2, 3, 5, -3, 7, -6 and 10.
//!
//! Each table is data: a modulus and three residue sets (symbol +1, 0, -1).
//! Four of the numerators split on `n mod 4` first, giving two cases. A
//! lookup reduces `n` by the table modulus and finds the set containing it.
//! Keeping the tables as data lets [`ResidueTable::check_partition`] assert
//! that every residue of an odd `n` lands in exactly one set, and lets
//! [`verify_lemma_tables`] compare them against the generic algorithm.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::arith::{jacobi, ArithError, JacobiValue};

/// Numerators with a closed-form table.
pub const SUPPORTED_NUMERATORS: [i64; 8] = [-1, 2, 3, 5, -3, 7, -6, 10];

/// One case of a table: applies when `n mod 4` equals `n_mod_4` (or always,
/// when `None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueCase {
    pub n_mod_4: Option<u64>,
    pub modulus: u64,
    pub plus_one: &'static [u64],
    pub zero: &'static [u64],
    pub minus_one: &'static [u64],
}

impl ResidueCase {
    fn lookup(&self, residue: u64) -> Option<JacobiValue> {
        if self.plus_one.contains(&residue) {
            Some(JacobiValue::One)
        } else if self.zero.contains(&residue) {
            Some(JacobiValue::Zero)
        } else if self.minus_one.contains(&residue) {
            Some(JacobiValue::MinusOne)
        } else {
            None
        }
    }

    fn applies_to(&self, n_mod_4: u64) -> bool {
        self.n_mod_4.is_none_or(|r| r == n_mod_4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueTable {
    pub numerator: i64,
    pub cases: &'static [ResidueCase],
}

impl ResidueTable {
    /// Checks that, within every case, the three residue sets partition the
    /// residues an odd `n` can take modulo the table modulus.
    pub fn check_partition(&self) -> Result<(), String> {
        for case in self.cases {
            let m = case.modulus;
            let attainable: Vec<u64> = (0..m).filter(|r| m % 2 == 1 || r % 2 == 1).collect();
            let mut seen = vec![0u32; m as usize];
            for &r in case.plus_one.iter().chain(case.zero).chain(case.minus_one) {
                if r >= m {
                    return Err(format!("({}/n): residue {r} out of range mod {m}", self.numerator));
                }
                seen[r as usize] += 1;
            }
            for r in 0..m {
                let expected = u32::from(attainable.contains(&r));
                if seen[r as usize] != expected {
                    return Err(format!(
                        "({}/n): residue {r} mod {m} appears {} times, expected {expected}",
                        self.numerator, seen[r as usize]
                    ));
                }
            }
        }
        Ok(())
    }

    fn evaluate(&self, n_mod_4: u64, residue_of: impl Fn(u64) -> u64) -> JacobiValue {
        let case = self
            .cases
            .iter()
            .find(|c| c.applies_to(n_mod_4))
            .expect("tables cover both odd classes mod 4");
        case.lookup(residue_of(case.modulus))
            .expect("tables partition the odd residues")
    }
}

macro_rules! case {
    ($mod4:expr, $m:expr, [$($p:expr),*], [$($z:expr),*], [$($n:expr),*]) => {
        ResidueCase {
            n_mod_4: $mod4,
            modulus: $m,
            plus_one: &[$($p),*],
            zero: &[$($z),*],
            minus_one: &[$($n),*],
        }
    };
}

static TABLES: [ResidueTable; 8] = [
    ResidueTable {
        numerator: -1,
        cases: &[case!(None, 4, [1], [], [3])],
    },
    ResidueTable {
        numerator: 2,
        cases: &[case!(None, 8, [1, 7], [], [3, 5])],
    },
    ResidueTable {
        numerator: 3,
        cases: &[
            case!(Some(1), 3, [1], [0], [2]),
            case!(Some(3), 3, [2], [0], [1]),
        ],
    },
    ResidueTable {
        numerator: 5,
        cases: &[case!(None, 5, [1, 4], [0], [2, 3])],
    },
    ResidueTable {
        numerator: -3,
        cases: &[
            case!(Some(1), 12, [1, 11], [3, 9], [5, 7]),
            case!(Some(3), 12, [5, 7], [3, 9], [1, 11]),
        ],
    },
    ResidueTable {
        numerator: 7,
        cases: &[
            case!(Some(1), 7, [1, 2, 4], [0], [3, 5, 6]),
            case!(Some(3), 7, [3, 5, 6], [0], [1, 2, 4]),
        ],
    },
    ResidueTable {
        numerator: -6,
        cases: &[
            case!(Some(1), 24, [1, 5, 19, 23], [3, 9, 15, 21], [7, 11, 13, 17]),
            case!(Some(3), 24, [7, 11, 13, 17], [3, 9, 15, 21], [1, 5, 19, 23]),
        ],
    },
    ResidueTable {
        numerator: 10,
        cases: &[case!(
            None,
            40,
            [1, 3, 9, 13, 27, 31, 37, 39],
            [5, 15, 25, 35],
            [7, 11, 17, 19, 21, 23, 29, 33]
        )],
    },
];

/// All eight tables, in the order of [`SUPPORTED_NUMERATORS`].
pub fn residue_tables() -> &'static [ResidueTable] {
    &TABLES
}

/// The table for `numerator`, if it is one of the supported eight.
pub fn residue_table(numerator: i64) -> Option<&'static ResidueTable> {
    TABLES.iter().find(|t| t.numerator == numerator)
}

fn unsupported(a: i64) -> ArithError {
    ArithError::InvalidArgument(format!(
        "no closed-form table for numerator {a}; supported: {SUPPORTED_NUMERATORS:?}"
    ))
}

/// `(a/n)` read off the closed-form table for `a`.
pub fn jacobi_closed_form(a: i64, n: &BigUint) -> Result<JacobiValue, ArithError> {
    let table = residue_table(a).ok_or_else(|| unsupported(a))?;
    if n.is_even() || n.bits() == 0 {
        return Err(ArithError::InvalidArgument(format!(
            "n must be odd and positive, got {n}"
        )));
    }
    if n.is_one() {
        return Ok(JacobiValue::One);
    }
    let small = |m: u64| (n % m).to_u64().expect("residue below table modulus");
    Ok(table.evaluate(small(4), small))
}

/// Machine-word form of [`jacobi_closed_form`].
pub fn jacobi_closed_form_u64(a: i64, n: u64) -> Result<JacobiValue, ArithError> {
    let table = residue_table(a).ok_or_else(|| unsupported(a))?;
    if n == 0 || n % 2 == 0 {
        return Err(ArithError::InvalidArgument(format!(
            "n must be odd and positive, got {n}"
        )));
    }
    if n == 1 {
        return Ok(JacobiValue::One);
    }
    Ok(table.evaluate(n % 4, |m| n % m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaMismatch {
    pub numerator: i64,
    pub n: u64,
    /// The generic algorithm's value.
    pub expected: JacobiValue,
    /// The table's value.
    pub got: JacobiValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub limit: u64,
    pub numerators: Vec<i64>,
    pub odd_n_checked: u64,
    pub comparisons: u64,
    pub mismatches: Vec<LemmaMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares every table against the generic Jacobi algorithm for all odd
/// `n <= limit`.
pub fn verify_lemma_tables(limit: u64) -> VerificationReport {
    let mut mismatches = Vec::new();
    let mut odd_n_checked = 0;
    for n in (1..=limit).step_by(2) {
        odd_n_checked += 1;
        let n_big = BigUint::from(n);
        for &a in &SUPPORTED_NUMERATORS {
            let expected = jacobi(&BigInt::from(a), &n_big).expect("odd modulus");
            let got = jacobi_closed_form_u64(a, n).expect("supported numerator, odd n");
            if expected != got {
                mismatches.push(LemmaMismatch {
                    numerator: a,
                    n,
                    expected,
                    got,
                });
            }
        }
    }
    let largest = TABLES
        .iter()
        .flat_map(|t| t.cases.iter().map(|c| c.modulus))
        .fold(4, |acc: u64, m| acc.lcm(&m));
    let note = (limit < largest).then(|| {
        format!("limit {limit} is below {largest}, so not every table residue class is covered")
    });
    VerificationReport {
        limit,
        numerators: SUPPORTED_NUMERATORS.to_vec(),
        odd_n_checked,
        comparisons: odd_n_checked * SUPPORTED_NUMERATORS.len() as u64,
        mismatches,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(a: i64, n: u64) -> i8 {
        jacobi_closed_form_u64(a, n).unwrap().as_i8()
    }

    #[test]
    fn table_examples() {
        assert_eq!(cf(2, 7), 1);
        assert_eq!(cf(-1, 13), 1);
        assert_eq!(cf(7, 9), 1);
        assert_eq!(cf(-6, 25), 1);
        assert_eq!(cf(5, 23), -1);
        assert_eq!(cf(10, 21), -1);
    }

    #[test]
    fn tables_partition_odd_residues() {
        for table in residue_tables() {
            table.check_partition().unwrap();
        }
    }

    #[test]
    fn table_moduli() {
        let moduli: Vec<u64> = residue_tables().iter().map(|t| t.cases[0].modulus).collect();
        assert_eq!(moduli, vec![4, 8, 3, 5, 12, 7, 24, 40]);
    }

    #[test]
    fn broken_partition_is_reported() {
        static BAD: ResidueTable = ResidueTable {
            numerator: 2,
            cases: &[case!(None, 8, [1, 7], [], [3])],
        };
        assert!(BAD.check_partition().is_err());
        static DOUBLE: ResidueTable = ResidueTable {
            numerator: 2,
            cases: &[case!(None, 8, [1, 7, 3], [], [3, 5])],
        };
        assert!(DOUBLE.check_partition().is_err());
    }

    #[test]
    fn n_equal_one_is_plus_one() {
        for a in SUPPORTED_NUMERATORS {
            assert_eq!(cf(a, 1), 1);
            assert_eq!(jacobi_closed_form(a, &BigUint::one()).unwrap(), JacobiValue::One);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(jacobi_closed_form_u64(11, 7).is_err());
        assert!(jacobi_closed_form_u64(2, 8).is_err());
        assert!(jacobi_closed_form(-6, &BigUint::from(10u32)).is_err());
        assert!(jacobi_closed_form(4, &BigUint::from(9u32)).is_err());
    }

    #[test]
    fn big_and_small_forms_agree() {
        for n in (1..2000u64).step_by(2) {
            for a in SUPPORTED_NUMERATORS {
                assert_eq!(
                    jacobi_closed_form(a, &BigUint::from(n)).unwrap(),
                    jacobi_closed_form_u64(a, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn small_limits() {
        let r = verify_lemma_tables(3);
        assert!(r.is_clean());
        assert_eq!(r.odd_n_checked, 2);
        assert_eq!(r.comparisons, 16);
        assert!(r.note.is_some());

        let r = verify_lemma_tables(2);
        assert!(r.is_clean());
        assert_eq!(r.comparisons, 8);
        assert!(r.note.is_some());

        let r = verify_lemma_tables(839);
        assert!(r.is_clean());
        assert!(r.note.is_some());
        let r = verify_lemma_tables(840);
        assert!(r.is_clean());
        assert!(r.note.is_none());
    }

    #[test]
    fn one_full_period_of_mod_40() {
        let r = verify_lemma_tables(40);
        assert!(r.is_clean());
        assert_eq!(r.odd_n_checked, 20);
    }

    #[test]
    fn zero_exactly_when_sharing_a_factor() {
        for n in (1..5000u64).step_by(2) {
            for a in SUPPORTED_NUMERATORS {
                let shares = a.unsigned_abs().gcd(&n) > 1;
                assert_eq!(cf(a, n) == 0, shares, "({a}/{n})");
            }
        }
    }
}
