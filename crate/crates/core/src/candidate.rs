use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which side of `k*2^m` the candidate sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    /// Canonical scan order: minus before plus.
    pub const ALL: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Sign {
    type Err = CandidateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-" | "minus" | "m" => Ok(Sign::Minus),
            "+" | "plus" | "p" => Ok(Sign::Plus),
            other => Err(CandidateError::BadSign(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CandidateError {
    #[error("k must be odd")]
    EvenK,
    #[error("k must be positive")]
    ZeroK,
    #[error("m must be at least 2")]
    SmallExponent,
    #[error("k must be below 2^m")]
    KTooLarge,
    #[error("sign must be '+' or '-', got {0:?}")]
    BadSign(String),
}

/// A number `N = k*2^m + 1` or `N = k*2^m - 1` with `k` odd and `0 < k < 2^m`.
///
/// `N` itself is materialized once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    k: u64,
    m: u64,
    sign: Sign,
    n: BigUint,
}

impl Candidate {
    pub fn new(k: u64, m: u64, sign: Sign) -> Result<Self, CandidateError> {
        if k == 0 {
            return Err(CandidateError::ZeroK);
        }
        if k % 2 == 0 {
            return Err(CandidateError::EvenK);
        }
        if m < 2 {
            return Err(CandidateError::SmallExponent);
        }
        if m < 64 && k >= 1u64 << m {
            return Err(CandidateError::KTooLarge);
        }
        let shifted = BigUint::from(k) << m;
        let n = match sign {
            Sign::Plus => shifted + 1u32,
            Sign::Minus => shifted - 1u32,
        };
        Ok(Candidate { k, m, sign, n })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The number under test.
    pub fn n(&self) -> &BigUint {
        &self.n
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}{}1", self.k, self.m, self.sign)
    }
}
