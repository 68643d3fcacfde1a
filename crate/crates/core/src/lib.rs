//! Deterministic primality certification for numbers `N = k*2^m +- 1`.
//!
//! The engine runs a Lucasian test: pick `(b, c)` whose Jacobi symbols over
//! `N` satisfy the preconditions of the general criterion, seed
//! `x = c^{-k} V_k(b, c^2) mod N`, square-minus-two `m - 2` times, and call
//! `N` prime exactly when the result is zero. Four congruence classes of
//! `(k, m)` come with a fixed `b` and `c = 1`; see [`rules`].
//!
//! ```
//! use lucasian::{class_test, Candidate, Outcome, Sign};
//!
//! let cand = Candidate::new(3, 7, Sign::Minus).unwrap(); // 383
//! let verdict = class_test(&cand);
//! assert_eq!(verdict.outcome, Outcome::Prime);
//! assert_eq!(verdict.rule, "T3.1");
//! ```

pub mod arith;
pub mod candidate;
pub mod lucas;
pub mod modulus;
pub mod oracle;
pub mod residue;
pub mod rules;
pub mod sun;

pub use arith::{decimal_digits, gcd, jacobi, jacobi_i64, mod_inverse, mod_pow, ArithError, JacobiValue};
pub use candidate::{Candidate, CandidateError, Sign};
pub use lucas::{lucas_v_mod, lucas_v_naive, lucas_v_sum, s_iterate, LucasParams, SIterationTrace};
pub use oracle::{
    cross_check, probable_prime, reference_verdict, trial_division, CrossCheckMode, CROSS_CHECK_MAX_M, CrossCheckReport, OracleOutcome,
    OracleVerdict,
};
pub use residue::{jacobi_closed_form, verify_lemma_tables, VerificationReport};
pub use rules::{
    applicable_rules, class_test, class_test_verified, rule_table, rule_test, verify_rule_consistency, Branch, ClassRule,
    Congruence, ConsistencyReport, RuleId,
};
pub use sun::{check_sun_conditions, find_params, sun_seed, sun_test, Outcome, SunParams, Verdict};

// Chapters of the guide in book/ are compiled as doc-tests so their snippets
// cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/jacobi.md")]
    mod jacobi {}
    #[doc = include_str!("../../../book/src/lucas.md")]
    mod lucas {}
    #[doc = include_str!("../../../book/src/criterion.md")]
    mod criterion {}
    #[doc = include_str!("../../../book/src/class-rules.md")]
    mod class_rules {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
