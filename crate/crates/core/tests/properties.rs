use lucasian::lucas::s_iterate_with;
use lucasian::modulus::{GenericModulus, SpecialFormModulus};
use lucasian::residue::jacobi_closed_form_u64;
use lucasian::{
    applicable_rules, check_sun_conditions, class_test, class_test_verified, jacobi, jacobi_i64, lucas_v_mod,
    lucas_v_naive, lucas_v_sum, probable_prime, reference_verdict, s_iterate, sun_test, trial_division, Candidate,
    JacobiValue, LucasParams, OracleOutcome, Outcome, Sign, SunParams,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use proptest::prelude::*;

const NUMERATORS: [i64; 8] = [-1, 2, 3, 5, -3, 7, -6, 10];

fn odd(n: u64) -> u64 {
    n | 1
}

fn reduce(v: &BigInt, n: u64) -> BigUint {
    v.mod_floor(&BigInt::from(n)).to_biguint().unwrap()
}

fn oracle_prime(n: &BigUint) -> bool {
    !reference_verdict(n).is_composite()
}

proptest! {
    #[test]
    fn jacobi_multiplicative_in_numerator(a in -10_000i64..10_000, b in -10_000i64..10_000, n in 1u64..1_000_000) {
        let n = odd(n);
        prop_assert_eq!(jacobi_i64(a * b, n).unwrap(), jacobi_i64(a, n).unwrap() * jacobi_i64(b, n).unwrap());
    }

    #[test]
    fn jacobi_multiplicative_in_denominator(a in -10_000i64..10_000, m in 1u64..100_000, n in 1u64..100_000) {
        let (m, n) = (odd(m), odd(n));
        prop_assert_eq!(jacobi_i64(a, m * n).unwrap(), jacobi_i64(a, m).unwrap() * jacobi_i64(a, n).unwrap());
    }

    #[test]
    fn jacobi_periodic_and_bigint_agrees(a in -1_000_000i64..1_000_000, n in 1u64..u64::MAX / 4) {
        let n = odd(n);
        let small = jacobi_i64(a, n).unwrap();
        prop_assert_eq!(jacobi_i64(a + n as i64, n).unwrap(), small);
        prop_assert_eq!(jacobi(&BigInt::from(a), &BigUint::from(n)).unwrap(), small);
        prop_assert_eq!(small == JacobiValue::Zero, a.unsigned_abs().gcd(&n) != 1);
    }

    #[test]
    fn closed_forms_match_far_beyond_tables(n in 1u64..u64::MAX / 2) {
        let n = odd(n);
        for a in NUMERATORS {
            prop_assert_eq!(jacobi_closed_form_u64(a, n).unwrap(), jacobi_i64(a, n).unwrap());
        }
    }

    #[test]
    fn lucas_triple(p in -20i64..=20, n in 0u64..=200, modulus in 1u64..500_000) {
        let modulus = 2 * modulus + 1;
        let params = LucasParams::new(p, 1);
        let fast = lucas_v_mod(&params, &BigUint::from(n), &BigUint::from(modulus)).unwrap();
        prop_assert_eq!(&fast, &reduce(&lucas_v_naive(&params, n), modulus));
        prop_assert_eq!(&fast, &reduce(&lucas_v_sum(&params, n), modulus));
    }

    #[test]
    fn lucas_general_q(p in -20i64..=20, q in -20i64..=20, n in 0u64..=120, modulus in 1u64..500_000) {
        let modulus = 2 * modulus + 1;
        let params = LucasParams::new(p, q);
        let fast = lucas_v_mod(&params, &BigUint::from(n), &BigUint::from(modulus)).unwrap();
        prop_assert_eq!(&fast, &reduce(&lucas_v_naive(&params, n), modulus));
        prop_assert_eq!(&fast, &reduce(&lucas_v_sum(&params, n), modulus));
    }

    #[test]
    fn doubling_bridge(b in prop::sample::select(vec![3i64, 5, 8]), k in 1u64..=25, j in 0u64..=10, n in 1u64..u64::MAX / 2) {
        let n = BigUint::from(odd(n).max(3));
        let params = LucasParams::new(b, 1);
        let seed = lucas_v_mod(&params, &BigUint::from(k), &n).unwrap();
        let iterated = s_iterate(&seed, j, &n).unwrap().final_residue;
        let direct = lucas_v_mod(&params, &BigUint::from(k << j), &n).unwrap();
        prop_assert_eq!(iterated, direct);
    }

    #[test]
    fn special_form_kernel_matches_generic(k in 0u64..4_000, m in 13u64..200, plus in any::<bool>(), x in any::<u128>()) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let cand = Candidate::new(2 * k + 1, m, sign).unwrap();
        let x = BigUint::from(x) % cand.n();
        let special = s_iterate_with(&x, 40, &SpecialFormModulus::for_candidate(&cand)).unwrap();
        let generic = s_iterate_with(&x, 40, &GenericModulus::new(cand.n().clone())).unwrap();
        prop_assert_eq!(special, generic);
    }

    #[test]
    fn oracles_agree(n in 2u64..1_000_000_000_000) {
        let n = BigUint::from(n);
        let exact = trial_division(&n).unwrap().is_composite();
        prop_assert_eq!(probable_prime(&n, 16).is_composite(), exact);
    }
}

#[test]
fn oracles_agree_below_one_million() {
    for n in 2u64..1_000_000 {
        let n = BigUint::from(n);
        assert_eq!(
            trial_division(&n).unwrap().is_composite(),
            probable_prime(&n, 1).is_composite(),
            "{n}"
        );
    }
}

/// Whenever `(b, c)` satisfies the preconditions, the verdict is the truth,
/// whichever pair was chosen.
#[test]
fn sun_verdict_is_independent_of_params() {
    let mut exercised = 0;
    for m in 2..=12u64 {
        for k in (1..(1u64 << m)).step_by(2) {
            for sign in Sign::ALL {
                let cand = Candidate::new(k, m, sign).unwrap();
                let truth = oracle_prime(cand.n());
                for c in 1..=3i64 {
                    for b in 1..=12i64 {
                        let params = SunParams::new(b, c);
                        if 2 * c == b || !check_sun_conditions(&cand, params).satisfied {
                            continue;
                        }
                        exercised += 1;
                        let v = sun_test(&cand, params);
                        assert_eq!(v.is_prime(), truth, "{cand} with {params}: {:?}", v.outcome);
                    }
                }
            }
        }
    }
    assert!(exercised > 10_000, "{exercised}");
}

#[test]
fn class_test_is_sun_test_with_rule_b() {
    for m in 3..=14u64 {
        for k in (1..(1u64 << m)).step_by(2) {
            for sign in Sign::ALL {
                let cand = Candidate::new(k, m, sign).unwrap();
                let rules = applicable_rules(&cand).unwrap();
                let verdict = class_test(&cand);
                match rules.first() {
                    None => assert_eq!(verdict.outcome, Outcome::NotApplicable),
                    Some((rule, _)) => {
                        assert_eq!(verdict.rule, rule.id.to_string());
                        let direct = sun_test(&cand, SunParams::new(rule.b, 1));
                        assert_eq!(verdict.outcome, direct.outcome, "{cand}");
                        assert_eq!(verdict.trace, direct.trace);
                    }
                }
            }
        }
    }
}

#[test]
fn overlapping_rules_agree() {
    let mut overlaps = 0;
    for m in 3..=16u64 {
        for k in (1..(1u64 << m.min(12))).step_by(2) {
            for sign in Sign::ALL {
                let cand = Candidate::new(k, m, sign).unwrap();
                if applicable_rules(&cand).unwrap().len() > 1 {
                    overlaps += 1;
                }
                let v = class_test_verified(&cand).unwrap_or_else(|e| panic!("{e}"));
                if v.outcome != Outcome::NotApplicable {
                    let oracle = reference_verdict(cand.n()).outcome;
                    let oracle_prime = matches!(oracle, OracleOutcome::Prime | OracleOutcome::ProbablePrime);
                    assert_eq!(v.is_prime(), oracle_prime, "{cand}");
                }
            }
        }
    }
    assert!(overlaps > 0);
}
