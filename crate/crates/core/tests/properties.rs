use num_traits::One;
use proptest::prelude::*;

use pvcsp_core::format::{
    as_frachom, parse_instance, parse_measure, parse_structure, print_frachom, print_instance, print_measure,
    print_structure,
};
use pvcsp_core::gen::{fpol_triple, frachom_pair, generate, Family};
use pvcsp_core::oracle::brute_force_min;
use pvcsp_core::relax::{blp_only_solve, combined_solve, Verdict};
use pvcsp_core::theory::{check_fractional_homomorphism, check_promise_fpol};
use pvcsp_core::Rational;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structure_and_instance_round_trip(f in family(), seed in any::<u64>(), i in 0u64..1000) {
        let case = generate(f, seed, i).unwrap();
        for s in [&case.template.delta, &case.template.gamma] {
            let text = print_structure(s);
            let back = parse_structure(&text).unwrap();
            prop_assert_eq!(&back, s);
            prop_assert_eq!(print_structure(&back), text);
        }
        let text = print_instance(&case.instance);
        prop_assert_eq!(parse_instance(&text).unwrap(), case.instance);
    }

    #[test]
    fn measure_round_trip(seed in any::<u64>(), i in 0u64..1000) {
        let t = fpol_triple(seed, i).unwrap();
        prop_assert_eq!(&parse_measure(&print_measure(&t.omega)).unwrap(), &t.omega);
        let chi = as_frachom(&parse_measure(&print_frachom(&t.sample_chi)).unwrap()).unwrap();
        prop_assert_eq!(chi, t.sample_chi);
    }

    #[test]
    fn generators_are_pure(f in family(), seed in any::<u64>(), i in 0u64..1000) {
        prop_assert_eq!(generate(f, seed, i).unwrap(), generate(f, seed, i).unwrap());
    }

    #[test]
    fn generated_witnesses_hold(seed in any::<u64>(), i in 0u64..1000) {
        let t = fpol_triple(seed, i).unwrap();
        prop_assert!(check_promise_fpol(&t.omega, &t.template).unwrap().holds);
        let (delta, gamma, chi, _) = frachom_pair(seed, i).unwrap();
        prop_assert!(check_fractional_homomorphism(&chi, &delta, &gamma).unwrap().holds);
    }

    /// A feasible assignment at or below the threshold is never rejected.
    #[test]
    fn combined_is_complete(seed in any::<u64>(), i in 0u64..1000) {
        let case = generate(Family::Random, seed, i).unwrap();
        let min = brute_force_min(&case.template.delta, &case.instance).unwrap();
        let answer = combined_solve(&case.template.delta, &case.instance).unwrap();
        if min.le_rational(case.instance.threshold()) {
            prop_assert_eq!(answer.verdict, Verdict::Yes);
        }
    }

    /// The combined procedure only ever tightens the BLP.
    #[test]
    fn combined_refines_blp(f in family(), seed in any::<u64>(), i in 0u64..1000) {
        let case = generate(f, seed, i).unwrap();
        let combined = combined_solve(&case.template.delta, &case.instance).unwrap();
        let blp = blp_only_solve(&case.template.delta, &case.instance).unwrap();
        if combined.verdict == Verdict::Yes {
            prop_assert_eq!(blp.verdict, Verdict::Yes);
        }
    }

    /// Raising the threshold never turns YES into NO.
    #[test]
    fn verdict_monotone_in_threshold(f in family(), seed in any::<u64>(), i in 0u64..1000) {
        let case = generate(f, seed, i).unwrap();
        let delta = &case.template.delta;
        let u = case.instance.threshold().clone();
        let half = Rational::one() / Rational::from_integer(2.into());
        let mut prev = Verdict::No;
        for k in 0..4 {
            let bumped = case.instance.with_threshold(&u + &half * Rational::from_integer(k.into()));
            let v = combined_solve(delta, &bumped).unwrap().verdict;
            if prev == Verdict::Yes {
                prop_assert_eq!(v, Verdict::Yes);
            }
            prev = v;
        }
    }
}
