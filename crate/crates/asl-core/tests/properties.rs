mod strategies;

use asl_core::match_atom;
use asl_core::syntax::match_term;
use proptest::prelude::*;
use strategies::*;

proptest! {
    #[test]
    fn matching_is_sound(p in open_term(), sigma in ground_subst()) {
        let subject = sigma.apply(&p);
        let tau = match_term(&p, &subject).expect("an instance matches its pattern");
        prop_assert_eq!(tau.apply(&p), subject);
        let mut vars = Vec::new();
        p.collect_vars(&mut vars);
        for x in vars {
            prop_assert_eq!(tau.get(&x), sigma.get(&x));
        }
    }

    #[test]
    fn matching_answers_are_instances(p in atom_of(open_term()), s in atom_of(ground_term())) {
        if let Some(tau) = match_atom(&p, &s) {
            prop_assert_eq!(tau.apply(&p), s);
        }
    }

    #[test]
    fn composition_applies_right_then_left(t in open_term(), a in ground_subst(), b in open_subst()) {
        prop_assert_eq!(a.compose(&b).apply(&t), a.apply(&b.apply(&t)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn anti_unification_laws((a, b) in atom_pair()) {
        strategies::anti_unification_laws(&a, &b)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn big_step_agrees_with_small_step((p, goal) in resolution_case()) {
        strategies::big_step_agrees_with_small_step(&p, &goal)?;
    }
}
