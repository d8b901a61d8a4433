mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn d_squared_vanishes(a in raw_form_any()) {
        prop_assert!(d_squared(&chart(), &form(&a)));
    }

    #[test]
    fn cartan_formula(x in raw_vector(), a in raw_form_any()) {
        prop_assert!(cartan(&chart(), &vector(&x), &form(&a)));
    }

    #[test]
    fn d_is_an_antiderivation(a in (0usize..=2).prop_flat_map(raw_form), b in (0usize..=2).prop_flat_map(raw_form)) {
        prop_assert!(antiderivation(&chart(), &form(&a), &form(&b)));
    }

    #[test]
    fn wedge_is_graded_commutative(a in raw_form_any(), b in raw_form_any()) {
        prop_assert!(graded_commutative(&chart(), &form(&a), &form(&b)));
    }
}
