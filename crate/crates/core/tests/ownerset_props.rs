mod common;

use common::set_from_mask;
use iusv_core::{Error, OwnerId, OwnerSet, Utility};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn triple() -> impl Strategy<Value = (OwnerSet, OwnerSet, OwnerSet)> {
    (1usize..=20).prop_flat_map(|n| {
        let m = (1u32 << n) - 1;
        (0..=m, 0..=m, 0..=m).prop_map(move |(a, b, c)| (set_from_mask(n, a), set_from_mask(n, b), set_from_mask(n, c)))
    })
}

fn wide() -> impl Strategy<Value = (OwnerSet, OwnerSet)> {
    (65usize..300).prop_flat_map(|n| {
        let ids = prop::collection::vec(0..n as u32, 0..40);
        (ids.clone(), ids).prop_map(move |(a, b)| {
            (
                OwnerSet::from_owners(n, a.into_iter().map(OwnerId)).unwrap(),
                OwnerSet::from_owners(n, b.into_iter().map(OwnerId)).unwrap(),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lattice_laws((a, b, c) in triple()) {
        let u = |x: &OwnerSet, y: &OwnerSet| x.union(y).unwrap();
        let i = |x: &OwnerSet, y: &OwnerSet| x.intersection(y).unwrap();
        prop_assert_eq!(u(&a, &a), a.clone());
        prop_assert_eq!(i(&a, &a), a.clone());
        prop_assert_eq!(u(&a, &b), u(&b, &a));
        prop_assert_eq!(i(&a, &b), i(&b, &a));
        prop_assert_eq!(u(&u(&a, &b), &c), u(&a, &u(&b, &c)));
        prop_assert_eq!(i(&i(&a, &b), &c), i(&a, &i(&b, &c)));
        prop_assert_eq!(u(&a, &i(&a, &b)), a.clone());
        prop_assert_eq!(i(&a, &u(&a, &b)), a.clone());
        prop_assert_eq!(i(&a, &u(&b, &c)), u(&i(&a, &b), &i(&a, &c)));
        prop_assert!(a.is_subset(&u(&a, &b)).unwrap());
        prop_assert!(i(&a, &b).is_subset(&a).unwrap());
        prop_assert_eq!(a.is_subset(&b).unwrap(), u(&a, &b) == b);
    }

    #[test]
    fn cardinality_is_inclusion_exclusion((a, b) in wide()) {
        let n = a.union(&b).unwrap().len() + a.intersection(&b).unwrap().len();
        prop_assert_eq!(n, a.len() + b.len());
        let members: Vec<OwnerId> = a.iter().collect();
        prop_assert!(members.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(members.len(), a.len());
    }

    #[test]
    fn rational_round_trip(an in 0u64..1_000_000, ad in 1u64..10_000, bn in 0u64..1_000_000, bd in 1u64..10_000) {
        let a = Utility::from_ratio(an, ad).unwrap();
        let b = Utility::from_ratio(bn, bd).unwrap();
        let sum = &a + &b;
        prop_assert_eq!(sum.checked_sub(&b).unwrap(), a.clone());
        let text = sum.to_string();
        prop_assert_eq!(text.parse::<Utility>().unwrap(), sum);
    }
}

#[test]
fn mismatched_universes_are_rejected() {
    let a = OwnerSet::new(3);
    let b = OwnerSet::new(4);
    assert!(matches!(a.union(&b), Err(Error::UniverseMismatch { .. })));
    assert!(a.intersection(&b).is_err());
    assert!(a.is_subset(&b).is_err());
}

#[test]
fn negative_utility_is_rejected() {
    let neg = BigRational::new(BigInt::from(-1), BigInt::from(2));
    assert!(matches!(Utility::from_rational(neg), Err(Error::NegativeUtility)));
}

#[test]
fn spec_examples() {
    let s = |l: &[u32]| OwnerSet::from_owners(4, l.iter().copied().map(OwnerId)).unwrap();
    assert_eq!(s(&[1]).union(&s(&[2])).unwrap(), s(&[1, 2]));
    assert!(s(&[1, 2]).is_subset(&s(&[1, 2, 3])).unwrap());
    assert_eq!(s(&[1, 2]).union(&s(&[1, 3])).unwrap().len(), 3);
}
