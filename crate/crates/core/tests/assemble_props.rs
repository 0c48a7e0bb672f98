mod common;

use common::{mini_data, plans, set_from_mask, with_placeholders};
use iusv_core::assemble::{AssembleConfig, Assembler, UnitUtility};
use iusv_core::{evaluate_plan, minimalize, OwnerSet};
use proptest::prelude::*;
use std::collections::BTreeSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn minimalize_yields_canonical_antichain(masks in prop::collection::vec(1u32..256, 1..12), seed in any::<u64>()) {
        let sets: Vec<OwnerSet> = masks.iter().map(|&m| set_from_mask(8, m)).collect();
        let min = minimalize(sets.clone()).unwrap();
        let out = min.as_slice();
        for (i, a) in out.iter().enumerate() {
            for (j, b) in out.iter().enumerate() {
                if i != j {
                    prop_assert!(!a.is_subset(b).unwrap());
                }
            }
        }
        // every input is covered by some output, and every output is an input
        for s in &sets {
            prop_assert!(out.iter().any(|m| m.is_subset(s).unwrap()));
        }
        for m in out {
            prop_assert!(sets.contains(m));
        }
        prop_assert!(out.windows(2).all(|w| (w[0].len(), &w[0]) < (w[1].len(), &w[1])));
        // order independence
        let mut shuffled = sets;
        let k = shuffled.len();
        shuffled.rotate_left((seed as usize) % k);
        shuffled.reverse();
        prop_assert_eq!(minimalize(shuffled).unwrap(), min);
    }

    #[test]
    fn syntheses_are_sound_complete_and_minimal(d in mini_data(6, 4), which in 0usize..6) {
        let plan = &plans()[which];
        let tables = with_placeholders(&d);
        let asm = Assembler::new(plan, &tables, AssembleConfig::default()).unwrap();
        let full = asm.coalition_set(&UnitUtility).unwrap();
        let values: Vec<_> = full.tuples().iter().map(|t| t.values.clone()).collect();
        let distinct: BTreeSet<_> = values.iter().collect();
        prop_assert_eq!(distinct.len(), values.len());

        let n = asm.owners();
        // t is produced by coalition S iff S contains one of t's syntheses
        for mask in 0u32..1 << n {
            let coalition = set_from_mask(n, mask);
            let produced: BTreeSet<_> = asm.rows_restricted(&coalition).unwrap().into_iter().collect();
            for t in full.tuples() {
                let covered = t.syntheses.iter().any(|s| s.is_subset(&coalition).unwrap());
                prop_assert_eq!(produced.contains(&t.values), covered);
            }
            prop_assert!(produced.iter().all(|v| distinct.contains(v)));
        }
        // minimality: dropping any owner from a synthesis loses the tuple
        for t in full.tuples() {
            for s in t.syntheses.iter() {
                for o in s.iter() {
                    let mut smaller = s.clone();
                    smaller.remove(o);
                    let rows = asm.rows_restricted(&smaller).unwrap();
                    prop_assert!(!rows.contains(&t.values));
                }
            }
        }
        prop_assert_eq!(evaluate_plan(plan, &tables).unwrap(), full);
    }
}
