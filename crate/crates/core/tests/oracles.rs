//! Exact search checked against exhaustive enumeration of every relation.

use proptest::prelude::*;
use rsumset::search::{feasible, forced_pairs, min_restricted_sumset, DEFAULT_BUDGET};
use rsumset::{restricted_sumset, AdditiveSet, IntegerSet, Relation, RelationConstraint, ResidueSet};

const CONSTRAINTS: [RelationConstraint; 5] = [
    RelationConstraint::DegreeOnB(1),
    RelationConstraint::DegreeOnB(2),
    RelationConstraint::DegreeBoth(1),
    RelationConstraint::DegreeBoth(2),
    RelationConstraint::FunctionBtoA,
];

/// Minimum of `|A +_R B|` over every admissible `R` subset of `A x B`.
fn brute_min<S: AdditiveSet>(a: &S, b: &S, c: RelationConstraint) -> usize {
    let pairs: Vec<(i64, i64)> = a
        .elements()
        .into_iter()
        .flat_map(|x| b.elements().into_iter().map(move |y| (x, y)))
        .collect();
    assert!(pairs.len() <= 16);
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let r = Relation::new((0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]));
            c.admits(&r).then(|| restricted_sumset(a, b, &r).unwrap().len())
        })
        .min()
        .unwrap()
}

fn small_ints() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-6i64..7, 1..=4).prop_map(|s| s.into_iter().collect())
}

fn small_residues() -> impl Strategy<Value = (u64, Vec<i64>, Vec<i64>)> {
    prop::sample::select(vec![5u64, 7, 11, 13]).prop_flat_map(|p| {
        let set = prop::collection::btree_set(0..p as i64, 1..=4).prop_map(|s| s.into_iter().collect::<Vec<_>>());
        (Just(p), set.clone(), set)
    })
}

fn check_against_brute<S: AdditiveSet>(a: &S, b: &S) {
    for c in CONSTRAINTS {
        let res = min_restricted_sumset(a, b, c, DEFAULT_BUDGET).unwrap();
        assert!(res.optimal);
        assert_eq!(res.min_value, brute_min(a, b, c), "{a:?} {b:?} {c:?}");
        assert!(c.admits(&res.witness_r));
        assert_eq!(restricted_sumset(a, b, &res.witness_r).unwrap().len(), res.min_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn integer_search_matches_enumeration(a in small_ints(), b in small_ints()) {
        check_against_brute(&IntegerSet::new(a), &IntegerSet::new(b));
    }

    #[test]
    fn residue_search_matches_enumeration((p, a, b) in small_residues()) {
        let a = ResidueSet::from_elements(p, a).unwrap();
        let b = ResidueSet::from_elements(p, b).unwrap();
        check_against_brute(&a, &b);
    }

    #[test]
    fn matching_search_matches_enumeration((p, a, b) in small_residues()) {
        let a = ResidueSet::from_elements(p, a).unwrap();
        let b = ResidueSet::from_elements(p, b).unwrap();
        let c = RelationConstraint::MatchingBtoA;
        let res = min_restricted_sumset(&a, &b, c, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(res.min_value, brute_min(&a, &b, c));
        prop_assert_eq!(res.total, b.len() <= a.len());
        prop_assert!(c.admits(&res.witness_r));
    }

    #[test]
    fn feasibility_is_downward_closed((p, a, b) in small_residues(), mask in 0u32..1 << 13, d in 1usize..3) {
        let a = ResidueSet::from_elements(p, a).unwrap();
        let b = ResidueSet::from_elements(p, b).unwrap();
        let sums = a.sumset_raw(&b);
        let f: Vec<i64> = sums.iter().filter(|&i| mask >> i & 1 == 1).collect();
        let c = RelationConstraint::DegreeBoth(d);
        let fs = a.with_elements(f.clone());
        if feasible(&a, &b, &fs, c).unwrap() {
            for drop in &f {
                let smaller = a.with_elements(f.iter().copied().filter(|x| x != drop));
                prop_assert!(feasible(&a, &b, &smaller, c).unwrap());
            }
        }
        // Every forced pair sums into F.
        for (x, y) in forced_pairs(&a, &b, &fs).unwrap().iter() {
            prop_assert!(fs.contains(a.add(x, y)));
        }
    }

    #[test]
    fn minimum_is_translation_invariant(a in small_ints(), b in small_ints(), x in -9i64..10, y in -9i64..10) {
        let a = IntegerSet::new(a);
        let b = IntegerSet::new(b);
        let c = RelationConstraint::DegreeOnB(1);
        let base = min_restricted_sumset(&a, &b, c, DEFAULT_BUDGET).unwrap().min_value;
        let moved = min_restricted_sumset(&a.translate(x), &b.translate(y), c, DEFAULT_BUDGET).unwrap().min_value;
        prop_assert_eq!(base, moved);
        let swapped = min_restricted_sumset(&b, &a, RelationConstraint::DegreeBoth(1), DEFAULT_BUDGET).unwrap().min_value;
        let direct = min_restricted_sumset(&a, &b, RelationConstraint::DegreeBoth(1), DEFAULT_BUDGET).unwrap().min_value;
        prop_assert_eq!(swapped, direct);
    }
}
