mod support;

use coarse_core::maps::PointMap;
use coarse_core::relation::RelationBuilder;
use coarse_core::{GroundSet, Relation};
use proptest::prelude::*;
use rand::prelude::*;
use rand::rngs::StdRng;
use support::*;

#[test]
fn bit_kernels_match_the_naive_oracle() {
    let ground = GroundSet::numbered(6);
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..200 {
        let e = random_relation(&ground, &mut rng, 0.3);
        let f = random_relation(&ground, &mut rng, 0.3);
        let ep = pair_set(&e);
        let fp = pair_set(&f);
        assert_eq!(pair_set(&e.compose(&f).unwrap()), naive_compose(&ep, &fp));
        assert_eq!(pair_set(&e.inverse()), naive_inverse(&ep));
        for m in 0..6 {
            assert_eq!(set_of(&e.ball(m).unwrap()), naive_ball(&ep, m));
        }
        let s = random_subset(&ground, &mut rng);
        assert_eq!(set_of(&e.image(&s).unwrap()), naive_image(&ep, &set_of(&s)));
    }
}

#[test]
fn banded_compose_agrees_with_the_oracle() {
    // the interval fast path must be indistinguishable from the bit kernel
    let mut rng = StdRng::seed_from_u64(17);
    for n in [1usize, 2, 5, 9, 16, 33] {
        let ground = GroundSet::numbered(n);
        for _ in 0..50 {
            let e = random_banded(&ground, &mut rng);
            let f = random_banded(&ground, &mut rng);
            let composed = e.compose(&f).unwrap();
            assert_eq!(pair_set(&composed), naive_compose(&pair_set(&e), &pair_set(&f)));
        }
    }
}

#[test]
fn pull_back_fast_path_agrees_with_the_oracle() {
    // monotone map into a banded relation takes the interval route
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..100 {
        let ns = rng.random_range(1..=8);
        let nt = rng.random_range(1..=8);
        let source = GroundSet::numbered(ns);
        let target = GroundSet::numbered(nt);
        let mut assign: Vec<usize> = (0..ns).map(|_| rng.random_range(0..nt)).collect();
        assign.sort_unstable();
        let f = PointMap::new(&source, &target, assign.clone()).unwrap();
        let banded = random_banded(&target, &mut rng);
        assert_eq!(
            pair_set(&f.pull_back(&banded).unwrap()),
            naive_pull_back(&assign, &pair_set(&banded))
        );
        // and the generic route answers the same question
        let scattered = random_relation(&target, &mut rng, 0.4);
        assert_eq!(
            pair_set(&f.pull_back(&scattered).unwrap()),
            naive_pull_back(&assign, &pair_set(&scattered))
        );
    }
}

fn arb_relation(n: usize) -> impl Strategy<Value = Relation> {
    prop::collection::vec((0..n, 0..n), 0..=n * n).prop_map(move |pairs| {
        Relation::from_pairs(&GroundSet::numbered(n), &pairs).unwrap()
    })
}

fn same_ground(r: &Relation, s: &Relation) -> (Relation, Relation) {
    // rebuild on a shared ground so the algebra accepts the pair
    let ground = r.ground().clone();
    let s2 = Relation::from_pairs(&ground, &s.pairs()).unwrap();
    (r.clone(), s2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn compose_is_associative(e in arb_relation(5), f in arb_relation(5), g in arb_relation(5)) {
        let (e, f) = same_ground(&e, &f);
        let (_, g) = same_ground(&e, &g);
        let left = e.compose(&f).unwrap().compose(&g).unwrap();
        let right = e.compose(&f.compose(&g).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_an_involution_and_antihomomorphism(e in arb_relation(5), f in arb_relation(5)) {
        let (e, f) = same_ground(&e, &f);
        prop_assert_eq!(e.inverse().inverse(), e.clone());
        let lhs = e.compose(&f).unwrap().inverse();
        let rhs = f.inverse().compose(&e.inverse()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diagonal_is_neutral_for_compose(e in arb_relation(6)) {
        let d = Relation::diagonal(e.ground());
        prop_assert_eq!(e.compose(&d).unwrap(), e.clone());
        prop_assert_eq!(d.compose(&e).unwrap(), e);
    }

    #[test]
    fn compose_is_monotone(e in arb_relation(5), f in arb_relation(5), g in arb_relation(5)) {
        let (e, f) = same_ground(&e, &f);
        let (_, g) = same_ground(&e, &g);
        let fg = f.union(&g).unwrap();
        let small = e.compose(&f).unwrap();
        let large = e.compose(&fg).unwrap();
        prop_assert!(small.is_subset_of(&large).unwrap());
    }

    #[test]
    fn image_distributes_over_union_of_rows(e in arb_relation(6), f in arb_relation(6)) {
        let (e, f) = same_ground(&e, &f);
        let full = coarse_core::PointSet::full(e.ground());
        let lhs = e.union(&f).unwrap().image(&full).unwrap();
        let rhs = e.image(&full).unwrap().union(&f.image(&full).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ball_is_the_image_of_a_singleton(e in arb_relation(6), m in 0usize..6) {
        let mut single = coarse_core::PointSet::empty(e.ground());
        single.insert(m).unwrap();
        prop_assert_eq!(e.ball(m).unwrap(), e.image(&single).unwrap());
    }
}

#[test]
fn builder_row_ranges_match_single_inserts() {
    let ground = GroundSet::numbered(9);
    let mut by_range = RelationBuilder::new(&ground);
    let mut by_point = RelationBuilder::new(&ground);
    let mut rng = StdRng::seed_from_u64(3);
    for a in 0..9 {
        let lo = rng.random_range(0..=a);
        let hi = rng.random_range(a..9);
        by_range.insert_row_range(a, lo, hi).unwrap();
        for b in lo..=hi {
            by_point.insert(a, b).unwrap();
        }
    }
    assert_eq!(by_range.build(), by_point.build());
}
