mod support;

use coarse_core::maps::{
    asymorphism_via_inverse_controls, bornologous_control, classify, closeness_scale,
    coarse_equivalence_via_inverse, PointMap,
};
use coarse_core::{CoarseSpace, GroundSet};
use rand::prelude::*;
use rand::rngs::StdRng;

fn cycle_space(m: usize, scales: &[f64]) -> CoarseSpace {
    let ground = GroundSet::numbered(m);
    let dist: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let d = a.abs_diff(b);
                    d.min(m - d) as f64
                })
                .collect()
        })
        .collect();
    CoarseSpace::from_metric(&ground, &dist, scales).unwrap()
}

fn random_map(x: &CoarseSpace, y: &CoarseSpace, rng: &mut StdRng) -> PointMap {
    let assign = (0..x.ground().len()).map(|_| rng.random_range(0..y.ground().len())).collect();
    PointMap::new(x.ground(), y.ground(), assign).unwrap()
}

fn random_permutation(x: &CoarseSpace, rng: &mut StdRng) -> PointMap {
    let mut assign: Vec<usize> = (0..x.ground().len()).collect();
    assign.shuffle(rng);
    PointMap::new(x.ground(), x.ground(), assign).unwrap()
}

#[test]
fn inverse_control_formulations_agree_with_classification() {
    let mut rng = StdRng::seed_from_u64(61);
    let sizes = [(5, 5), (6, 6), (6, 8), (8, 5)];
    for _ in 0..60 {
        let (mx, my) = sizes[rng.random_range(0..sizes.len())];
        let x = cycle_space(mx, &[1.0, 2.0]);
        let y = cycle_space(my, &[1.0, 3.0]);
        let f = random_map(&x, &y, &mut rng);
        let report = classify(&f, &x, &y).unwrap();
        assert_eq!(
            coarse_equivalence_via_inverse(&f, &x, &y).unwrap(),
            report.is_coarse_equivalence(),
            "the coarse-inverse route must answer exactly like the direct classification"
        );
        assert_eq!(
            asymorphism_via_inverse_controls(&f, &x, &y).unwrap(),
            report.is_asymorphism(),
        );
    }
}

#[test]
fn permutations_on_one_space_classify_via_both_routes() {
    let mut rng = StdRng::seed_from_u64(67);
    for _ in 0..40 {
        let m = rng.random_range(3..=8);
        let x = cycle_space(m, &[1.0, 2.0, 4.0]);
        let f = random_permutation(&x, &mut rng);
        let report = classify(&f, &x, &x).unwrap();
        assert_eq!(asymorphism_via_inverse_controls(&f, &x, &x).unwrap(), report.is_asymorphism());
    }
}

#[test]
fn controls_compose_pointwise() {
    let mut rng = StdRng::seed_from_u64(71);
    for _ in 0..60 {
        let x = cycle_space(rng.random_range(3..=7), &[1.0, 2.0]);
        let y = cycle_space(rng.random_range(3..=7), &[1.0, 2.0, 3.0]);
        let z = cycle_space(rng.random_range(3..=7), &[2.0, 4.0]);
        let f = random_map(&x, &y, &mut rng);
        let g = random_map(&y, &z, &mut rng);
        let rf = bornologous_control(&f, &x, &y).unwrap();
        let rg = bornologous_control(&g, &y, &z).unwrap();
        let rgf = bornologous_control(&f.then(&g).unwrap(), &x, &z).unwrap();
        let (Some(rf), Some(rg), Some(rgf)) = (rf.control(), rg.control(), rgf.control()) else {
            // cycle tops are full, so every map here is controlled
            panic!("expected all three controls");
        };
        for i in 0..rf.len() {
            // composing maps can only tighten the composed control
            assert!(rgf.get(i) <= rg.get(rf.get(i)));
        }
    }
}

#[test]
fn closeness_is_symmetric_and_reflexive() {
    let mut rng = StdRng::seed_from_u64(73);
    for _ in 0..60 {
        let x = cycle_space(rng.random_range(3..=8), &[1.0, 2.0]);
        let y = cycle_space(rng.random_range(3..=8), &[1.0, 2.0, 5.0]);
        let f = random_map(&x, &y, &mut rng);
        let g = random_map(&x, &y, &mut rng);
        assert_eq!(closeness_scale(&f, &g, &y).unwrap(), closeness_scale(&g, &f, &y).unwrap());
        assert_eq!(closeness_scale(&f, &f, &y).unwrap(), Some(0));
    }
}
