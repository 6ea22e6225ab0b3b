//! The hyperspace of a coarse space: all subsets of the ground set, related
//! at scale `i` when each subset sits inside the scale-`i` image of the
//! other. The empty set only relates to itself.
//!
//! Subsets are indexed by bitmask, so the construction is capped: a ground
//! set of `m` points lifts to `2^m` subsets. Lifted chains are valid by
//! construction: the diagonal survives because base chains contain it,
//! the defining condition is symmetric, monotonicity is inherited, and the
//! lifted top stays closed because `T* o T*` lands inside `(T o T)* = T*`.

use crate::dynamics::{Cds, Conjugacy};
use crate::error::{CoarseError, Result};
use crate::maps::{classify, MapReport, PointMap};
use crate::relation::{GroundSet, Relation, RelationBuilder};
use crate::space::{CoarseSpace, Provenance};

/// Largest base ground set the subset construction accepts by default.
pub const DEFAULT_HYPER_CAP: usize = 12;

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(CoarseError::HyperCapExceeded { size, cap });
    }
    Ok(())
}

/// The ground set of all subsets of `base`, in mask order: the empty set
/// first, labelled `{}`, then `{a}`, `{b}`, `{a,b}`, ...
pub fn hyper_ground(base: &GroundSet, cap: usize) -> Result<GroundSet> {
    check_cap(base.len(), cap)?;
    let m = base.len();
    let labels: Vec<String> = (0..1usize << m)
        .map(|mask| {
            let mut parts = Vec::new();
            let mut rest = mask;
            while rest != 0 {
                let p = rest.trailing_zeros() as usize;
                parts.push(base.label(p));
                rest &= rest - 1;
            }
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    GroundSet::new(labels)
}

/// Per-mask image masks of a base relation: entry `K` is the union of the
/// balls of the points of `K`.
fn image_masks(e: &Relation) -> Vec<usize> {
    let m = e.ground().len();
    let mut row = vec![0usize; m];
    e.for_each_pair(|a, b| row[a] |= 1 << b);
    let mut images = vec![0usize; 1 << m];
    for mask in 1..1usize << m {
        let low = mask & mask.wrapping_neg();
        images[mask] = images[mask ^ low] | row[low.trailing_zeros() as usize];
    }
    images
}

fn exp_entourage_on(hyper: &GroundSet, e: &Relation) -> Relation {
    let images = image_masks(e);
    let mut b = RelationBuilder::new(hyper);
    for l in 0..images.len() {
        let im = images[l];
        // Enumerate candidates K <= image of L, keeping those whose image
        // swallows L in return.
        let mut k = im;
        loop {
            if l & !images[k] == 0 {
                b.insert(l, k).expect("masks index the hyper ground");
            }
            if k == 0 {
                break;
            }
            k = (k - 1) & im;
        }
    }
    b.build()
}

/// The lifted entourage on the subset ground of `e`'s base.
pub fn exp_entourage(e: &Relation, cap: usize) -> Result<Relation> {
    let hyper = hyper_ground(e.ground(), cap)?;
    Ok(exp_entourage_on(&hyper, e))
}

/// The subset space: every chain element lifted over the same subset ground.
pub fn exp_space(space: &CoarseSpace, cap: usize) -> Result<CoarseSpace> {
    let hyper = hyper_ground(space.ground(), cap)?;
    let chain: Vec<Relation> = space
        .chain()
        .iter()
        .map(|e| exp_entourage_on(&hyper, e))
        .collect();
    CoarseSpace::from_chain_unvalidated(chain, Provenance::Derived)
}

fn exp_map_on(f: &PointMap, hyper_source: &GroundSet, hyper_target: &GroundSet) -> PointMap {
    let ms = f.source().len();
    let mut assign = vec![0usize; 1 << ms];
    for mask in 1..1usize << ms {
        let low = mask & mask.wrapping_neg();
        assign[mask] = assign[mask ^ low] | 1 << f.apply(low.trailing_zeros() as usize);
    }
    PointMap::new(hyper_source, hyper_target, assign).expect("image masks index the hyper ground")
}

/// The direct-image map on subsets: `K` goes to `f(K)`.
pub fn exp_map(f: &PointMap, cap: usize) -> Result<PointMap> {
    let hs = hyper_ground(f.source(), cap)?;
    let ht = hyper_ground(f.target(), cap)?;
    Ok(exp_map_on(f, &hs, &ht))
}

/// A map classified twice: between the base spaces and between their subset
/// spaces. The classifications agree property by property.
#[derive(Clone, Debug)]
pub struct ExpPreservation {
    pub base: MapReport,
    pub lifted: MapReport,
}

impl ExpPreservation {
    pub fn bornologous_agrees(&self) -> bool {
        self.base.is_bornologous() == self.lifted.is_bornologous()
    }

    pub fn effectively_proper_agrees(&self) -> bool {
        self.base.is_effectively_proper() == self.lifted.is_effectively_proper()
    }

    pub fn asymorphism_agrees(&self) -> bool {
        self.base.is_asymorphism() == self.lifted.is_asymorphism()
    }

    pub fn coarse_equivalence_agrees(&self) -> bool {
        self.base.is_coarse_equivalence() == self.lifted.is_coarse_equivalence()
    }

    pub fn all_agree(&self) -> bool {
        self.bornologous_agrees()
            && self.effectively_proper_agrees()
            && self.asymorphism_agrees()
            && self.coarse_equivalence_agrees()
    }
}

/// Classifies `f` between `x` and `y`, lifts everything to subsets, and
/// classifies again.
pub fn exp_preservation(
    f: &PointMap,
    x: &CoarseSpace,
    y: &CoarseSpace,
    cap: usize,
) -> Result<ExpPreservation> {
    let base = classify(f, x, y)?;
    let hx = exp_space(x, cap)?;
    let hy = exp_space(y, cap)?;
    let lifted_map = exp_map_on(f, hx.ground(), hy.ground());
    let lifted = classify(&lifted_map, &hx, &hy)?;
    Ok(ExpPreservation { base, lifted })
}

/// Lifts a whole system to its subset space: same time group, evolutions act
/// by direct image.
pub fn lift_cds(cds: &Cds, cap: usize) -> Result<Cds> {
    let space = exp_space(cds.space(), cap)?;
    let evolution = cds
        .evolution()
        .iter()
        .map(|map| exp_map_on(map, space.ground(), space.ground()))
        .collect();
    Cds::new(space, cds.time().clone(), evolution)
}

/// Lifts a conjugacy alongside `lift_cds`: the space map becomes its direct
/// image, the time map is untouched.
pub fn lift_conjugacy(c: &Conjugacy, cap: usize) -> Result<Conjugacy> {
    Ok(Conjugacy { space_map: exp_map(&c.space_map, cap)?, time_map: c.time_map.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::check_conjugacy;

    fn path_space(n: usize, scales: &[f64]) -> CoarseSpace {
        let ground = GroundSet::numbered(n);
        let dist: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| (a as f64 - b as f64).abs()).collect())
            .collect();
        CoarseSpace::from_metric(&ground, &dist, scales).unwrap()
    }

    #[test]
    fn hyper_ground_orders_subsets_by_mask() {
        let base = GroundSet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let hyper = hyper_ground(&base, DEFAULT_HYPER_CAP).unwrap();
        assert_eq!(hyper.len(), 8);
        assert_eq!(hyper.label(0), "{}");
        assert_eq!(hyper.label(1), "{a}");
        assert_eq!(hyper.label(2), "{b}");
        assert_eq!(hyper.label(3), "{a,b}");
        assert_eq!(hyper.label(7), "{a,b,c}");
    }

    #[test]
    fn cap_is_enforced() {
        let base = GroundSet::numbered(4);
        assert!(matches!(
            hyper_ground(&base, 3),
            Err(CoarseError::HyperCapExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn lifted_diagonal_is_the_diagonal() {
        let base = GroundSet::numbered(3);
        let lifted = exp_entourage(&Relation::diagonal(&base), DEFAULT_HYPER_CAP).unwrap();
        assert_eq!(lifted, Relation::diagonal(&hyper_ground(&base, 12).unwrap()));
    }

    #[test]
    fn lifted_strip_relates_mutually_covering_subsets() {
        // Points 0..4 in a row, neighbours related.
        let sp = path_space(4, &[2.0]);
        let e = sp.element(0);
        let lifted = exp_entourage(e, DEFAULT_HYPER_CAP).unwrap();
        let hyper = hyper_ground(sp.ground(), DEFAULT_HYPER_CAP).unwrap();
        let at = |label: &str| hyper.position(label).unwrap();
        assert!(lifted.contains(at("{0}"), at("{1}")));
        assert!(!lifted.contains(at("{0}"), at("{2}")));
        assert!(lifted.contains(at("{0,3}"), at("{1,2}")));
        assert!(!lifted.contains(at("{0,3}"), at("{1}")));
        // The empty set is isolated.
        assert!(lifted.contains(at("{}"), at("{}")));
        assert_eq!(lifted.ball(at("{}")).unwrap().len(), 1);
        for k in 0..hyper.len() {
            assert_eq!(lifted.contains(at("{}"), k), k == at("{}"));
        }
        assert!(lifted.first_asymmetric_pair().is_none());
    }

    #[test]
    fn lifted_chains_pass_full_validation() {
        for scales in [&[1.0, 2.0][..], &[1.0, 3.0, 5.0][..]] {
            let sp = path_space(5, scales);
            let lifted = exp_space(&sp, DEFAULT_HYPER_CAP).unwrap();
            assert!(lifted.validate().is_ok());
        }
    }

    #[test]
    fn singleton_subsets_reproduce_the_base_chain() {
        let sp = path_space(5, &[1.0, 2.0, 4.0]);
        let lifted = exp_space(&sp, DEFAULT_HYPER_CAP).unwrap();
        for (i, e) in sp.chain().iter().enumerate() {
            let le = lifted.element(i);
            for a in 0..5 {
                for b in 0..5 {
                    assert_eq!(e.contains(a, b), le.contains(1 << a, 1 << b));
                }
            }
        }
    }

    #[test]
    fn direct_image_maps_compose_functorially() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(47);
        let a = GroundSet::numbered(4);
        let b = GroundSet::numbered(3);
        let c = GroundSet::numbered(5);
        for _ in 0..40 {
            let f =
                PointMap::new(&a, &b, (0..4).map(|_| rng.random_range(0..3)).collect()).unwrap();
            let g =
                PointMap::new(&b, &c, (0..3).map(|_| rng.random_range(0..5)).collect()).unwrap();
            let lhs = exp_map(&f.then(&g).unwrap(), 12).unwrap();
            let rhs = exp_map(&f, 12).unwrap().then(&exp_map(&g, 12).unwrap()).unwrap();
            assert!(lhs == rhs);
        }
        let id = PointMap::identity(&a);
        assert!(exp_map(&id, 12).unwrap() == PointMap::identity(&hyper_ground(&a, 12).unwrap()));
    }

    #[test]
    fn classification_survives_the_lift_in_both_directions() {
        let x = path_space(8, &[1.0, 2.0, 4.0]);
        let y = path_space(4, &[1.0, 2.0, 4.0]);
        let halve = PointMap::new(x.ground(), y.ground(), (0..8).map(|i| i / 2).collect()).unwrap();
        let p = exp_preservation(&halve, &x, &y, DEFAULT_HYPER_CAP).unwrap();
        assert!(p.base.is_coarse_equivalence());
        assert!(p.lifted.is_coarse_equivalence());
        assert!(p.all_agree());

        // A map across an infinite gap fails to be bornologous down below,
        // and the failure lifts.
        let inf = f64::INFINITY;
        let gap_ground = GroundSet::numbered(2);
        let split = CoarseSpace::from_metric(
            &gap_ground,
            &vec![vec![0.0, inf], vec![inf, 0.0]],
            &[1.0],
        )
        .unwrap();
        let squeeze = CoarseSpace::bounded(&GroundSet::numbered(2));
        let collapse = PointMap::new(squeeze.ground(), &gap_ground, vec![0, 1]).unwrap();
        let q = exp_preservation(&collapse, &squeeze, &split, DEFAULT_HYPER_CAP).unwrap();
        assert!(!q.base.is_bornologous());
        assert!(!q.lifted.is_bornologous());
        assert!(q.all_agree());

        let refl = PointMap::new(x.ground(), x.ground(), (0..8).rev().collect()).unwrap();
        let r = exp_preservation(&refl, &x, &x, DEFAULT_HYPER_CAP).unwrap();
        assert!(r.base.is_asymorphism() && r.lifted.is_asymorphism());
        assert!(r.all_agree());
    }

    #[test]
    fn lifted_systems_and_conjugacies_verify() {
        use crate::dynamics::tests_support::rotation_fixture;
        let sys = rotation_fixture(3, "p");
        let lifted = lift_cds(&sys, DEFAULT_HYPER_CAP).unwrap();
        assert_eq!(lifted.space().ground().len(), 8);
        let report = lifted.validate().unwrap();
        assert!(report.is_valid());
        // Time reversal lifts clause by clause.
        let n = sys.space().ground().len();
        let reversal = Conjugacy {
            space_map: PointMap::new(
                sys.space().ground(),
                sys.space().ground(),
                (0..n).map(|m| (n - m) % n).collect(),
            )
            .unwrap(),
            time_map: sys.time().group().inversion(),
        };
        assert!(check_conjugacy(&sys, &sys, &reversal).unwrap().verified());
        let lifted_conj = lift_conjugacy(&reversal, DEFAULT_HYPER_CAP).unwrap();
        assert!(check_conjugacy(&lifted, &lifted, &lifted_conj).unwrap().verified());
    }
}
