//! Randomized instance generation and the theorem suite run over it.
//!
//! Instances are built constructively as genuine actions, never rejection
//! sampled: the evolutions are left translations of a group on one of its
//! entourage spaces, or rotations of a metric cycle through a homomorphism
//! into the rotation group. Both families satisfy the system axioms
//! exactly, and each instance ships with a conjugate copy built from a
//! chain-respecting relabeling, so every theorem check has a known-good
//! target that is still re-verified from scratch.

use rand::prelude::*;
use rand::rngs::StdRng;
use rayon::prelude::*;

use coarse_core::dynamics::{
    check_conjugacy, compose_conjugacy, coproduct_cds, coproduct_conjugacy, inverse_conjugacy,
    orbit_preservation, Cds, Conjugacy, TimeGroup,
};
use coarse_core::group::{FiniteGroup, IdealChain};
use coarse_core::hyperspace::{exp_preservation, exp_space, lift_cds, lift_conjugacy, DEFAULT_HYPER_CAP};
use coarse_core::maps::PointMap;
use coarse_core::{CoarseSpace, GroundSet, PointSet};

use crate::report::{CheckRecord, Report};

#[derive(Clone, Copy, Debug)]
pub struct SizeBounds {
    pub max_space: usize,
    pub max_group: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds { max_space: 8, max_group: 6 }
    }
}

pub struct Instance {
    pub name: String,
    pub x: Cds,
    pub y: Cds,
    pub conjugacy: Conjugacy,
    pub mode: &'static str,
}

fn random_group(rng: &mut StdRng, max: usize) -> FiniteGroup {
    let mut picks: Vec<fn() -> FiniteGroup> = Vec::new();
    for n in 1..=max.min(6) {
        match n {
            1 => picks.push(|| FiniteGroup::cyclic(1).unwrap()),
            2 => picks.push(|| FiniteGroup::cyclic(2).unwrap()),
            3 => picks.push(|| FiniteGroup::cyclic(3).unwrap()),
            4 => {
                picks.push(|| FiniteGroup::cyclic(4).unwrap());
                picks.push(|| {
                    let z2 = FiniteGroup::cyclic(2).unwrap();
                    z2.direct_product(&z2).unwrap()
                });
            }
            5 => picks.push(|| FiniteGroup::cyclic(5).unwrap()),
            6 => {
                picks.push(|| FiniteGroup::cyclic(6).unwrap());
                picks.push(|| FiniteGroup::symmetric(3).unwrap());
            }
            _ => {}
        }
    }
    picks[rng.random_range(0..picks.len())]()
}

fn random_ideal(group: &FiniteGroup, rng: &mut StdRng) -> IdealChain {
    let n = group.order();
    let levels = rng.random_range(1..=2);
    let mut sets = Vec::with_capacity(levels);
    for _ in 0..levels {
        let mut s = PointSet::empty(group.ground());
        s.insert(group.identity()).unwrap();
        for _ in 0..rng.random_range(0..=2usize.min(n - 1)) {
            s.insert(rng.random_range(0..n)).unwrap();
        }
        sets.push(s);
    }
    IdealChain::normalized(group, &sets).expect("nonempty generator sets normalize")
}

fn power(group: &FiniteGroup, x: usize, u: usize) -> usize {
    let mut acc = group.identity();
    for _ in 0..u {
        acc = group.op(acc, x);
    }
    acc
}

fn is_automorphism(group: &FiniteGroup, assign: &[usize]) -> bool {
    let n = group.order();
    let mut seen = vec![false; n];
    for &t in assign {
        if seen[t] {
            return false;
        }
        seen[t] = true;
    }
    for a in 0..n {
        for b in 0..n {
            if assign[group.op(a, b)] != group.op(assign[a], assign[b]) {
                return false;
            }
        }
    }
    true
}

/// A random automorphism, drawn from inner automorphisms and power maps,
/// verified against the table; the identity is the fallback.
fn random_automorphism(group: &FiniteGroup, rng: &mut StdRng) -> Vec<usize> {
    let n = group.order();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for _ in 0..3 {
        let c = rng.random_range(0..n);
        candidates.push((0..n).map(|x| group.op(group.op(c, x), group.inv(c))).collect());
    }
    for _ in 0..3 {
        let u = rng.random_range(1..=n);
        candidates.push((0..n).map(|x| power(group, x, u)).collect());
    }
    candidates.shuffle(rng);
    candidates
        .into_iter()
        .find(|a| is_automorphism(group, a))
        .unwrap_or_else(|| (0..n).collect())
}

/// Optionally widen the plain product into a set-valued operation. Extra
/// values never break the composition axiom because the product stays in
/// every value set; when `symmetric` is set the extras are closed under
/// elementwise inversion so inversion time maps remain homomorphisms.
fn random_time(group: &FiniteGroup, ideal: IdealChain, rng: &mut StdRng, symmetric: bool) -> TimeGroup {
    if symmetric || rng.random_bool(0.5) {
        return TimeGroup::singleton(group.clone(), ideal);
    }
    let n = group.order();
    let mut table: Vec<PointSet> = (0..n * n)
        .map(|k| {
            let mut s = PointSet::empty(group.ground());
            s.insert(group.op(k / n, k % n)).unwrap();
            s
        })
        .collect();
    for k in 0..n * n {
        if rng.random_bool(0.3) {
            table[k].insert(rng.random_range(0..n)).unwrap();
        }
    }
    TimeGroup::set_valued(group.clone(), ideal, table).expect("products satisfy the unit law")
}

fn cycle_space(m: usize, scales: &[f64]) -> CoarseSpace {
    let ground = GroundSet::new((0..m).map(|i| format!("p{i}")).collect()).unwrap();
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

fn rotation(space: &CoarseSpace, t: usize) -> PointMap {
    let m = space.ground().len();
    let assign = (0..m).map(|i| (i + t) % m).collect();
    PointMap::new(space.ground(), space.ground(), assign).unwrap()
}

fn reflection(space: &CoarseSpace) -> PointMap {
    let m = space.ground().len();
    let assign = (0..m).map(|i| (m - i) % m).collect();
    PointMap::new(space.ground(), space.ground(), assign).unwrap()
}

/// A random homomorphism from the group into the rotation group of an
/// `m`-cycle, returned as the rotation amount of every element.
fn rotation_homomorphism(group: &FiniteGroup, m: usize, rng: &mut StdRng) -> Vec<usize> {
    let n = group.order();
    // try random generators-to-rotation assignments extended by products;
    // accept the first full table that is a homomorphism
    for _ in 0..8 {
        let mut theta = vec![usize::MAX; n];
        theta[group.identity()] = 0;
        let seed_el = rng.random_range(0..n);
        let seed_rot = rng.random_range(0..m);
        let mut ok = true;
        // close under products of the seeded element until stable
        theta[seed_el] = seed_rot;
        for _ in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if theta[a] != usize::MAX && theta[b] != usize::MAX {
                        let c = group.op(a, b);
                        let r = (theta[a] + theta[b]) % m;
                        if theta[c] == usize::MAX {
                            theta[c] = r;
                        } else if theta[c] != r {
                            ok = false;
                        }
                    }
                }
            }
        }
        if ok && theta.iter().all(|&t| t != usize::MAX) {
            return theta;
        }
    }
    vec![0; n]
}

pub fn generate_instance(seed: u64, bounds: &SizeBounds, name: String) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    if rng.random_bool(0.5) {
        coset_instance(&mut rng, bounds, name)
    } else {
        cycle_instance(&mut rng, bounds, name)
    }
}

/// Left translations of a group on one of its left entourage spaces,
/// twisted by a random automorphism; the conjugate copy translates by a
/// random element, which commutes with the twist exactly.
fn coset_instance(rng: &mut StdRng, bounds: &SizeBounds, name: String) -> Instance {
    let group = random_group(rng, bounds.max_group.min(bounds.max_space));
    let space = random_ideal(&group, rng).left_space(&group).expect("entourage chains validate");
    let time = random_time(&group, random_ideal(&group, rng), rng, false);
    let tau = random_automorphism(&group, rng);

    let evolution: Vec<PointMap> = (0..group.order()).map(|g| group.left_translation(tau[g])).collect();
    let x = Cds::new(space.clone(), time.clone(), evolution).expect("translations act exactly");

    let c = rng.random_range(0..group.order());
    let conjugated: Vec<PointMap> = (0..group.order())
        .map(|g| group.left_translation(group.op(group.op(c, tau[g]), group.inv(c))))
        .collect();
    let y = Cds::new(space, time, conjugated).expect("conjugated translations act exactly");

    let conjugacy = Conjugacy {
        space_map: group.left_translation(c),
        time_map: PointMap::identity(group.ground()),
    };
    Instance { name, x, y, conjugacy, mode: "coset" }
}

/// Rotations of a metric cycle through a homomorphism into the rotation
/// group; the conjugate copy rotates (any group) or reflects (abelian
/// groups, inversion time map).
fn cycle_instance(rng: &mut StdRng, bounds: &SizeBounds, name: String) -> Instance {
    let m = rng.random_range(3..=bounds.max_space);
    let scale_menu: [&[f64]; 4] = [&[1.0, 2.0], &[1.0, 2.0, 4.0], &[2.0, 4.0], &[1.0, 3.0]];
    let space = cycle_space(m, scale_menu[rng.random_range(0..4)]);
    let group = random_group(rng, bounds.max_group);
    let theta = rotation_homomorphism(&group, m, rng);

    let reflect = group.is_abelian() && rng.random_bool(0.4);
    let time = random_time(&group, random_ideal(&group, rng), rng, reflect);

    let evolution: Vec<PointMap> = (0..group.order()).map(|g| rotation(&space, theta[g])).collect();
    let x = Cds::new(space.clone(), time.clone(), evolution.clone()).expect("rotations act exactly");
    let y = Cds::new(space.clone(), time, evolution).expect("rotations act exactly");

    let conjugacy = if reflect {
        // reflection intertwines a rotation with its inverse rotation
        Conjugacy { space_map: reflection(&space), time_map: group.inversion() }
    } else {
        Conjugacy {
            space_map: rotation(&space, rng.random_range(0..m)),
            time_map: PointMap::identity(group.ground()),
        }
    };
    Instance { name, x, y, conjugacy, mode: if reflect { "cycle-reflect" } else { "cycle-rotate" } }
}

/// The theorem suite for one instance. Every claim is re-verified from
/// scratch; nothing is trusted from the construction.
pub fn instance_records(inst: &Instance, hyper_cap: usize, with_hyper: bool) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let name = inst.name.as_str();
    let m = inst.x.space().ground().len();

    let vx = inst.x.validate();
    let vy = inst.y.validate();
    let valid = match (&vx, &vy) {
        (Ok(rx), Ok(ry)) => {
            let mut details = vec![
                format!("mode {}", inst.mode),
                format!("points {m}"),
                format!(
                    "operation {}",
                    if inst.x.time().is_singleton() { "singleton" } else { "set-valued" }
                ),
            ];
            let ok = rx.is_valid() && ry.is_valid();
            if let Some(g) = rx.first_non_asymorphism() {
                details.push(format!("evolution {g} is not an asymorphism"));
            }
            if let Some(w) = &rx.composition_failure {
                details.push(format!("composition fails at ({}, {}, {})", w.g1, w.g2, w.point));
            }
            out.push(CheckRecord::of("cds-valid", name, ok, details));
            ok
        }
        _ => {
            out.push(CheckRecord::fail("cds-valid", name, vec!["construction rejected".into()]));
            false
        }
    };
    if !valid {
        return out;
    }

    let conj = check_conjugacy(&inst.x, &inst.y, &inst.conjugacy);
    let conj_ok = conj.as_ref().map(|r| r.verified()).unwrap_or(false);
    out.push(CheckRecord::of(
        "conjugacy",
        name,
        conj_ok,
        conj.as_ref()
            .map(|r| {
                let mut d = Vec::new();
                if let Some((g1, g2)) = r.homomorphism_failure {
                    d.push(format!("operation not carried over at ({g1}, {g2})"));
                }
                if let Some((g, p)) = r.intertwining_failure {
                    d.push(format!("intertwining fails at element {g}, point {p}"));
                }
                d
            })
            .unwrap_or_else(|e| vec![e.to_string()]),
    ));

    let inv = inverse_conjugacy(&inst.conjugacy);
    let inv_ok = inv
        .as_ref()
        .ok()
        .and_then(|i| check_conjugacy(&inst.y, &inst.x, i).ok())
        .map(|r| r.verified())
        .unwrap_or(false);
    out.push(CheckRecord::of("conjugacy-inverse", name, inv_ok, Vec::new()));

    let comp_ok = inv
        .as_ref()
        .ok()
        .and_then(|i| compose_conjugacy(&inst.conjugacy, i).ok())
        .and_then(|c| check_conjugacy(&inst.x, &inst.x, &c).ok())
        .map(|r| r.verified())
        .unwrap_or(false);
    out.push(CheckRecord::of("conjugacy-compose", name, comp_ok, Vec::new()));

    let orbit = orbit_preservation(&inst.x, &inst.y, &inst.conjugacy.space_map);
    let orbit_ok = matches!(orbit, Ok(None));
    let details = match &orbit {
        Ok(Some(p)) => vec![format!("orbit of point {p} is not carried onto its image")],
        Ok(None) => Vec::new(),
        Err(e) => vec![e.to_string()],
    };
    out.push(CheckRecord::of("orbit-preservation", name, orbit_ok, details));

    let cop_ok = (|| {
        let xx = coproduct_cds(&inst.x, &inst.x).ok()?;
        let yy = coproduct_cds(&inst.y, &inst.y).ok()?;
        if !xx.validate().ok()?.is_valid() || !yy.validate().ok()?.is_valid() {
            return None;
        }
        let cc = coproduct_conjugacy(&inst.conjugacy, &inst.conjugacy, &xx, &yy).ok()?;
        check_conjugacy(&xx, &yy, &cc).ok().filter(|r| r.verified()).map(|_| ())
    })()
    .is_some();
    out.push(CheckRecord::of("coproduct", name, cop_ok, Vec::new()));

    if with_hyper && m <= hyper_cap.min(6) {
        let exp_ok = exp_space(inst.x.space(), hyper_cap)
            .ok()
            .map(|e| e.validate().is_ok())
            .unwrap_or(false);
        out.push(CheckRecord::of("exp-space", name, exp_ok, Vec::new()));

        let mut rng = StdRng::seed_from_u64(inst.name.len() as u64 ^ 0x9e3779b9);
        let assign: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        let f = PointMap::new(inst.x.space().ground(), inst.x.space().ground(), assign).unwrap();
        let pres_ok = exp_preservation(&f, inst.x.space(), inst.x.space(), hyper_cap)
            .map(|p| p.all_agree())
            .unwrap_or(false);
        out.push(CheckRecord::of("exp-preservation", name, pres_ok, Vec::new()));

        let lift_ok = (|| {
            let lx = lift_cds(&inst.x, hyper_cap).ok()?;
            let ly = lift_cds(&inst.y, hyper_cap).ok()?;
            if !lx.validate().ok()?.is_valid() || !ly.validate().ok()?.is_valid() {
                return None;
            }
            let lc = lift_conjugacy(&inst.conjugacy, hyper_cap).ok()?;
            check_conjugacy(&lx, &ly, &lc).ok().filter(|r| r.verified()).map(|_| ())
        })()
        .is_some();
        out.push(CheckRecord::of("lift-conjugacy", name, lift_ok, Vec::new()));
    }

    out
}

/// Generates `count` instances from the seed and runs the theorem suite on
/// each, in parallel. Record order in the report is stable regardless of
/// scheduling.
pub fn corpus_report(count: usize, seed: u64, bounds: &SizeBounds, hyper_cap: usize, with_hyper: bool) -> Report {
    let mut master = StdRng::seed_from_u64(seed);
    let specs: Vec<(u64, String)> =
        (0..count).map(|i| (master.random::<u64>(), format!("instance-{i:03}"))).collect();
    let checks: Vec<CheckRecord> = specs
        .into_par_iter()
        .flat_map(|(s, name)| {
            let inst = generate_instance(s, bounds, name);
            instance_records(&inst, hyper_cap.min(DEFAULT_HYPER_CAP), with_hyper)
        })
        .collect();
    Report::new(seed, checks)
}
