//! Command bodies. Each one turns a loaded scenario (plus flags) into check
//! records; the binary assembles them into a report and derives the exit
//! code from the verdicts.

use coarse_core::asdim::{asdim_upper_witness, AsdimOutcome};
use coarse_core::dynamics::{
    check_conjugacy, compose_conjugacy, coproduct_cds, coproduct_conjugacy, inverse_conjugacy,
    orbit_preservation, Cds,
};
use coarse_core::group::{ideal_chain_of, left_invariance_control};
use coarse_core::hyperspace::{exp_space, lift_cds, lift_conjugacy};
use coarse_core::maps::{classify, ControlOutcome, MapReport};
use coarse_core::window::{unified_demo, DEFAULT_SCALES};
use coarse_core::{CoarseSpace, Scale};

use crate::report::CheckRecord;
use crate::scenario::Scenario;
use crate::corpus::{corpus_report, SizeBounds};

fn scale_str(s: Scale) -> String {
    match s {
        Some(i) => format!("E{i}"),
        None => "none".to_string(),
    }
}

fn control_str(o: &ControlOutcome) -> String {
    match o {
        ControlOutcome::Controlled(c) => format!("controlled, rho = {:?}", c.table()),
        ControlOutcome::Uncontrolled(w) => format!(
            "uncontrolled at E{}: ({}, {}) lands at ({}, {}) beyond every scale",
            w.scale, w.pair.0, w.pair.1, w.image_pair.0, w.image_pair.1
        ),
    }
}

fn class_name(r: &MapReport) -> &'static str {
    if r.is_asymorphism() {
        "asymorphism"
    } else if r.is_coarse_equivalence() {
        "coarse equivalence"
    } else if r.is_asymorphic_embedding() {
        "asymorphic embedding"
    } else if r.is_bornologous() {
        "bornologous"
    } else {
        "unclassified"
    }
}

fn classification_details(r: &MapReport) -> Vec<String> {
    vec![
        format!("class: {}", class_name(r)),
        format!("bornologous: {}", control_str(&r.bornologous)),
        format!("effectively proper: {}", control_str(&r.effectively_proper)),
        format!("injective: {}, surjective: {}", r.injective, r.surjective),
        format!("image large at {}", scale_str(r.image_largeness)),
    ]
}

pub fn check_space(scn: &Scenario) -> Vec<CheckRecord> {
    scn.spaces
        .iter()
        .map(|(name, space)| match space.validate() {
            Ok(()) => CheckRecord::pass(
                "check-space",
                name,
                vec![
                    format!("{} points", space.ground().len()),
                    format!("{} scales", space.chain_len()),
                ],
            ),
            Err(v) => CheckRecord::fail("check-space", name, vec![v.to_string()]),
        })
        .collect()
}

/// Classification is informational: the record passes when the map could be
/// classified at all, and the details carry the verdicts.
pub fn check_map(scn: &Scenario) -> Vec<CheckRecord> {
    scn.maps
        .iter()
        .map(|(name, (from, to, map))| {
            let x = &scn.spaces[from];
            let y = &scn.spaces[to];
            match classify(map, x, y) {
                Ok(r) => CheckRecord::pass("check-map", name, classification_details(&r)),
                Err(e) => CheckRecord::fail("check-map", name, vec![e.to_string()]),
            }
        })
        .collect()
}

pub fn check_group(scn: &Scenario) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (name, (group, ideal)) in &scn.groups {
        let record = (|| -> Result<CheckRecord, String> {
            let left = ideal.left_space(group).map_err(|e| e.to_string())?;
            let right = ideal.right_space(group).map_err(|e| e.to_string())?;
            left.validate().map_err(|v| format!("left structure: {v}"))?;
            right.validate().map_err(|v| format!("right structure: {v}"))?;

            let invariance = left_invariance_control(group, &left).map_err(|e| e.to_string())?;
            if !invariance.is_controlled() {
                return Err(format!("left translations: {}", control_str(&invariance)));
            }

            // ideal -> structure -> ideal must reproduce the same membership
            let recovered = ideal_chain_of(group, &left).map_err(|e| e.to_string())?;
            let rebuilt = recovered.left_space(group).map_err(|e| e.to_string())?;
            if !rebuilt.membership_equivalent(&left) {
                return Err("recovered ideal chain generates a different structure".to_string());
            }

            let inv = classify(&group.inversion(), &left, &right).map_err(|e| e.to_string())?;
            if !inv.is_asymorphism() {
                return Err(format!("inversion left to right: {}", class_name(&inv)));
            }

            Ok(CheckRecord::pass(
                "check-group",
                name,
                vec![
                    format!("order {}", group.order()),
                    format!("abelian: {}", group.is_abelian()),
                    format!("ideal levels: {}", ideal.len()),
                    "round trip and inversion verified".to_string(),
                ],
            ))
        })();
        out.push(record.unwrap_or_else(|msg| CheckRecord::fail("check-group", name, vec![msg])));
    }
    out
}

fn cds_details(sys: &Cds) -> Vec<String> {
    vec![
        format!("{} points", sys.space().ground().len()),
        format!("time order {}", sys.time().group().order()),
        format!("operation: {}", if sys.time().is_singleton() { "singleton" } else { "set-valued" }),
    ]
}

pub fn check_cds(scn: &Scenario) -> Vec<CheckRecord> {
    scn.systems
        .iter()
        .map(|(name, sys)| match sys.validate() {
            Ok(r) if r.is_valid() => CheckRecord::pass("check-cds", name, cds_details(sys)),
            Ok(r) => {
                let mut details = Vec::new();
                if let Some(g) = r.identity_failure {
                    details.push(format!("identity evolution moves point {g}"));
                }
                if let Some(g) = r.first_non_asymorphism() {
                    details.push(format!("evolution {g} is not an asymorphism"));
                }
                if let Some(w) = &r.composition_failure {
                    details.push(format!(
                        "composition axiom fails at ({}, {}, {})",
                        w.g1, w.g2, w.point
                    ));
                }
                CheckRecord::fail("check-cds", name, details)
            }
            Err(e) => CheckRecord::fail("check-cds", name, vec![e.to_string()]),
        })
        .collect()
}

pub fn conjugacy(scn: &Scenario) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (name, (from, to, c)) in &scn.conjugacies {
        let a = &scn.systems[from];
        let b = &scn.systems[to];
        match check_conjugacy(a, b, c) {
            Ok(r) if r.verified() => {
                out.push(CheckRecord::pass("conjugacy", name, vec![format!("{from} -> {to}")]))
            }
            Ok(r) => {
                let mut details = Vec::new();
                if !r.space_report.is_asymorphism() {
                    details.push(format!("space map: {}", class_name(&r.space_report)));
                }
                if !r.time_report.is_asymorphism() {
                    details.push(format!("time map: {}", class_name(&r.time_report)));
                }
                if let Some((g1, g2)) = r.homomorphism_failure {
                    details.push(format!("operation not carried over at ({g1}, {g2})"));
                }
                if let Some((g, m)) = r.intertwining_failure {
                    details.push(format!("intertwining fails at element {g}, point {m}"));
                }
                out.push(CheckRecord::fail("conjugacy", name, details));
            }
            Err(e) => out.push(CheckRecord::fail("conjugacy", name, vec![e.to_string()])),
        }

        let inv_ok = inverse_conjugacy(c)
            .ok()
            .and_then(|i| check_conjugacy(b, a, &i).ok())
            .map(|r| r.verified())
            .unwrap_or(false);
        out.push(CheckRecord::of("conjugacy-inverse", name, inv_ok, vec![format!("{to} -> {from}")]));

        let comp_ok = inverse_conjugacy(c)
            .ok()
            .and_then(|i| compose_conjugacy(c, &i).ok())
            .and_then(|cc| check_conjugacy(a, a, &cc).ok())
            .map(|r| r.verified())
            .unwrap_or(false);
        out.push(CheckRecord::of(
            "conjugacy-compose",
            name,
            comp_ok,
            vec![format!("{from} -> {to} -> {from}")],
        ));
    }
    out
}

pub fn orbit(scn: &Scenario) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (name, sys) in &scn.systems {
        let n = sys.space().ground().len();
        let sizes: Vec<usize> = (0..n).map(|m| sys.orbit(m).expect("point in range").len()).collect();
        out.push(CheckRecord::pass("orbit-table", name, vec![format!("orbit sizes {sizes:?}")]));
    }
    for (name, (from, to, c)) in &scn.conjugacies {
        let a = &scn.systems[from];
        let b = &scn.systems[to];
        let record = match orbit_preservation(a, b, &c.space_map) {
            Ok(None) => CheckRecord::pass("orbit-preservation", name, vec!["every point".to_string()]),
            Ok(Some(m)) => CheckRecord::fail(
                "orbit-preservation",
                name,
                vec![format!("orbit of point {m} is not carried onto the orbit of its image")],
            ),
            Err(e) => CheckRecord::fail("orbit-preservation", name, vec![e.to_string()]),
        };
        out.push(record);
    }
    out
}

pub fn coproduct(scn: &Scenario) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (na, a) in &scn.systems {
        for (nb, b) in &scn.systems {
            let input = format!("{na}+{nb}");
            let record = match coproduct_cds(a, b).and_then(|s| s.validate()) {
                Ok(r) if r.is_valid() => CheckRecord::pass(
                    "coproduct",
                    &input,
                    vec![format!(
                        "{} points, time order {}",
                        a.space().ground().len() + b.space().ground().len(),
                        a.time().group().order() * b.time().group().order()
                    )],
                ),
                Ok(_) => CheckRecord::fail("coproduct", &input, vec!["result fails validation".to_string()]),
                Err(e) => CheckRecord::fail("coproduct", &input, vec![e.to_string()]),
            };
            out.push(record);
        }
    }
    for (name, (from, to, c)) in &scn.conjugacies {
        let a = &scn.systems[from];
        let b = &scn.systems[to];
        let ok = (|| {
            let aa = coproduct_cds(a, a).ok()?;
            let bb = coproduct_cds(b, b).ok()?;
            let cc = coproduct_conjugacy(c, c, &aa, &bb).ok()?;
            check_conjugacy(&aa, &bb, &cc).ok().filter(|r| r.verified())
        })()
        .is_some();
        out.push(CheckRecord::of(
            "coproduct-conjugacy",
            name,
            ok,
            vec![format!("{from}+{from} -> {to}+{to}")],
        ));
    }
    out
}

pub fn hyperlift(scn: &Scenario, cap: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (name, space) in &scn.spaces {
        let n = space.ground().len();
        if n > cap {
            out.push(CheckRecord::pass(
                "hyper-space",
                name,
                vec![format!("skipped: {n} points exceeds cap {cap}")],
            ));
            continue;
        }
        let record = match exp_space(space, cap) {
            Ok(h) => match h.validate() {
                Ok(()) => CheckRecord::pass(
                    "hyper-space",
                    name,
                    vec![format!("{} subsets", h.ground().len())],
                ),
                Err(v) => CheckRecord::fail("hyper-space", name, vec![v.to_string()]),
            },
            Err(e) => CheckRecord::fail("hyper-space", name, vec![e.to_string()]),
        };
        out.push(record);
    }
    for (name, sys) in &scn.systems {
        let n = sys.space().ground().len();
        if n > cap {
            out.push(CheckRecord::pass(
                "hyper-lift",
                name,
                vec![format!("skipped: {n} points exceeds cap {cap}")],
            ));
            continue;
        }
        let record = match lift_cds(sys, cap).and_then(|l| l.validate()) {
            Ok(r) if r.is_valid() => CheckRecord::pass("hyper-lift", name, Vec::new()),
            Ok(_) => CheckRecord::fail("hyper-lift", name, vec!["lift fails validation".to_string()]),
            Err(e) => CheckRecord::fail("hyper-lift", name, vec![e.to_string()]),
        };
        out.push(record);
    }
    for (name, (from, to, c)) in &scn.conjugacies {
        let a = &scn.systems[from];
        let b = &scn.systems[to];
        let n = a.space().ground().len().max(b.space().ground().len());
        if n > cap {
            out.push(CheckRecord::pass(
                "hyper-conjugacy",
                name,
                vec![format!("skipped: {n} points exceeds cap {cap}")],
            ));
            continue;
        }
        let ok = (|| {
            let la = lift_cds(a, cap).ok()?;
            let lb = lift_cds(b, cap).ok()?;
            let lc = lift_conjugacy(c, cap).ok()?;
            check_conjugacy(&la, &lb, &lc).ok().filter(|r| r.verified())
        })()
        .is_some();
        out.push(CheckRecord::of("hyper-conjugacy", name, ok, vec![format!("{from} -> {to}")]));
    }
    out
}

fn resolve_space<'a>(scn: &'a Scenario, name: &str) -> Option<CowSpace<'a>> {
    if let Some(s) = scn.spaces.get(name) {
        return Some(CowSpace::Borrowed(s));
    }
    if let Some(w) = scn.windows.get(name) {
        return Some(CowSpace::Borrowed(w.space()));
    }
    if let Some((group, ideal)) = scn.groups.get(name) {
        return ideal.left_space(group).ok().map(CowSpace::Owned);
    }
    None
}

enum CowSpace<'a> {
    Borrowed(&'a CoarseSpace),
    Owned(CoarseSpace),
}

impl CowSpace<'_> {
    fn get(&self) -> &CoarseSpace {
        match self {
            CowSpace::Borrowed(s) => s,
            CowSpace::Owned(s) => s,
        }
    }
}

/// One record per space, with a per-scale detail line listing the cover
/// shape and the bound index of the re-verified witness.
pub fn asdim(scn: &Scenario, target: &str, n: usize, exact_cap: usize) -> Vec<CheckRecord> {
    let Some(space) = resolve_space(scn, target) else {
        return vec![CheckRecord::fail(
            "asdim",
            target,
            vec!["unknown space, window, or group".to_string()],
        )];
    };
    let space = space.get();
    let record = match asdim_upper_witness(space, n, exact_cap) {
        Ok(AsdimOutcome::Witness(w)) => {
            let mut details = vec![format!("dimension bound {n} holds at every scale")];
            for (i, cover) in w.per_scale.iter().enumerate() {
                let sets: usize = cover.families.iter().map(|f| f.len()).sum();
                details.push(format!(
                    "E{i}: {} families, {} sets, bounded at {}",
                    cover.families.len(),
                    sets,
                    scale_str(cover.bound_scale)
                ));
            }
            match w.reverify(space) {
                Ok(true) => CheckRecord::pass("asdim", target, details),
                Ok(false) => CheckRecord::fail("asdim", target, vec!["witness fails re-verification".to_string()]),
                Err(e) => CheckRecord::fail("asdim", target, vec![e.to_string()]),
            }
        }
        Ok(AsdimOutcome::ExhaustedExact { scale }) => CheckRecord::fail(
            "asdim",
            target,
            vec![format!("no cover with {} families exists at E{scale} (exhaustive)", n + 1)],
        ),
        Ok(AsdimOutcome::GaveUpHeuristic { scale }) => CheckRecord::fail(
            "asdim",
            target,
            vec![format!("no witness found at E{scale} (heuristics only, not a lower bound)")],
        ),
        Err(e) => CheckRecord::fail("asdim", target, vec![e.to_string()]),
    };
    vec![record]
}

/// The unified integer/grid window demo: exact round trip one way, closeness
/// within the unit scale the other way, and coarse equivalence both ways
/// with controls that stay within one scale step.
pub fn zr_demo(half_width: f64, step: f64) -> Vec<CheckRecord> {
    let demo = match unified_demo(half_width, step, &DEFAULT_SCALES) {
        Ok(d) => d,
        Err(e) => return vec![CheckRecord::fail("zr-demo", "setup", vec![e.to_string()])],
    };
    let mut out = Vec::new();

    out.push(CheckRecord::of(
        "zr-demo",
        "integer-round-trip",
        demo.integer_round_trip == Some(0),
        vec![format!("floor after inclusion is the identity, closeness {}", scale_str(demo.integer_round_trip))],
    ));

    let close_enough = match (demo.grid_round_trip, demo.unit_distance_scale) {
        (Some(r), Some(u)) => r <= u,
        _ => false,
    };
    out.push(CheckRecord::of(
        "zr-demo",
        "grid-round-trip",
        close_enough,
        vec![format!(
            "inclusion after floor close at {}, unit distance at {}",
            scale_str(demo.grid_round_trip),
            scale_str(demo.unit_distance_scale)
        )],
    ));

    for (input, report) in [("inclusion", &demo.inclusion_report), ("floor", &demo.floor_report)] {
        let controls_tight = [&report.bornologous, &report.effectively_proper].iter().all(|o| {
            o.control().map(|c| c.table().iter().enumerate().all(|(i, &j)| j <= i + 1)).unwrap_or(false)
        });
        out.push(CheckRecord::of(
            "zr-demo",
            input,
            report.is_coarse_equivalence() && controls_tight,
            classification_details(report)
                .into_iter()
                .chain(std::iter::once(format!("controls within one step: {controls_tight}")))
                .collect(),
        ));
    }
    out
}

pub fn corpus(count: usize, seed: u64, hyper_cap: usize) -> Vec<CheckRecord> {
    corpus_report(count, seed, &SizeBounds::default(), hyper_cap, true).checks
}
