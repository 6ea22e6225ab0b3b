//! Scenario files: JSON documents naming spaces, groups, windows, maps,
//! systems, and conjugacies. Loading resolves every cross-reference and
//! runs the library constructors, so a loaded scenario is a validated
//! object graph. The one deliberate exception: a space given as an explicit
//! `chain` is built without the chain-invariant check, so `check-space` can
//! report violations as verdicts instead of refusing to load.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use coarse_core::dynamics::{Cds, Conjugacy, TimeGroup};
use coarse_core::group::{FiniteGroup, IdealChain};
use coarse_core::maps::PointMap;
use coarse_core::window::{WindowKind, WindowedLine};
use coarse_core::{CoarseSpace, GroundSet, PointSet, Provenance, Relation};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default)]
    groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    windows: BTreeMap<String, WindowSpec>,
    #[serde(default)]
    maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    systems: BTreeMap<String, SystemSpec>,
    #[serde(default)]
    conjugacies: BTreeMap<String, ConjugacySpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSpec {
    points: Vec<String>,
    #[serde(default)]
    chain: Option<Vec<Vec<(String, String)>>>,
    #[serde(default)]
    metric: Option<MetricSpec>,
    #[serde(default)]
    discrete: Option<bool>,
    #[serde(default)]
    bounded: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricSpec {
    matrix: Vec<Vec<NumOrInf>>,
    scales: Vec<f64>,
}

/// A number, or the string "inf" for points at infinite distance.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrInf {
    Num(f64),
    Word(String),
}

impl NumOrInf {
    fn value(&self) -> Result<f64, String> {
        match self {
            NumOrInf::Num(x) => Ok(*x),
            NumOrInf::Word(w) if w == "inf" => Ok(f64::INFINITY),
            NumOrInf::Word(w) => Err(format!("expected a number or \"inf\", got {w:?}")),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    #[serde(default)]
    ideal: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowSpec {
    kind: String,
    #[serde(rename = "halfWidth")]
    half_width: f64,
    #[serde(default)]
    step: Option<f64>,
    scales: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    from: String,
    to: String,
    assign: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSpec {
    space: String,
    group: String,
    #[serde(default)]
    hyperop: Option<Vec<(String, String, Vec<String>)>>,
    evolution: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConjugacySpec {
    #[serde(rename = "fromSystem")]
    from_system: String,
    #[serde(rename = "toSystem")]
    to_system: String,
    f: Vec<(String, String)>,
    h: Vec<(String, String)>,
}

/// A loaded and resolved scenario.
pub struct Scenario {
    pub seed: u64,
    pub spaces: BTreeMap<String, CoarseSpace>,
    pub groups: BTreeMap<String, (FiniteGroup, IdealChain)>,
    pub windows: BTreeMap<String, WindowedLine>,
    /// name -> (source space name, target space name, map)
    pub maps: BTreeMap<String, (String, String, PointMap)>,
    pub systems: BTreeMap<String, Cds>,
    /// name -> (from system name, to system name, conjugacy)
    pub conjugacies: BTreeMap<String, (String, String, Conjugacy)>,
}

fn fail<T>(what: &str, name: &str, err: impl std::fmt::Display) -> Result<T, String> {
    Err(format!("{what} {name:?}: {err}"))
}

fn build_space(name: &str, spec: &SpaceSpec) -> Result<CoarseSpace, String> {
    let ground = GroundSet::new(spec.points.clone()).map_err(|e| format!("space {name:?}: {e}"))?;
    let modes = [spec.chain.is_some(), spec.metric.is_some(), spec.discrete == Some(true), spec.bounded == Some(true)];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return fail("space", name, "needs exactly one of chain, metric, discrete, bounded");
    }
    if let Some(chain) = &spec.chain {
        let mut elements = Vec::with_capacity(chain.len());
        for level in chain {
            let rel = Relation::from_label_pairs(&ground, level).map_err(|e| format!("space {name:?}: {e}"))?;
            elements.push(rel);
        }
        // built leniently so check-space can surface invariant violations
        return CoarseSpace::from_chain_unvalidated(elements, Provenance::Derived)
            .map_err(|e| format!("space {name:?}: {e}"));
    }
    if let Some(metric) = &spec.metric {
        let n = ground.len();
        let mut dist = vec![vec![0.0f64; n]; n];
        if metric.matrix.len() != n {
            return fail("space", name, format!("metric matrix has {} rows for {n} points", metric.matrix.len()));
        }
        for (i, row) in metric.matrix.iter().enumerate() {
            if row.len() != n {
                return fail("space", name, format!("metric row {i} has {} entries for {n} points", row.len()));
            }
            for (j, x) in row.iter().enumerate() {
                dist[i][j] = x.value().map_err(|e| format!("space {name:?} metric[{i}][{j}]: {e}"))?;
            }
        }
        return CoarseSpace::from_metric(&ground, &dist, &metric.scales)
            .map_err(|e| format!("space {name:?}: {e}"));
    }
    if spec.discrete == Some(true) {
        return Ok(CoarseSpace::discrete(&ground));
    }
    Ok(CoarseSpace::bounded(&ground))
}

fn build_group(name: &str, spec: &GroupSpec) -> Result<(FiniteGroup, IdealChain), String> {
    let ground = GroundSet::new(spec.elements.clone()).map_err(|e| format!("group {name:?}: {e}"))?;
    let group = FiniteGroup::new(&ground, &spec.table).map_err(|e| format!("group {name:?}: {e}"))?;
    let ideal = match &spec.ideal {
        Some(levels) => IdealChain::normalized_from_labels(&group, levels)
            .map_err(|e| format!("group {name:?} ideal: {e}"))?,
        None => IdealChain::finitary(&group),
    };
    Ok((group, ideal))
}

fn build_window(name: &str, spec: &WindowSpec) -> Result<WindowedLine, String> {
    let kind = match spec.kind.as_str() {
        "integer" => WindowKind::Integer,
        "grid" => WindowKind::Grid,
        other => return fail("window", name, format!("unknown kind {other:?}")),
    };
    let step = match kind {
        WindowKind::Integer => spec.step.unwrap_or(1.0),
        WindowKind::Grid => spec.step.ok_or_else(|| format!("window {name:?}: grid windows need a step"))?,
    };
    WindowedLine::with_kind(kind, spec.half_width, step, &spec.scales)
        .map_err(|e| format!("window {name:?}: {e}"))
}

fn build_system(
    name: &str,
    spec: &SystemSpec,
    spaces: &BTreeMap<String, CoarseSpace>,
    groups: &BTreeMap<String, (FiniteGroup, IdealChain)>,
) -> Result<Cds, String> {
    let space = spaces
        .get(&spec.space)
        .ok_or_else(|| format!("system {name:?}: unknown space {:?}", spec.space))?;
    let (group, ideal) = groups
        .get(&spec.group)
        .ok_or_else(|| format!("system {name:?}: unknown group {:?}", spec.group))?;

    let time = match &spec.hyperop {
        None => TimeGroup::singleton(group.clone(), ideal.clone()),
        Some(triples) => {
            let n = group.order();
            // pairs not listed keep the plain product as their only value
            let mut table: Vec<PointSet> = (0..n * n)
                .map(|k| {
                    let mut s = PointSet::empty(group.ground());
                    s.insert(group.op(k / n, k % n)).expect("products are in range");
                    s
                })
                .collect();
            for (a, b, values) in triples {
                let ai = group.ground().require(a).map_err(|e| format!("system {name:?} hyperop: {e}"))?;
                let bi = group.ground().require(b).map_err(|e| format!("system {name:?} hyperop: {e}"))?;
                let mut s = PointSet::empty(group.ground());
                for v in values {
                    let vi = group.ground().require(v).map_err(|e| format!("system {name:?} hyperop: {e}"))?;
                    s.insert(vi).expect("index in range");
                }
                table[ai * n + bi] = s;
            }
            TimeGroup::set_valued(group.clone(), ideal.clone(), table)
                .map_err(|e| format!("system {name:?} hyperop: {e}"))?
        }
    };

    let mut evolution = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let label = group.ground().label(g);
        let images = spec
            .evolution
            .get(label)
            .ok_or_else(|| format!("system {name:?}: evolution missing element {label:?}"))?;
        if images.len() != space.ground().len() {
            return fail(
                "system",
                name,
                format!("evolution of {label:?} lists {} images for {} points", images.len(), space.ground().len()),
            );
        }
        let mut assign = Vec::with_capacity(images.len());
        for img in images {
            assign.push(space.ground().require(img).map_err(|e| format!("system {name:?}: {e}"))?);
        }
        let map = PointMap::new(space.ground(), space.ground(), assign)
            .map_err(|e| format!("system {name:?}: {e}"))?;
        evolution.push(map);
    }
    for label in spec.evolution.keys() {
        if group.ground().position(label).is_none() {
            return fail("system", name, format!("evolution names unknown element {label:?}"));
        }
    }
    Cds::new(space.clone(), time, evolution).map_err(|e| format!("system {name:?}: {e}"))
}

fn build_conjugacy(
    name: &str,
    spec: &ConjugacySpec,
    systems: &BTreeMap<String, Cds>,
) -> Result<(String, String, Conjugacy), String> {
    let from = systems
        .get(&spec.from_system)
        .ok_or_else(|| format!("conjugacy {name:?}: unknown system {:?}", spec.from_system))?;
    let to = systems
        .get(&spec.to_system)
        .ok_or_else(|| format!("conjugacy {name:?}: unknown system {:?}", spec.to_system))?;
    let space_map = PointMap::from_label_pairs(from.space().ground(), to.space().ground(), &spec.f)
        .map_err(|e| format!("conjugacy {name:?} f: {e}"))?;
    let time_map = PointMap::from_label_pairs(
        from.time().group().ground(),
        to.time().group().ground(),
        &spec.h,
    )
    .map_err(|e| format!("conjugacy {name:?} h: {e}"))?;
    Ok((spec.from_system.clone(), spec.to_system.clone(), Conjugacy { space_map, time_map }))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, String> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| format!("parse error: {e}"))?;

    let mut spaces = BTreeMap::new();
    for (name, spec) in &file.spaces {
        spaces.insert(name.clone(), build_space(name, spec)?);
    }
    let mut groups = BTreeMap::new();
    for (name, spec) in &file.groups {
        groups.insert(name.clone(), build_group(name, spec)?);
    }
    let mut windows = BTreeMap::new();
    for (name, spec) in &file.windows {
        windows.insert(name.clone(), build_window(name, spec)?);
    }
    let mut maps = BTreeMap::new();
    for (name, spec) in &file.maps {
        let from = spaces
            .get(&spec.from)
            .ok_or_else(|| format!("map {name:?}: unknown space {:?}", spec.from))?;
        let to = spaces
            .get(&spec.to)
            .ok_or_else(|| format!("map {name:?}: unknown space {:?}", spec.to))?;
        let map = PointMap::from_label_pairs(from.ground(), to.ground(), &spec.assign)
            .map_err(|e| format!("map {name:?}: {e}"))?;
        maps.insert(name.clone(), (spec.from.clone(), spec.to.clone(), map));
    }
    let mut systems = BTreeMap::new();
    for (name, spec) in &file.systems {
        systems.insert(name.clone(), build_system(name, spec, &spaces, &groups)?);
    }
    let mut conjugacies = BTreeMap::new();
    for (name, spec) in &file.conjugacies {
        conjugacies.insert(name.clone(), build_conjugacy(name, spec, &systems)?);
    }

    Ok(Scenario {
        seed: file.seed.unwrap_or(0),
        spaces,
        groups,
        windows,
        maps,
        systems,
        conjugacies,
    })
}
