//! Maps between coarse spaces and their scale-relative classification.
//!
//! Everything is phrased through two exact constructions on a point map `f`:
//! the pushforward `(f x f)(E)` and the pullback `(f x f)^{-1}(F)`, related by
//! the adjunction `(f x f)(E) <= F  iff  E <= (f x f)^{-1}(F)`. Closeness,
//! bornologous controls, effective properness, largeness and the coarse
//! inverse checks all reduce to membership scales of one of the two.
//!
//! A control is the table `i -> least j` such that scale-`i` pairs land inside
//! scale-`j` pairs; when no `j` works the outcome carries the offending scale
//! and pair instead of a table.

use std::fmt;

use crate::error::{CoarseError, Result};
use crate::relation::{GroundSet, PointSet, Relation, RelationBuilder};
use crate::space::{CoarseSpace, Scale};

/// A total map between two ground sets, stored point by point.
#[derive(Clone, PartialEq, Eq)]
pub struct PointMap {
    source: GroundSet,
    target: GroundSet,
    assign: Vec<usize>,
    monotone: bool,
}

impl PointMap {
    pub fn new(source: &GroundSet, target: &GroundSet, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != source.len() {
            return Err(CoarseError::MapShape { got: assign.len(), expected: source.len() });
        }
        for &t in &assign {
            target.check_index(t)?;
        }
        let monotone = assign.windows(2).all(|w| w[0] <= w[1]);
        Ok(PointMap { source: source.clone(), target: target.clone(), assign, monotone })
    }

    /// Builds from `(source label, target label)` pairs; every source point
    /// must be assigned exactly once.
    pub fn from_label_pairs(
        source: &GroundSet,
        target: &GroundSet,
        pairs: &[(impl AsRef<str>, impl AsRef<str>)],
    ) -> Result<Self> {
        let mut assign = vec![usize::MAX; source.len()];
        let mut seen = 0usize;
        for (from, to) in pairs {
            let s = source.require(from.as_ref())?;
            let t = target.require(to.as_ref())?;
            if assign[s] == usize::MAX {
                seen += 1;
            }
            assign[s] = t;
        }
        if seen != source.len() {
            return Err(CoarseError::MapShape { got: seen, expected: source.len() });
        }
        PointMap::new(source, target, assign)
    }

    pub fn identity(ground: &GroundSet) -> Self {
        PointMap {
            source: ground.clone(),
            target: ground.clone(),
            assign: (0..ground.len()).collect(),
            monotone: true,
        }
    }

    pub fn source(&self) -> &GroundSet {
        &self.source
    }

    pub fn target(&self) -> &GroundSet {
        &self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.assign[i]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assign
    }

    /// `self` first, then `g`.
    pub fn then(&self, g: &PointMap) -> Result<PointMap> {
        if !self.target.is_same(&g.source) {
            return Err(CoarseError::GroundMismatch { left: self.target.len(), right: g.source.len() });
        }
        let assign = self.assign.iter().map(|&t| g.assign[t]).collect();
        PointMap::new(&self.source, &g.target, assign)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.assign.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &t in &self.assign {
            seen[t] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<PointMap> {
        if !self.is_bijective() {
            return Err(CoarseError::NotInvertible);
        }
        let mut assign = vec![0; self.target.len()];
        for (s, &t) in self.assign.iter().enumerate() {
            assign[t] = s;
        }
        PointMap::new(&self.target, &self.source, assign)
    }

    pub fn image_of(&self, set: &PointSet) -> Result<PointSet> {
        if !set.ground().is_same(&self.source) {
            return Err(CoarseError::GroundMismatch { left: self.source.len(), right: set.ground().len() });
        }
        let mut out = PointSet::empty(&self.target);
        for i in set.iter() {
            out.insert(self.assign[i])?;
        }
        Ok(out)
    }

    pub fn image(&self) -> PointSet {
        let mut out = PointSet::empty(&self.target);
        for &t in &self.assign {
            out.insert(t).expect("assignments are in range");
        }
        out
    }

    /// The pushforward `(f x f)(E)` on the target ground set.
    pub fn push_forward(&self, e: &Relation) -> Result<Relation> {
        if !e.ground().is_same(&self.source) {
            return Err(CoarseError::GroundMismatch { left: self.source.len(), right: e.ground().len() });
        }
        let mut b = RelationBuilder::new(&self.target);
        let mut failed = None;
        e.for_each_pair(|x, y| {
            if failed.is_none() {
                if let Err(err) = b.insert(self.assign[x], self.assign[y]) {
                    failed = Some(err);
                }
            }
        });
        match failed {
            Some(err) => Err(err),
            None => Ok(b.build()),
        }
    }

    /// The pullback `(f x f)^{-1}(F) = {(a, b) : (f(a), f(b)) in F}` on the
    /// source ground set. Order-monotone maps pulling back banded relations
    /// take an interval route; the general case walks fibers.
    pub fn pull_back(&self, f_rel: &Relation) -> Result<Relation> {
        if !f_rel.ground().is_same(&self.target) {
            return Err(CoarseError::GroundMismatch { left: self.target.len(), right: f_rel.ground().len() });
        }
        let n = self.source.len();
        let mut b = RelationBuilder::new(&self.source);
        if self.monotone && n > 0 {
            if let Some(runs) = f_rel.band_runs() {
                for a in 0..n {
                    let (lo_t, hi_t) = runs[self.assign[a]];
                    // assign is sorted, so a target interval pulls back to an
                    // index interval.
                    let lo = self.assign.partition_point(|&t| t < lo_t);
                    let hi = self.assign.partition_point(|&t| t <= hi_t);
                    if lo < hi {
                        b.insert_row_range(a, lo, hi - 1)?;
                    }
                }
                return Ok(b.build());
            }
        }
        let mut fibers: Vec<Vec<u32>> = vec![Vec::new(); self.target.len()];
        for (s, &t) in self.assign.iter().enumerate() {
            fibers[t].push(s as u32);
        }
        for a in 0..n {
            let mut pending: Vec<(usize, usize)> = Vec::new();
            let row = f_rel.ball(self.assign[a]).expect("target index in range");
            for bt in row.iter() {
                for &s in &fibers[bt] {
                    pending.push((a, s as usize));
                }
            }
            for (x, y) in pending {
                b.insert(x, y)?;
            }
        }
        Ok(b.build())
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assign
            .iter()
            .enumerate()
            .map(|(s, &t)| format!("{}->{}", self.source.label(s), self.target.label(t)))
            .collect();
        write!(f, "PointMap[{}]", parts.join(" "))
    }
}

/// A monotone table `source scale -> target scale`.
#[derive(Clone, PartialEq, Eq)]
pub struct ControlFunction {
    table: Vec<usize>,
}

impl ControlFunction {
    pub(crate) fn new(table: Vec<usize>) -> Self {
        debug_assert!(table.windows(2).all(|w| w[0] <= w[1]), "controls are monotone");
        ControlFunction { table }
    }

    pub fn get(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.table)
    }
}

/// Why a control does not exist: the scale with no counterpart, the offending
/// source pair, and where that pair lands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlFailure {
    pub scale: usize,
    pub pair: (usize, usize),
    pub image_pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ControlOutcome {
    Controlled(ControlFunction),
    Uncontrolled(ControlFailure),
}

impl ControlOutcome {
    pub fn is_controlled(&self) -> bool {
        matches!(self, ControlOutcome::Controlled(_))
    }

    pub fn control(&self) -> Option<&ControlFunction> {
        match self {
            ControlOutcome::Controlled(c) => Some(c),
            ControlOutcome::Uncontrolled(_) => None,
        }
    }
}

/// Lazily materialized pullbacks of a target chain through one map.
struct Pullbacks<'a> {
    map: &'a PointMap,
    target: &'a CoarseSpace,
    cache: Vec<Option<Relation>>,
}

impl<'a> Pullbacks<'a> {
    fn new(map: &'a PointMap, target: &'a CoarseSpace) -> Self {
        Pullbacks { map, target, cache: vec![None; target.chain_len()] }
    }

    fn get(&mut self, j: usize) -> &Relation {
        if self.cache[j].is_none() {
            let pulled = self.map.pull_back(self.target.element(j)).expect("grounds checked by caller");
            self.cache[j] = Some(pulled);
        }
        self.cache[j].as_ref().expect("just filled")
    }
}

/// Scale at which `f` and `g` are close: the membership scale of the pair
/// graph `{(f(k), g(k))}` in the target structure.
pub fn closeness_scale(f: &PointMap, g: &PointMap, target: &CoarseSpace) -> Result<Scale> {
    if !f.source().is_same(g.source()) {
        return Err(CoarseError::GroundMismatch { left: f.source().len(), right: g.source().len() });
    }
    if !f.target().is_same(target.ground()) || !g.target().is_same(target.ground()) {
        return Err(CoarseError::GroundMismatch { left: f.target().len(), right: target.ground().len() });
    }
    let mut b = RelationBuilder::new(target.ground());
    for k in 0..f.source().len() {
        b.insert(f.apply(k), g.apply(k))?;
    }
    target.membership_scale(&b.build())
}

fn check_map_spaces(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<()> {
    if !f.source().is_same(x.ground()) {
        return Err(CoarseError::GroundMismatch { left: f.source().len(), right: x.ground().len() });
    }
    if !f.target().is_same(y.ground()) {
        return Err(CoarseError::GroundMismatch { left: f.target().len(), right: y.ground().len() });
    }
    Ok(())
}

fn bornologous_with(pulls: &mut Pullbacks<'_>, f: &PointMap, x: &CoarseSpace) -> ControlOutcome {
    let top_j = pulls.target.chain_len() - 1;
    let mut table = Vec::with_capacity(x.chain_len());
    let mut j = 0usize;
    for i in 0..x.chain_len() {
        let e = x.element(i);
        loop {
            if e.is_subset_of(pulls.get(j)).expect("same ground") {
                table.push(j);
                break;
            }
            if j == top_j {
                let pair = e
                    .first_pair_outside(pulls.get(top_j))
                    .expect("same ground")
                    .expect("subset check failed");
                return ControlOutcome::Uncontrolled(ControlFailure {
                    scale: i,
                    pair,
                    image_pair: (f.apply(pair.0), f.apply(pair.1)),
                });
            }
            j += 1;
        }
    }
    ControlOutcome::Controlled(ControlFunction::new(table))
}

fn effectively_proper_with(pulls: &mut Pullbacks<'_>, f: &PointMap, x: &CoarseSpace) -> ControlOutcome {
    let top_i = x.chain_len() - 1;
    let mut table = Vec::with_capacity(pulls.target.chain_len());
    let mut i = 0usize;
    for j in 0..pulls.target.chain_len() {
        let pulled = pulls.get(j).clone();
        loop {
            if pulled.is_subset_of(x.element(i)).expect("same ground") {
                table.push(i);
                break;
            }
            if i == top_i {
                let pair = pulled
                    .first_pair_outside(x.element(top_i))
                    .expect("same ground")
                    .expect("subset check failed");
                return ControlOutcome::Uncontrolled(ControlFailure {
                    scale: j,
                    pair,
                    image_pair: (f.apply(pair.0), f.apply(pair.1)),
                });
            }
            i += 1;
        }
    }
    ControlOutcome::Controlled(ControlFunction::new(table))
}

/// For each source scale `i`, the least target scale containing
/// `(f x f)(E_i)`; or the first `i` with none, witnessed.
pub fn bornologous_control(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<ControlOutcome> {
    check_map_spaces(f, x, y)?;
    let mut pulls = Pullbacks::new(f, y);
    Ok(bornologous_with(&mut pulls, f, x))
}

/// For each target scale `j`, the least source scale containing
/// `(f x f)^{-1}(F_j)`; or the first `j` with none, witnessed.
pub fn effectively_proper_control(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<ControlOutcome> {
    check_map_spaces(f, x, y)?;
    let mut pulls = Pullbacks::new(f, y);
    Ok(effectively_proper_with(&mut pulls, f, x))
}

/// The full classification record for one map.
#[derive(Clone, Debug)]
pub struct MapReport {
    pub bornologous: ControlOutcome,
    pub effectively_proper: ControlOutcome,
    pub injective: bool,
    pub surjective: bool,
    /// Scale at which the image is large in the target, if any.
    pub image_largeness: Scale,
    /// Closeness to the identity, when source and target coincide.
    pub identity_closeness: Option<Scale>,
}

impl MapReport {
    pub fn is_bornologous(&self) -> bool {
        self.bornologous.is_controlled()
    }

    pub fn is_effectively_proper(&self) -> bool {
        self.effectively_proper.is_controlled()
    }

    pub fn is_bijective(&self) -> bool {
        self.injective && self.surjective
    }

    pub fn is_asymorphism(&self) -> bool {
        self.is_bijective() && self.is_bornologous() && self.is_effectively_proper()
    }

    pub fn is_asymorphic_embedding(&self) -> bool {
        self.injective && self.is_bornologous() && self.is_effectively_proper()
    }

    pub fn is_coarse_equivalence(&self) -> bool {
        self.is_bornologous() && self.is_effectively_proper() && self.image_largeness.is_some()
    }
}

/// Classifies `f : X -> Y` in one pass; both control directions share the
/// pullback cache.
pub fn classify(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<MapReport> {
    check_map_spaces(f, x, y)?;
    let mut pulls = Pullbacks::new(f, y);
    let bornologous = bornologous_with(&mut pulls, f, x);
    let effectively_proper = effectively_proper_with(&mut pulls, f, x);
    let image_largeness = y.largeness_scale(&f.image())?;
    let identity_closeness = if x.ground().is_same(y.ground()) {
        Some(closeness_scale(f, &PointMap::identity(y.ground()), y)?)
    } else {
        None
    };
    Ok(MapReport {
        bornologous,
        effectively_proper,
        injective: f.is_injective(),
        surjective: f.is_surjective(),
        image_largeness,
        identity_closeness,
    })
}

/// The two-sided coarse inverse verdict for a candidate pair `(f, g)`.
#[derive(Clone, Debug)]
pub struct CoarseInverseReport {
    pub forward_control: ControlOutcome,
    pub backward_control: ControlOutcome,
    /// Closeness of `g o f` to the identity on `X`.
    pub left_closeness: Scale,
    /// Closeness of `f o g` to the identity on `Y`.
    pub right_closeness: Scale,
}

impl CoarseInverseReport {
    pub fn verified(&self) -> bool {
        self.forward_control.is_controlled()
            && self.backward_control.is_controlled()
            && self.left_closeness.is_some()
            && self.right_closeness.is_some()
    }
}

/// Checks that `g` coarse-inverts `f`: both bornologous, both compositions
/// close to the identity.
pub fn coarse_inverse_check(
    f: &PointMap,
    g: &PointMap,
    x: &CoarseSpace,
    y: &CoarseSpace,
) -> Result<CoarseInverseReport> {
    check_map_spaces(f, x, y)?;
    check_map_spaces(g, y, x)?;
    let forward_control = bornologous_control(f, x, y)?;
    let backward_control = bornologous_control(g, y, x)?;
    let left_closeness = closeness_scale(&f.then(g)?, &PointMap::identity(x.ground()), x)?;
    let right_closeness = closeness_scale(&g.then(f)?, &PointMap::identity(y.ground()), y)?;
    Ok(CoarseInverseReport { forward_control, backward_control, left_closeness, right_closeness })
}

/// The canonical coarse inverse candidate: when `f(X)` is large at scale `s`,
/// send each `y` to the first source point whose image is `E_s`-near `y`.
/// `None` when the image is not large.
pub fn coarse_inverse_candidate(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<Option<PointMap>> {
    check_map_spaces(f, x, y)?;
    let Some(s) = y.largeness_scale(&f.image())? else {
        return Ok(None);
    };
    let e = y.element(s);
    let mut assign = Vec::with_capacity(y.ground().len());
    for yy in 0..y.ground().len() {
        let near = (0..x.ground().len())
            .find(|&xx| e.contains(yy, f.apply(xx)))
            .expect("largeness at scale s guarantees a preimage nearby");
        assign.push(near);
    }
    Ok(Some(PointMap::new(y.ground(), x.ground(), assign)?))
}

/// Asymorphism via "bijective and bornologous both ways".
pub fn asymorphism_via_inverse_controls(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<bool> {
    check_map_spaces(f, x, y)?;
    if !f.is_bijective() {
        return Ok(false);
    }
    let inv = f.inverse()?;
    Ok(bornologous_control(f, x, y)?.is_controlled() && bornologous_control(&inv, y, x)?.is_controlled())
}

/// Coarse equivalence via "a coarse inverse exists".
pub fn coarse_equivalence_via_inverse(f: &PointMap, x: &CoarseSpace, y: &CoarseSpace) -> Result<bool> {
    let Some(g) = coarse_inverse_candidate(f, x, y)? else {
        return Ok(false);
    };
    Ok(coarse_inverse_check(f, &g, x, y)?.verified())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationBuilder;

    fn window(n: usize, scales: &[f64]) -> CoarseSpace {
        let g = GroundSet::numbered(n);
        let dist: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| (a as f64 - b as f64).abs()).collect())
            .collect();
        CoarseSpace::from_metric(&g, &dist, scales).unwrap()
    }

    fn split_space() -> CoarseSpace {
        // Two components at infinite distance: {0,1} and {2,3}.
        let g = GroundSet::numbered(4);
        let inf = f64::INFINITY;
        let dist = vec![
            vec![0.0, 1.0, inf, inf],
            vec![1.0, 0.0, inf, inf],
            vec![inf, inf, 0.0, 1.0],
            vec![inf, inf, 1.0, 0.0],
        ];
        CoarseSpace::from_metric(&g, &dist, &[2.0]).unwrap()
    }

    #[test]
    fn identity_has_identity_controls() {
        let x = window(9, &[1.0, 2.0, 4.0, 8.0]);
        let id = PointMap::identity(x.ground());
        let report = classify(&id, &x, &x).unwrap();
        assert!(report.is_asymorphism());
        assert!(report.is_coarse_equivalence());
        assert!(report.bornologous.control().unwrap().is_identity());
        assert!(report.effectively_proper.control().unwrap().is_identity());
        assert_eq!(report.identity_closeness, Some(Some(0)));
    }

    #[test]
    fn shift_by_one_is_close_at_the_scale_containing_distance_one() {
        let x = window(9, &[1.0, 2.0, 4.0, 8.0]);
        let id = PointMap::identity(x.ground());
        let n = x.ground().len();
        let shifted = PointMap::new(
            x.ground(),
            x.ground(),
            (0..n).map(|i| (i + 1).min(n - 1)).collect(),
        )
        .unwrap();
        // Distance-1 pairs first appear in the strip of scale 2, index 1.
        assert_eq!(closeness_scale(&id, &shifted, &x).unwrap(), Some(1));
        assert_eq!(closeness_scale(&shifted, &id, &x).unwrap(), Some(1));
    }

    #[test]
    fn constants_into_different_components_are_never_close() {
        let y = split_space();
        let g = GroundSet::numbered(2);
        let x = CoarseSpace::discrete(&g);
        let c0 = PointMap::new(&g, y.ground(), vec![0, 0]).unwrap();
        let c3 = PointMap::new(&g, y.ground(), vec![3, 3]).unwrap();
        assert_eq!(closeness_scale(&c0, &c3, &y).unwrap(), None);
        assert_eq!(closeness_scale(&c0, &c0, &y).unwrap(), Some(0));
        let _ = x;
    }

    #[test]
    fn bornologous_failure_carries_scale_and_image_pair() {
        let y = split_space();
        let g = GroundSet::numbered(2);
        let x = CoarseSpace::bounded(&g);
        // 0 and 1 are bounded together but map across the infinite gap.
        let f = PointMap::new(&g, y.ground(), vec![0, 3]).unwrap();
        match bornologous_control(&f, &x, &y).unwrap() {
            ControlOutcome::Uncontrolled(fail) => {
                assert_eq!(fail.scale, 0);
                assert_eq!(fail.image_pair, (0, 3));
            }
            ControlOutcome::Controlled(_) => panic!("expected failure"),
        }
    }

    #[test]
    fn constant_map_from_split_space_is_not_effectively_proper() {
        let x = split_space();
        let g = GroundSet::numbered(1);
        let y = CoarseSpace::bounded(&g);
        let f = PointMap::new(x.ground(), &g, vec![0, 0, 0, 0]).unwrap();
        match effectively_proper_control(&f, &x, &y).unwrap() {
            ControlOutcome::Uncontrolled(fail) => {
                assert_eq!(fail.scale, 0);
                // The witness pair crosses the infinite gap.
                assert!((fail.pair.0 < 2) != (fail.pair.1 < 2));
            }
            ControlOutcome::Controlled(_) => panic!("expected failure"),
        }
    }

    #[test]
    fn pull_back_matches_nested_loop_oracle() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(23);
        for round in 0..120 {
            let ns = rng.random_range(1..12);
            let nt = rng.random_range(1..12);
            let source = GroundSet::numbered(ns);
            let target = GroundSet::numbered(nt);
            let monotone = round % 2 == 0;
            let mut assign: Vec<usize> = (0..ns).map(|_| rng.random_range(0..nt)).collect();
            if monotone {
                assign.sort_unstable();
            }
            let f = PointMap::new(&source, &target, assign).unwrap();
            // Alternate between banded strips and scatter relations.
            let rel = if round % 2 == 0 {
                let w = rng.random_range(0..nt);
                let mut b = RelationBuilder::new(&target);
                for a in 0..nt {
                    b.insert_row_range(a, a.saturating_sub(w), (a + w).min(nt - 1)).unwrap();
                }
                b.build()
            } else {
                let mut b = RelationBuilder::new(&target);
                for _ in 0..rng.random_range(0..20) {
                    b.insert(rng.random_range(0..nt), rng.random_range(0..nt)).unwrap();
                }
                b.build()
            };
            let pulled = f.pull_back(&rel).unwrap();
            let mut oracle = RelationBuilder::new(&source);
            for a in 0..ns {
                for b in 0..ns {
                    if rel.contains(f.apply(a), f.apply(b)) {
                        oracle.insert(a, b).unwrap();
                    }
                }
            }
            assert_eq!(pulled, oracle.build());
        }
    }

    #[test]
    fn pushforward_and_pullback_are_adjoint() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(31);
        let source = GroundSet::numbered(5);
        let target = GroundSet::numbered(6);
        for _ in 0..200 {
            let f = PointMap::new(
                &source,
                &target,
                (0..5).map(|_| rng.random_range(0..6)).collect(),
            )
            .unwrap();
            let mut be = RelationBuilder::new(&source);
            for _ in 0..rng.random_range(0..8) {
                be.insert(rng.random_range(0..5), rng.random_range(0..5)).unwrap();
            }
            let e = be.build();
            let mut bf = RelationBuilder::new(&target);
            for _ in 0..rng.random_range(0..10) {
                bf.insert(rng.random_range(0..6), rng.random_range(0..6)).unwrap();
            }
            let frel = bf.build();
            let lhs = f.push_forward(&e).unwrap().is_subset_of(&frel).unwrap();
            let rhs = e.is_subset_of(&f.pull_back(&frel).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn halving_the_window_is_a_coarse_equivalence() {
        let x = window(8, &[1.0, 2.0, 4.0]);
        let y = window(4, &[1.0, 2.0, 4.0]);
        let f = PointMap::new(x.ground(), y.ground(), (0..8).map(|i| i / 2).collect()).unwrap();
        let report = classify(&f, &x, &y).unwrap();
        assert!(report.is_coarse_equivalence());
        assert!(!report.injective);
        assert!(report.surjective);
        let g = coarse_inverse_candidate(&f, &x, &y).unwrap().expect("image is large");
        assert!(coarse_inverse_check(&f, &g, &x, &y).unwrap().verified());
        assert!(coarse_equivalence_via_inverse(&f, &x, &y).unwrap());
    }

    #[test]
    fn asymorphism_definitions_agree_on_the_reflection() {
        let x = window(9, &[1.0, 3.0]);
        let refl = PointMap::new(x.ground(), x.ground(), (0..9).rev().collect()).unwrap();
        let report = classify(&refl, &x, &x).unwrap();
        assert!(report.is_asymorphism());
        assert!(asymorphism_via_inverse_controls(&refl, &x, &x).unwrap());
    }

    #[test]
    fn composition_control_is_bounded_by_the_composed_tables() {
        let x = window(16, &[1.0, 2.0, 4.0]);
        let y = window(8, &[1.0, 2.0, 4.0]);
        let z = window(4, &[1.0, 2.0, 4.0]);
        let f = PointMap::new(x.ground(), y.ground(), (0..16).map(|i| i / 2).collect()).unwrap();
        let g = PointMap::new(y.ground(), z.ground(), (0..8).map(|i| i / 2).collect()).unwrap();
        let cf = bornologous_control(&f, &x, &y).unwrap().control().unwrap().clone();
        let cg = bornologous_control(&g, &y, &z).unwrap().control().unwrap().clone();
        let cfg = bornologous_control(&f.then(&g).unwrap(), &x, &z)
            .unwrap()
            .control()
            .unwrap()
            .clone();
        for i in 0..cfg.len() {
            assert!(cfg.get(i) <= cg.get(cf.get(i)));
        }
    }

    #[test]
    fn empty_source_is_harmless() {
        let empty = GroundSet::new(vec![]).unwrap();
        let x = CoarseSpace::discrete(&empty);
        let y = window(4, &[1.0, 2.0]);
        let f = PointMap::new(&empty, y.ground(), vec![]).unwrap();
        let report = classify(&f, &x, &y).unwrap();
        assert!(report.is_bornologous());
        assert!(report.is_effectively_proper());
        assert_eq!(report.image_largeness, None);
    }
}
