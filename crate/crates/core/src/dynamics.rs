//! Coarse-time dynamical systems: a coarse space, a finite time group
//! carrying an ideal chain, and one evolution map per group element.
//!
//! The identity and composition axioms are checked exactly, point by point;
//! the geometric axiom (each evolution map is an asymorphism) reuses the map
//! classifier. The time operation may be set-valued, in which case the
//! composite of two evolutions only has to land in the set of allowed
//! evolutions, witnessed per triple on failure.

use crate::error::{CoarseError, Result};
use crate::group::{FiniteGroup, IdealChain};
use crate::maps::{classify, MapReport, PointMap};
use crate::relation::{GroundSet, PointSet};
use crate::space::CoarseSpace;

/// The operation carried by a time group: the group law itself, or a
/// set-valued coarsening of it.
#[derive(Clone, Debug)]
pub enum TimeOp {
    Singleton,
    /// Row-major table of nonempty value sets, `a * order + b`.
    SetValued(Vec<PointSet>),
}

/// A finite group together with an ideal chain and a (possibly set-valued)
/// operation used by the composition axiom.
#[derive(Clone, Debug)]
pub struct TimeGroup {
    group: FiniteGroup,
    ideal: IdealChain,
    op: TimeOp,
}

impl TimeGroup {
    pub fn singleton(group: FiniteGroup, ideal: IdealChain) -> TimeGroup {
        TimeGroup { group, ideal, op: TimeOp::Singleton }
    }

    /// Validates the table shape, that every value set is nonempty, and the
    /// unit law `e * g` contains `g` and `g * e` contains `g`.
    pub fn set_valued(group: FiniteGroup, ideal: IdealChain, table: Vec<PointSet>) -> Result<TimeGroup> {
        let n = group.order();
        if table.len() != n * n {
            return Err(CoarseError::TableShape { rows: table.len(), cols: 1, size: n * n });
        }
        for (k, set) in table.iter().enumerate() {
            group.ground().check_same(set.ground())?;
            if set.is_empty() {
                return Err(CoarseError::EmptyOpValue { a: k / n, b: k % n });
            }
        }
        let e = group.identity();
        for g in 0..n {
            if !table[e * n + g].contains(g) {
                return Err(CoarseError::OpUnitLaw { side: "left", g });
            }
            if !table[g * n + e].contains(g) {
                return Err(CoarseError::OpUnitLaw { side: "right", g });
            }
        }
        Ok(TimeGroup { group, ideal, op: TimeOp::SetValued(table) })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn ideal(&self) -> &IdealChain {
        &self.ideal
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self.op, TimeOp::Singleton)
    }

    /// The value set of `a * b`.
    pub fn op_values(&self, a: usize, b: usize) -> PointSet {
        match &self.op {
            TimeOp::Singleton => {
                let mut s = PointSet::empty(self.group.ground());
                s.insert(self.group.op(a, b)).expect("products are in range");
                s
            }
            TimeOp::SetValued(table) => table[a * self.group.order() + b].clone(),
        }
    }

    /// The coarse space of the left-translated ideal chain.
    pub fn left_space(&self) -> Result<CoarseSpace> {
        self.ideal.left_space(&self.group)
    }
}

/// A coarse-time dynamical system.
#[derive(Clone, Debug)]
pub struct Cds {
    space: CoarseSpace,
    time: TimeGroup,
    evolution: Vec<PointMap>,
}

/// Witness for a failed composition axiom: the evolution of `g1` after the
/// evolution of `g2` sends `point` outside every allowed image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionWitness {
    pub g1: usize,
    pub g2: usize,
    pub point: usize,
}

/// Outcome of validating a system, with one witness per failed axiom.
#[derive(Clone, Debug)]
pub struct CdsReport {
    /// First point moved by the evolution of the identity, if any.
    pub identity_failure: Option<usize>,
    /// Classification of every evolution map against the system space.
    pub evolution_reports: Vec<MapReport>,
    pub composition_failure: Option<CompositionWitness>,
}

impl CdsReport {
    pub fn first_non_asymorphism(&self) -> Option<usize> {
        self.evolution_reports.iter().position(|r| !r.is_asymorphism())
    }

    pub fn is_valid(&self) -> bool {
        self.identity_failure.is_none()
            && self.first_non_asymorphism().is_none()
            && self.composition_failure.is_none()
    }
}

impl Cds {
    pub fn new(space: CoarseSpace, time: TimeGroup, evolution: Vec<PointMap>) -> Result<Cds> {
        if evolution.len() != time.group().order() {
            return Err(CoarseError::EvolutionShape {
                got: evolution.len(),
                expected: time.group().order(),
            });
        }
        for map in &evolution {
            space.ground().check_same(map.source())?;
            space.ground().check_same(map.target())?;
        }
        Ok(Cds { space, time, evolution })
    }

    pub fn space(&self) -> &CoarseSpace {
        &self.space
    }

    pub fn time(&self) -> &TimeGroup {
        &self.time
    }

    pub fn evolution(&self) -> &[PointMap] {
        &self.evolution
    }

    pub fn evolution_at(&self, g: usize) -> &PointMap {
        &self.evolution[g]
    }

    /// The orbit `{ evolution of g at m : g in G }`.
    pub fn orbit(&self, m: usize) -> Result<PointSet> {
        self.space.ground().check_index(m)?;
        let mut out = PointSet::empty(self.space.ground());
        for map in &self.evolution {
            out.insert(map.apply(m))?;
        }
        Ok(out)
    }

    /// Checks the three axioms. The identity and composition axioms are
    /// pointwise exact; the geometric axiom classifies every evolution map.
    pub fn validate(&self) -> Result<CdsReport> {
        let n = self.space.ground().len();
        let e = self.time.group().identity();
        let identity_failure = (0..n).find(|&m| self.evolution[e].apply(m) != m);
        let evolution_reports = self
            .evolution
            .iter()
            .map(|map| classify(map, &self.space, &self.space))
            .collect::<Result<Vec<_>>>()?;
        let order = self.time.group().order();
        let mut composition_failure = None;
        'outer: for g1 in 0..order {
            for g2 in 0..order {
                let allowed = self.time.op_values(g1, g2);
                for m in 0..n {
                    let composite = self.evolution[g1].apply(self.evolution[g2].apply(m));
                    let ok = allowed.iter().any(|g| self.evolution[g].apply(m) == composite);
                    if !ok {
                        composition_failure = Some(CompositionWitness { g1, g2, point: m });
                        break 'outer;
                    }
                }
            }
        }
        Ok(CdsReport { identity_failure, evolution_reports, composition_failure })
    }
}

/// A candidate conjugacy: a map of spaces and a map of time groups.
#[derive(Clone, Debug)]
pub struct Conjugacy {
    pub space_map: PointMap,
    pub time_map: PointMap,
}

/// Outcome of checking a conjugacy clause by clause.
#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    /// The space map classified between the system spaces.
    pub space_report: MapReport,
    /// The time map classified between the left ideal spaces.
    pub time_report: MapReport,
    /// First pair where the time map fails to carry the operation over.
    pub homomorphism_failure: Option<(usize, usize)>,
    /// First `(g, m)` where the intertwining identity fails.
    pub intertwining_failure: Option<(usize, usize)>,
}

impl ConjugacyReport {
    pub fn verified(&self) -> bool {
        self.space_report.is_asymorphism()
            && self.time_report.is_asymorphism()
            && self.homomorphism_failure.is_none()
            && self.intertwining_failure.is_none()
    }
}

/// Checks `c` as a conjugacy from `a` to `b`: space asymorphism, time
/// asymorphism on left ideal spaces, operation homomorphism (elementwise
/// image equality for set-valued operations), and exact intertwining.
pub fn check_conjugacy(a: &Cds, b: &Cds, c: &Conjugacy) -> Result<ConjugacyReport> {
    a.space().ground().check_same(c.space_map.source())?;
    b.space().ground().check_same(c.space_map.target())?;
    a.time().group().ground().check_same(c.time_map.source())?;
    b.time().group().ground().check_same(c.time_map.target())?;
    let space_report = classify(&c.space_map, a.space(), b.space())?;
    let time_report = classify(&c.time_map, &a.time().left_space()?, &b.time().left_space()?)?;
    let order = a.time().group().order();
    let h = &c.time_map;
    let mut homomorphism_failure = None;
    'hom: for g1 in 0..order {
        for g2 in 0..order {
            let carried = h.image_of(&a.time().op_values(g1, g2))?;
            let expected = b.time().op_values(h.apply(g1), h.apply(g2));
            if carried != expected {
                homomorphism_failure = Some((g1, g2));
                break 'hom;
            }
        }
    }
    let n = a.space().ground().len();
    let f = &c.space_map;
    let mut intertwining_failure = None;
    'twine: for g in 0..order {
        let pushed = &b.evolution()[h.apply(g)];
        let pulled = &a.evolution()[g];
        for m in 0..n {
            if pushed.apply(f.apply(m)) != f.apply(pulled.apply(m)) {
                intertwining_failure = Some((g, m));
                break 'twine;
            }
        }
    }
    Ok(ConjugacyReport { space_report, time_report, homomorphism_failure, intertwining_failure })
}

/// Inverts both maps; the result runs the other way and should be re-checked.
pub fn inverse_conjugacy(c: &Conjugacy) -> Result<Conjugacy> {
    Ok(Conjugacy { space_map: c.space_map.inverse()?, time_map: c.time_map.inverse()? })
}

/// Composes conjugacies `a -> b` and `b -> c` into `a -> c`.
pub fn compose_conjugacy(ab: &Conjugacy, bc: &Conjugacy) -> Result<Conjugacy> {
    if !ab.space_map.target().is_same(bc.space_map.source())
        || !ab.time_map.target().is_same(bc.time_map.source())
    {
        return Err(CoarseError::MiddleMismatch);
    }
    Ok(Conjugacy {
        space_map: ab.space_map.then(&bc.space_map)?,
        time_map: ab.time_map.then(&bc.time_map)?,
    })
}

/// First point whose orbit is not carried onto the orbit of its image, if
/// any: checks `f(orbit(m)) = orbit(f(m))` for every `m`.
pub fn orbit_preservation(a: &Cds, b: &Cds, f: &PointMap) -> Result<Option<usize>> {
    a.space().ground().check_same(f.source())?;
    b.space().ground().check_same(f.target())?;
    for m in 0..a.space().ground().len() {
        let carried = f.image_of(&a.orbit(m)?)?;
        if carried != b.orbit(f.apply(m))? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// The product of two time groups under tagged-pair labels, so elements read
/// `((1,g),(2,g'))`.
fn tagged_product_group(left: &FiniteGroup, right: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (left.order(), right.order());
    let mut labels = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            labels.push(format!(
                "((1,{}),(2,{}))",
                left.ground().label(a),
                right.ground().label(b)
            ));
        }
    }
    let ground = GroundSet::new(labels)?;
    let idx = |a: usize, b: usize| a * nb + b;
    let table: Vec<Vec<usize>> = (0..na * nb)
        .map(|p| {
            (0..na * nb)
                .map(|q| idx(left.op(p / nb, q / nb), right.op(p % nb, q % nb)))
                .collect()
        })
        .collect();
    FiniteGroup::new(&ground, &table)
}

/// Levelwise product of two ideal chains on the tagged product group, shorter
/// chains repeating their top, then renormalized.
fn product_ideal(
    product: &FiniteGroup,
    left: &IdealChain,
    right: &IdealChain,
    nb: usize,
) -> Result<IdealChain> {
    let levels = left.len().max(right.len());
    let mut sets = Vec::with_capacity(levels);
    for i in 0..levels {
        let la = left.ideal(i.min(left.len() - 1));
        let lb = right.ideal(i.min(right.len() - 1));
        let mut s = PointSet::empty(product.ground());
        for a in la.iter() {
            for b in lb.iter() {
                s.insert(a * nb + b)?;
            }
        }
        sets.push(s);
    }
    IdealChain::normalized(product, &sets)
}

fn product_time(left: &TimeGroup, right: &TimeGroup) -> Result<TimeGroup> {
    let group = tagged_product_group(left.group(), right.group())?;
    let nb = right.group().order();
    let ideal = product_ideal(&group, left.ideal(), right.ideal(), nb)?;
    if left.is_singleton() && right.is_singleton() {
        return Ok(TimeGroup::singleton(group, ideal));
    }
    let order = group.order();
    let mut table = Vec::with_capacity(order * order);
    for p in 0..order {
        for q in 0..order {
            let va = left.op_values(p / nb, q / nb);
            let vb = right.op_values(p % nb, q % nb);
            let mut s = PointSet::empty(group.ground());
            for a in va.iter() {
                for b in vb.iter() {
                    s.insert(a * nb + b)?;
                }
            }
            table.push(s);
        }
    }
    TimeGroup::set_valued(group, ideal, table)
}

/// The coproduct system: disjoint union of the spaces, tagged product of the
/// time groups, and blockwise evolution.
pub fn coproduct_cds(a: &Cds, b: &Cds) -> Result<Cds> {
    let space = a.space().coproduct(b.space())?;
    let time = product_time(a.time(), b.time())?;
    let (nx, nb) = (a.space().ground().len(), b.time().group().order());
    let mut evolution = Vec::with_capacity(time.group().order());
    for pair in 0..time.group().order() {
        let (g, h) = (pair / nb, pair % nb);
        let mut assign = Vec::with_capacity(space.ground().len());
        for i in 0..nx {
            assign.push(a.evolution_at(g).apply(i));
        }
        for j in 0..b.space().ground().len() {
            assign.push(nx + b.evolution_at(h).apply(j));
        }
        evolution.push(PointMap::new(space.ground(), space.ground(), assign)?);
    }
    Cds::new(space, time, evolution)
}

/// The blockwise coproduct of two conjugacies, expressed against the already
/// built coproduct systems `from` and `to`.
pub fn coproduct_conjugacy(
    left: &Conjugacy,
    right: &Conjugacy,
    from: &Cds,
    to: &Cds,
) -> Result<Conjugacy> {
    let nx_from = left.space_map.source().len();
    let nx_to = left.space_map.target().len();
    let mut space_assign = Vec::with_capacity(from.space().ground().len());
    for i in 0..nx_from {
        space_assign.push(left.space_map.apply(i));
    }
    for j in 0..right.space_map.source().len() {
        space_assign.push(nx_to + right.space_map.apply(j));
    }
    let space_map = PointMap::new(from.space().ground(), to.space().ground(), space_assign)?;
    let nb_from = right.time_map.source().len();
    let nb_to = right.time_map.target().len();
    let mut time_assign = Vec::with_capacity(from.time().group().order());
    for pair in 0..from.time().group().order() {
        let (g, h) = (pair / nb_from, pair % nb_from);
        time_assign.push(left.time_map.apply(g) * nb_to + right.time_map.apply(h));
    }
    let time_map = PointMap::new(
        from.time().group().ground(),
        to.time().group().ground(),
        time_assign,
    )?;
    Ok(Conjugacy { space_map, time_map })
}

/// Restricts a system to a subgroup of time and an invariant subset of
/// space. Set-valued operations must keep their values inside the subgroup.
pub fn sub_cds(cds: &Cds, subgroup: &PointSet, subset: &PointSet) -> Result<Cds> {
    let group = cds.time().group();
    group.check_subgroup(subgroup)?;
    for g1 in subgroup.iter() {
        for g2 in subgroup.iter() {
            if !cds.time().op_values(g1, g2).is_subset_of(subgroup)? {
                return Err(CoarseError::NotSubgroup {
                    reason: "set-valued products leave the subset",
                    witness: g1,
                });
            }
        }
    }
    for g in subgroup.iter() {
        for m in subset.iter() {
            if !subset.contains(cds.evolution_at(g).apply(m)) {
                return Err(CoarseError::NotInvariant { g, m });
            }
        }
    }
    let members: Vec<usize> = subgroup.iter().collect();
    let labels: Vec<String> = members.iter().map(|&g| group.ground().label(g).to_string()).collect();
    let sub_ground = GroundSet::new(labels)?;
    let pos = |g: usize| members.binary_search(&g).expect("value stays in the subgroup");
    let table: Vec<Vec<usize>> = members
        .iter()
        .map(|&a| members.iter().map(|&b| pos(group.op(a, b))).collect())
        .collect();
    let sub_group = FiniteGroup::new(&sub_ground, &table)?;
    let ideal_sets: Vec<PointSet> = cds
        .time()
        .ideal()
        .ideals()
        .iter()
        .map(|level| {
            let mut s = PointSet::empty(&sub_ground);
            for g in level.iter() {
                if subgroup.contains(g) {
                    s.insert(pos(g)).expect("position is in range");
                }
            }
            s
        })
        .collect();
    let sub_ideal = IdealChain::normalized(&sub_group, &ideal_sets)?;
    let sub_time = if cds.time().is_singleton() {
        TimeGroup::singleton(sub_group, sub_ideal)
    } else {
        let mut table = Vec::with_capacity(members.len() * members.len());
        for &a in &members {
            for &b in &members {
                let vals = cds.time().op_values(a, b);
                let mut s = PointSet::empty(&sub_ground);
                for v in vals.iter() {
                    s.insert(pos(v))?;
                }
                table.push(s);
            }
        }
        TimeGroup::set_valued(sub_group, sub_ideal, table)?
    };
    let sub_space = cds.space().subspace(subset)?;
    let points: Vec<usize> = subset.iter().collect();
    let point_pos = |m: usize| points.binary_search(&m).expect("subset is invariant");
    let evolution = members
        .iter()
        .map(|&g| {
            let assign = points
                .iter()
                .map(|&m| point_pos(cds.evolution_at(g).apply(m)))
                .collect();
            PointMap::new(sub_space.ground(), sub_space.ground(), assign)
        })
        .collect::<Result<Vec<_>>>()?;
    Cds::new(sub_space, sub_time, evolution)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Rotations of an `n`-cycle under cyclic time with the finitary chain.
    pub(crate) fn rotation_fixture(n: usize, prefix: &str) -> Cds {
        let labels: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let ground = GroundSet::new(labels).unwrap();
        let dist: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let d = (a as isize - b as isize).unsigned_abs();
                        d.min(n - d) as f64
                    })
                    .collect()
            })
            .collect();
        let space = CoarseSpace::from_metric(&ground, &dist, &[1.0, 2.0]).unwrap();
        let group = FiniteGroup::cyclic(n).unwrap();
        let ideal = IdealChain::finitary(&group);
        let time = TimeGroup::singleton(group, ideal);
        let evolution = (0..n)
            .map(|g| {
                PointMap::new(&ground, &ground, (0..n).map(|m| (m + g) % n).collect()).unwrap()
            })
            .collect();
        Cds::new(space, time, evolution).unwrap()
    }
}
