//! Coarse spaces as filtered chains of entourages.
//!
//! On a finite ground set every coarse structure is the downward closure of a
//! single equivalence relation, so what a [`CoarseSpace`] actually records is
//! the *filtration*: a chain `E_0 <= E_1 <= ... <= E_k` of symmetric,
//! diagonal-containing relations whose top is composition-closed. Scales are
//! chain indices; a relation "belongs" to the space at the least index that
//! contains it, and [`Scale`] is `None` when no index does.
//!
//! All constructors funnel through the same normalization: symmetrize and add
//! the diagonal, take prefix unions (dropping duplicates), then append
//! compositions of the top with itself until it becomes an equivalence.

use std::fmt;

use crate::error::{CoarseError, Result};
use crate::relation::{GroundSet, PointSet, Relation, RelationBuilder};

/// A chain index, or `None` for "not an entourage of this structure".
pub type Scale = Option<usize>;

/// `<=` on scales where `None` behaves as plus infinity.
pub fn scale_le(a: Scale, b: Scale) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

/// Maximum of two scales where `None` behaves as plus infinity.
pub fn scale_max(a: Scale, b: Scale) -> Scale {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

/// How a space was constructed. Product spaces remember their factor sizes so
/// dimension-witness templates can reconstruct coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Metric,
    Discrete,
    Bounded,
    Derived,
    Product { left: usize, right: usize },
}

/// A chain invariant violation, with the witness that breaks it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceViolation {
    MissingDiagonal { point: usize },
    Asymmetric { index: usize, pair: (usize, usize) },
    NotMonotone { index: usize, pair: (usize, usize) },
    TopNotClosed { pair: (usize, usize) },
}

impl fmt::Display for SpaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceViolation::MissingDiagonal { point } => {
                write!(f, "E_0 misses the diagonal pair at point {point}")
            }
            SpaceViolation::Asymmetric { index, pair } => {
                write!(f, "E_{index} contains ({}, {}) but not its inverse", pair.0, pair.1)
            }
            SpaceViolation::NotMonotone { index, pair } => {
                write!(f, "E_{index} contains ({}, {}) but E_{} does not", pair.0, pair.1, index + 1)
            }
            SpaceViolation::TopNotClosed { pair } => {
                write!(f, "top o top reaches ({}, {}) outside the top", pair.0, pair.1)
            }
        }
    }
}

#[derive(Clone)]
pub struct CoarseSpace {
    ground: GroundSet,
    chain: Vec<Relation>,
    provenance: Provenance,
}

impl CoarseSpace {
    /// Normalizes arbitrary generators into a valid chain: each generator is
    /// symmetrized and given the diagonal, chain element `i` is the union of
    /// the first `i+1` normalized generators (duplicates dropped), and
    /// compositions of the top with itself are appended to a fixed point.
    pub fn from_generators(ground: &GroundSet, generators: &[Relation]) -> Result<Self> {
        Self::normalized(ground, generators, Provenance::Derived)
    }

    pub(crate) fn normalized(ground: &GroundSet, generators: &[Relation], provenance: Provenance) -> Result<Self> {
        if generators.is_empty() {
            return Err(CoarseError::EmptyChain);
        }
        let diagonal = Relation::diagonal(ground);
        let mut chain: Vec<Relation> = Vec::with_capacity(generators.len());
        for gen in generators {
            if !gen.ground().is_same(ground) {
                return Err(CoarseError::GroundMismatch { left: ground.len(), right: gen.ground().len() });
            }
            let sym = gen.union(&gen.inverse())?.union(&diagonal)?;
            let next = match chain.last() {
                Some(prev) => prev.union(&sym)?,
                None => sym,
            };
            if chain.last() != Some(&next) {
                chain.push(next);
            }
        }
        // The top is symmetric and reflexive, so squaring strictly grows it
        // until it is an equivalence; that equivalence is the principal
        // maximum of the structure.
        loop {
            let top = chain.last().expect("chain is nonempty");
            if top.is_equivalence() {
                break;
            }
            let next = top.compose(top)?;
            chain.push(next);
        }
        let space = CoarseSpace { ground: ground.clone(), chain, provenance };
        debug_assert_eq!(space.validate(), Ok(()));
        Ok(space)
    }

    /// Takes a chain exactly as given, verifying the invariants instead of
    /// normalizing. Violations are reported with their witness.
    pub fn from_chain(chain: Vec<Relation>, provenance: Provenance) -> Result<Self> {
        let space = Self::from_chain_unvalidated(chain, provenance)?;
        space.validate().map_err(|v| CoarseError::ChainInvariant(v.to_string()))?;
        Ok(space)
    }

    /// Structural checks only; `validate` reports invariant violations as
    /// values. This is the lenient path for checkers that want to *report* a
    /// broken chain rather than refuse to hold it.
    pub fn from_chain_unvalidated(chain: Vec<Relation>, provenance: Provenance) -> Result<Self> {
        let first = chain.first().ok_or(CoarseError::EmptyChain)?;
        let ground = first.ground().clone();
        for e in &chain {
            if !e.ground().is_same(&ground) {
                return Err(CoarseError::GroundMismatch { left: ground.len(), right: e.ground().len() });
            }
        }
        Ok(CoarseSpace { ground, chain, provenance })
    }

    /// Open-ball strips `S_r = {(a, b) : dist(a, b) < r}` of an extended
    /// pseudo-metric, one per scale, then the usual normalization. The matrix
    /// must be symmetric with zero diagonal and satisfy the triangle
    /// inequality (`inf` entries allowed); scales must be strictly ascending
    /// and positive. Validation enumerates triples, so this constructor is
    /// meant for explicitly tabulated instances, not bulk geometry.
    pub fn from_metric(ground: &GroundSet, dist: &[Vec<f64>], scales: &[f64]) -> Result<Self> {
        let n = ground.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(CoarseError::MetricShape {
                rows: dist.len(),
                cols: dist.first().map_or(0, |r| r.len()),
                size: n,
            });
        }
        for a in 0..n {
            if dist[a][a] != 0.0 {
                return Err(CoarseError::MetricDiagonal { a, value: dist[a][a] });
            }
            for b in 0..n {
                let d = dist[a][b];
                if d < 0.0 {
                    return Err(CoarseError::MetricNegative { a, b, value: d });
                }
                if d != dist[b][a] {
                    return Err(CoarseError::MetricAsymmetric { a, b, ab: d, ba: dist[b][a] });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if dist[a][b] > dist[a][c] + dist[c][b] {
                        return Err(CoarseError::MetricTriangle {
                            a,
                            b,
                            c,
                            ab: dist[a][b],
                            ac: dist[a][c],
                            cb: dist[c][b],
                        });
                    }
                }
            }
        }
        check_scales(scales)?;
        let mut strips = Vec::with_capacity(scales.len());
        for &r in scales {
            let mut b = RelationBuilder::new(ground);
            for x in 0..n {
                for y in 0..n {
                    if dist[x][y] < r {
                        b.insert(x, y)?;
                    }
                }
            }
            strips.push(b.build());
        }
        Self::normalized(ground, &strips, Provenance::Metric)
    }

    /// The diagonal-only structure.
    pub fn discrete(ground: &GroundSet) -> Self {
        CoarseSpace {
            ground: ground.clone(),
            chain: vec![Relation::diagonal(ground)],
            provenance: Provenance::Discrete,
        }
    }

    /// The everything-at-once structure `M x M`.
    pub fn bounded(ground: &GroundSet) -> Self {
        CoarseSpace {
            ground: ground.clone(),
            chain: vec![Relation::full(ground)],
            provenance: Provenance::Bounded,
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn chain(&self) -> &[Relation] {
        &self.chain
    }

    pub fn chain_len(&self) -> usize {
        self.chain.len()
    }

    pub fn element(&self, i: usize) -> &Relation {
        &self.chain[i]
    }

    pub fn top(&self) -> &Relation {
        self.chain.last().expect("chain is nonempty")
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Checks the four chain invariants, reporting the first violation:
    /// diagonal inside `E_0`, symmetry of every element, monotonicity of the
    /// chain, and `top o top = top`.
    pub fn validate(&self) -> std::result::Result<(), SpaceViolation> {
        let e0 = &self.chain[0];
        for a in 0..self.ground.len() {
            if !e0.contains(a, a) {
                return Err(SpaceViolation::MissingDiagonal { point: a });
            }
        }
        for (i, e) in self.chain.iter().enumerate() {
            if let Some(pair) = e.first_asymmetric_pair() {
                return Err(SpaceViolation::Asymmetric { index: i, pair });
            }
        }
        for i in 0..self.chain.len() - 1 {
            if let Some(pair) = self.chain[i]
                .first_pair_outside(&self.chain[i + 1])
                .expect("chain elements share the ground")
            {
                return Err(SpaceViolation::NotMonotone { index: i, pair });
            }
        }
        let top = self.top();
        let squared = top.compose(top).expect("top composes with itself");
        if let Some(pair) = squared.first_pair_outside(top).expect("same ground") {
            return Err(SpaceViolation::TopNotClosed { pair });
        }
        Ok(())
    }

    /// Least chain index containing `e`, or `None` if even the top does not.
    pub fn membership_scale(&self, e: &Relation) -> Result<Scale> {
        if !e.ground().is_same(&self.ground) {
            return Err(CoarseError::GroundMismatch { left: self.ground.len(), right: e.ground().len() });
        }
        let k = self
            .chain
            .partition_point(|element| !e.is_subset_of(element).expect("same ground"));
        Ok((k < self.chain.len()).then_some(k))
    }

    /// Least chain index whose image of `a` is the whole ground set: the
    /// scale at which `a` is large. `None` if no scale suffices.
    pub fn largeness_scale(&self, a: &PointSet) -> Result<Scale> {
        if !a.ground().is_same(&self.ground) {
            return Err(CoarseError::GroundMismatch { left: self.ground.len(), right: a.ground().len() });
        }
        let full = PointSet::full(&self.ground);
        let k = self.chain.partition_point(|element| {
            element.image(a).expect("same ground") != full
        });
        Ok((k < self.chain.len()).then_some(k))
    }

    /// Same ground and same principal maximum: the two chains describe the
    /// same collection of entourages (scales may differ).
    pub fn membership_equivalent(&self, other: &CoarseSpace) -> bool {
        self.ground.is_same(&other.ground) && self.top() == other.top()
    }

    /// The restriction to `subset`, on a fresh ground set, renormalized.
    pub fn subspace(&self, subset: &PointSet) -> Result<CoarseSpace> {
        if !subset.ground().is_same(&self.ground) {
            return Err(CoarseError::GroundMismatch { left: self.ground.len(), right: subset.ground().len() });
        }
        let members: Vec<usize> = subset.iter().collect();
        let labels: Vec<String> = members.iter().map(|&i| self.ground.label(i).to_string()).collect();
        let sub_ground = GroundSet::new(labels)?;
        let mut back = vec![usize::MAX; self.ground.len()];
        for (new, &old) in members.iter().enumerate() {
            back[old] = new;
        }
        let mut restricted = Vec::with_capacity(self.chain.len());
        for e in &self.chain {
            let mut b = RelationBuilder::new(&sub_ground);
            e.for_each_pair(|x, y| {
                if back[x] != usize::MAX && back[y] != usize::MAX {
                    b.insert(back[x], back[y]).expect("reindexed points are in range");
                }
            });
            restricted.push(b.build());
        }
        Self::normalized(&sub_ground, &restricted, Provenance::Derived)
    }

    /// The product space on pairs `(a, b)`, chain element `i` relating two
    /// pairs when both coordinates are related at scale `i` (shorter chains
    /// repeat their top).
    pub fn product(&self, other: &CoarseSpace) -> Result<CoarseSpace> {
        let (nx, ny) = (self.ground.len(), other.ground.len());
        let labels = self
            .ground
            .labels()
            .iter()
            .flat_map(|a| other.ground.labels().iter().map(move |b| format!("({a},{b})")))
            .collect();
        let ground = GroundSet::new(labels)?;
        let len = self.chain.len().max(other.chain.len());
        let mut combined = Vec::with_capacity(len);
        for i in 0..len {
            let e = &self.chain[i.min(self.chain.len() - 1)];
            let f = &other.chain[i.min(other.chain.len() - 1)];
            let mut b = RelationBuilder::new(&ground);
            e.for_each_pair(|a, a2| {
                f.for_each_pair(|c, c2| {
                    b.insert(a * ny + c, a2 * ny + c2).expect("product index in range");
                });
            });
            combined.push(b.build());
        }
        let _ = nx;
        Self::normalized(&ground, &combined, Provenance::Product { left: nx, right: ny })
    }

    /// The coarse disjoint union on tagged points `1:a`, `2:b`, chain element
    /// `i` the block union of the two element `i`s (shorter chains repeat
    /// their top). No cross pairs: the two parts stay at infinite distance.
    pub fn coproduct(&self, other: &CoarseSpace) -> Result<CoarseSpace> {
        let nx = self.ground.len();
        let labels = self
            .ground
            .labels()
            .iter()
            .map(|a| format!("1:{a}"))
            .chain(other.ground.labels().iter().map(|b| format!("2:{b}")))
            .collect();
        let ground = GroundSet::new(labels)?;
        let len = self.chain.len().max(other.chain.len());
        let mut combined = Vec::with_capacity(len);
        for i in 0..len {
            let e = &self.chain[i.min(self.chain.len() - 1)];
            let f = &other.chain[i.min(other.chain.len() - 1)];
            let mut b = RelationBuilder::new(&ground);
            e.for_each_pair(|a, a2| b.insert(a, a2).expect("left block in range"));
            f.for_each_pair(|c, c2| b.insert(nx + c, nx + c2).expect("right block in range"));
            combined.push(b.build());
        }
        Self::normalized(&ground, &combined, Provenance::Derived)
    }
}

impl fmt::Debug for CoarseSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CoarseSpace({} points, chain of {}, {:?})",
            self.ground.len(),
            self.chain.len(),
            self.provenance
        )
    }
}

pub(crate) fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(CoarseError::EmptyChain);
    }
    let ascending = scales.windows(2).all(|w| w[0] < w[1]);
    if !ascending || scales[0] <= 0.0 || scales.iter().any(|s| s.is_nan()) {
        return Err(CoarseError::BadScales);
    }
    Ok(())
}
