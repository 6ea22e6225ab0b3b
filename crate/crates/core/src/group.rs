//! Finite groups, ideal chains, and the coarse structures they induce.
//!
//! An ideal chain is the group-side mirror of an entourage chain: a monotone
//! chain of symmetric identity-containing subsets, closed under products at
//! the top. Translating an ideal on the left or on the right produces the two
//! canonical entourage chains on the group, related by inversion.

use crate::error::{CoarseError, Result};
use crate::maps::{ControlFailure, ControlOutcome, PointMap};
use crate::relation::{GroundSet, PointSet, Relation, RelationBuilder};
use crate::space::{CoarseSpace, Provenance};

/// A finite group given by a validated operation table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    ground: GroundSet,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates shape, range, associativity, identity and inverses.
    pub fn new(ground: &GroundSet, table: &[Vec<usize>]) -> Result<Self> {
        let n = ground.len();
        if table.len() != n {
            return Err(CoarseError::TableShape { rows: table.len(), cols: 0, size: n });
        }
        for row in table {
            if row.len() != n {
                return Err(CoarseError::TableShape { rows: n, cols: row.len(), size: n });
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(CoarseError::TableRange { a, b, value: v });
                }
                flat.push(v);
            }
        }
        let op = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if op(op(a, b), c) != op(a, op(b, c)) {
                        return Err(CoarseError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| op(e, a) == a && op(a, e) == a))
            .ok_or(CoarseError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| op(a, b) == identity && op(b, a) == identity)
                .ok_or(CoarseError::NoInverse { a })?;
            inverse.push(inv);
        }
        Ok(FiniteGroup { ground: ground.clone(), table: flat, identity, inverse })
    }

    /// The cyclic group of order `n` with elements labelled `0..n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoarseError::NoIdentity);
        }
        let ground = GroundSet::numbered(n);
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(&ground, &table)
    }

    /// The symmetric group on `n` letters; elements are labelled by their
    /// one-line notation, identity first.
    pub fn symmetric(n: usize) -> Result<Self> {
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for k in 0..n {
            let mut next = Vec::new();
            for p in &perms {
                for slot in 0..=k {
                    let mut q = p.clone();
                    q.insert(slot, k);
                    next.push(q);
                }
            }
            perms = next;
        }
        perms.sort();
        let labels: Vec<String> = perms
            .iter()
            .map(|p| p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        let ground = GroundSet::new(labels)?;
        let index_of = |p: &Vec<usize>| perms.binary_search(p).expect("all permutations listed");
        // p then q as functions: (p*q)(i) = p(q(i)).
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index_of(&(0..n).map(|i| p[q[i]]).collect()))
                    .collect()
            })
            .collect();
        FiniteGroup::new(&ground, &table)
    }

    /// The direct product with pair labels `(a,b)`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<FiniteGroup> {
        let (nx, ny) = (self.order(), other.order());
        let mut labels = Vec::with_capacity(nx * ny);
        for a in 0..nx {
            for b in 0..ny {
                labels.push(format!("({},{})", self.ground.label(a), other.ground.label(b)));
            }
        }
        let ground = GroundSet::new(labels)?;
        let idx = |a: usize, b: usize| a * ny + b;
        let table: Vec<Vec<usize>> = (0..nx * ny)
            .map(|p| {
                (0..nx * ny)
                    .map(|q| idx(self.op(p / ny, q / ny), other.op(p % ny, q % ny)))
                    .collect()
            })
            .collect();
        FiniteGroup::new(&ground, &table)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn order(&self) -> usize {
        self.ground.len()
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.op(a, b) == self.op(b, a)))
    }

    /// Checks closure, identity and inverses for `subset`.
    pub fn check_subgroup(&self, subset: &PointSet) -> Result<()> {
        self.ground.check_same(subset.ground())?;
        if !subset.contains(self.identity) {
            return Err(CoarseError::NotSubgroup { reason: "missing identity", witness: self.identity });
        }
        for a in subset.iter() {
            if !subset.contains(self.inv(a)) {
                return Err(CoarseError::NotSubgroup { reason: "not closed under inverse", witness: a });
            }
            for b in subset.iter() {
                if !subset.contains(self.op(a, b)) {
                    return Err(CoarseError::NotSubgroup { reason: "not closed under product", witness: a });
                }
            }
        }
        Ok(())
    }

    /// Left translation `a -> g a` as a point map on the group.
    pub fn left_translation(&self, g: usize) -> PointMap {
        let assign = (0..self.order()).map(|a| self.op(g, a)).collect();
        PointMap::new(&self.ground, &self.ground, assign).expect("table entries are in range")
    }

    /// The inversion map `a -> a^{-1}`.
    pub fn inversion(&self) -> PointMap {
        PointMap::new(&self.ground, &self.ground, self.inverse.clone()).expect("inverses are in range")
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.order())
    }
}

/// A normalized monotone chain of symmetric identity-containing subsets,
/// product-closed at the top.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealChain {
    ideals: Vec<PointSet>,
}

impl IdealChain {
    /// Normalizes raw generating sets: each level gains the identity and its
    /// inverses, levels accumulate as prefix unions with adjacent duplicates
    /// collapsed, and product closures of the top are appended until the top
    /// is a subgroup.
    pub fn normalized(group: &FiniteGroup, sets: &[PointSet]) -> Result<IdealChain> {
        if sets.is_empty() {
            return Err(CoarseError::EmptyIdeal);
        }
        for s in sets {
            group.ground().check_same(s.ground())?;
        }
        let mut ideals: Vec<PointSet> = Vec::with_capacity(sets.len());
        let mut running = PointSet::empty(group.ground());
        for s in sets {
            let mut level = running.union(s)?;
            level.insert(group.identity())?;
            for a in s.iter() {
                level.insert(group.inv(a))?;
            }
            if ideals.is_empty() || level != running {
                ideals.push(level.clone());
            }
            running = level;
        }
        loop {
            let top = ideals.last().expect("chain is nonempty");
            let mut product = top.clone();
            for a in top.iter() {
                for b in top.iter() {
                    product.insert(group.op(a, b))?;
                }
            }
            if &product == top {
                break;
            }
            ideals.push(product);
        }
        Ok(IdealChain { ideals })
    }

    /// Convenience constructor from label lists.
    pub fn normalized_from_labels(
        group: &FiniteGroup,
        levels: &[Vec<impl AsRef<str>>],
    ) -> Result<IdealChain> {
        let sets = levels
            .iter()
            .map(|lv| PointSet::from_labels(group.ground(), lv))
            .collect::<Result<Vec<_>>>()?;
        IdealChain::normalized(group, &sets)
    }

    /// The chain `({e}, G)`: bounded sets are the finite ones, which on a
    /// finite group collapses to at most two levels.
    pub fn finitary(group: &FiniteGroup) -> IdealChain {
        let mut e = PointSet::empty(group.ground());
        e.insert(group.identity()).expect("identity is in range");
        let full = PointSet::full(group.ground());
        IdealChain::normalized(group, &[e, full]).expect("canonical chain normalizes")
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn ideal(&self, i: usize) -> &PointSet {
        &self.ideals[i]
    }

    pub fn ideals(&self) -> &[PointSet] {
        &self.ideals
    }

    /// `E_i = { (a, b) : a^{-1} b in H_i }`, the union of `{g} x gH_i`.
    pub fn left_entourage(&self, group: &FiniteGroup, i: usize) -> Relation {
        let mut b = RelationBuilder::new(group.ground());
        for g in 0..group.order() {
            for h in self.ideals[i].iter() {
                b.insert(g, group.op(g, h)).expect("table entries are in range");
            }
        }
        b.build()
    }

    /// `E_i = { (a, b) : b a^{-1} in H_i }`, the union of `{g} x H_i g`.
    pub fn right_entourage(&self, group: &FiniteGroup, i: usize) -> Relation {
        let mut b = RelationBuilder::new(group.ground());
        for g in 0..group.order() {
            for h in self.ideals[i].iter() {
                b.insert(g, group.op(h, g)).expect("table entries are in range");
            }
        }
        b.build()
    }

    /// The coarse space of left-translated ideals. Normalization of the chain
    /// guarantees the strict space invariants hold.
    pub fn left_space(&self, group: &FiniteGroup) -> Result<CoarseSpace> {
        let chain: Vec<Relation> =
            (0..self.len()).map(|i| self.left_entourage(group, i)).collect();
        CoarseSpace::from_chain(chain, Provenance::Derived)
    }

    /// The coarse space of right-translated ideals.
    pub fn right_space(&self, group: &FiniteGroup) -> Result<CoarseSpace> {
        let chain: Vec<Relation> =
            (0..self.len()).map(|i| self.right_entourage(group, i)).collect();
        CoarseSpace::from_chain(chain, Provenance::Derived)
    }
}

/// For each scale `i`, the least `j` with `g . E_i <= E_j` for every group
/// element `g` at once: the action of left translations is controlled. The
/// left-translated chains satisfy this with the identity table; structures
/// that are not left-invariant fail with a witness.
pub fn left_invariance_control(group: &FiniteGroup, space: &CoarseSpace) -> Result<ControlOutcome> {
    group.ground().check_same(space.ground())?;
    let mut table = Vec::with_capacity(space.chain_len());
    for i in 0..space.chain_len() {
        let mut needed = 0usize;
        for g in 0..group.order() {
            let translated = group.left_translation(g).push_forward(space.element(i))?;
            match space.membership_scale(&translated)? {
                Some(j) => needed = needed.max(j),
                None => {
                    let pair = translated
                        .first_pair_outside(space.top())
                        .expect("same ground")
                        .expect("membership failed");
                    // Pull the witness back through the translation.
                    let gi = group.inv(g);
                    return Ok(ControlOutcome::Uncontrolled(ControlFailure {
                        scale: i,
                        pair: (group.op(gi, pair.0), group.op(gi, pair.1)),
                        image_pair: pair,
                    }));
                }
            }
        }
        table.push(needed);
    }
    Ok(ControlOutcome::Controlled(crate::maps::ControlFunction::new(table)))
}

/// Recovers an ideal chain from a coarse structure on the group by taking
/// balls of the identity, then renormalizing.
pub fn ideal_chain_of(group: &FiniteGroup, space: &CoarseSpace) -> Result<IdealChain> {
    group.ground().check_same(space.ground())?;
    let balls: Vec<PointSet> = (0..space.chain_len())
        .map(|i| space.element(i).ball(group.identity()))
        .collect::<Result<Vec<_>>>()?;
    IdealChain::normalized(group, &balls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::classify;

    fn z4_chain() -> (FiniteGroup, IdealChain) {
        let g = FiniteGroup::cyclic(4).unwrap();
        let chain = IdealChain::normalized_from_labels(&g, &[vec!["0"], vec!["0", "1"]]).unwrap();
        (g, chain)
    }

    #[test]
    fn cyclic_four_normalization_is_frozen() {
        let (g, chain) = z4_chain();
        // {0,1} gains the inverse 3, and the product closure of {0,1,3} is
        // everything.
        assert_eq!(chain.len(), 3);
        assert_eq!(chain.ideal(0).to_labels(), ["0"]);
        assert_eq!(chain.ideal(1).to_labels(), ["0", "1", "3"]);
        assert_eq!(chain.ideal(2).to_labels(), ["0", "1", "2", "3"]);
        let _ = g;
    }

    #[test]
    fn left_entourage_ball_is_the_translated_ideal() {
        let (g, chain) = z4_chain();
        let e1 = chain.left_entourage(&g, 1);
        // 2 + {0,1,3} = {2,3,1}.
        assert_eq!(e1.ball(2).unwrap().to_labels(), ["1", "2", "3"]);
        let r1 = chain.right_entourage(&g, 1);
        // Abelian group: both sides agree.
        assert_eq!(e1, r1);
    }

    #[test]
    fn left_spaces_validate_and_are_left_invariant() {
        let (g, chain) = z4_chain();
        let sp = chain.left_space(&g).unwrap();
        assert!(sp.validate().is_ok());
        let control = left_invariance_control(&g, &sp).unwrap();
        assert!(control.control().unwrap().is_identity());
    }

    #[test]
    fn symmetric_three_sides_differ_but_match_in_size() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        // "102" swaps the first two letters; it is its own inverse.
        let chain = IdealChain::normalized_from_labels(&g, &[vec!["012", "102"]]).unwrap();
        assert_eq!(chain.len(), 1);
        let left = chain.left_entourage(&g, 0);
        let right = chain.right_entourage(&g, 0);
        assert_eq!(left.pair_count(), 12);
        assert_eq!(right.pair_count(), 12);
        assert_ne!(left, right);
    }

    #[test]
    fn right_structure_of_a_nonabelian_group_fails_left_invariance() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let chain = IdealChain::normalized_from_labels(&g, &[vec!["012"], vec!["012", "102"]]).unwrap();
        let left_sp = chain.left_space(&g).unwrap();
        assert!(left_invariance_control(&g, &left_sp).unwrap().control().unwrap().is_identity());
        let right_sp = chain.right_space(&g).unwrap();
        match left_invariance_control(&g, &right_sp).unwrap() {
            ControlOutcome::Uncontrolled(fail) => {
                assert_eq!(fail.scale, 1);
                // The translated pair differs by a conjugated transposition
                // that is not in the ideal.
                let (a, b) = fail.image_pair;
                let diff = g.op(b, g.inv(a));
                assert!(!chain.ideal(1).contains(diff));
            }
            ControlOutcome::Controlled(c) => panic!("expected failure, got {:?}", c),
        }
    }

    #[test]
    fn ideal_recovery_round_trips() {
        let (g, chain) = z4_chain();
        let sp = chain.left_space(&g).unwrap();
        let recovered = ideal_chain_of(&g, &sp).unwrap();
        assert_eq!(recovered, chain);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let c3 = IdealChain::normalized_from_labels(&s3, &[vec!["012"], vec!["012", "120"]]).unwrap();
        assert_eq!(ideal_chain_of(&s3, &c3.left_space(&s3).unwrap()).unwrap(), c3);
    }

    #[test]
    fn inversion_is_an_asymorphism_from_left_to_right() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let chain = IdealChain::normalized_from_labels(&g, &[vec!["012"], vec!["012", "102"]]).unwrap();
        let left_sp = chain.left_space(&g).unwrap();
        let right_sp = chain.right_space(&g).unwrap();
        let report = classify(&g.inversion(), &left_sp, &right_sp).unwrap();
        assert!(report.is_asymorphism());
        // Normalized ideals are inverse-closed, so the controls stay put.
        assert!(report.bornologous.control().unwrap().is_identity());
        assert!(report.effectively_proper.control().unwrap().is_identity());
    }

    #[test]
    fn finitary_chain_collapses_on_the_trivial_group() {
        let t = FiniteGroup::cyclic(1).unwrap();
        let chain = IdealChain::finitary(&t);
        assert_eq!(chain.len(), 1);
        let z6 = FiniteGroup::cyclic(6).unwrap();
        let c = IdealChain::finitary(&z6);
        assert_eq!(c.len(), 2);
        assert_eq!(c.ideal(1).len(), 6);
        // The finitary structure is bounded: its top entourage is full.
        let sp = c.left_space(&z6).unwrap();
        assert_eq!(sp.top(), &Relation::full(z6.ground()));
    }

    #[test]
    fn klein_group_and_products_validate() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let klein = z2.direct_product(&z2).unwrap();
        assert_eq!(klein.order(), 4);
        assert!(klein.is_abelian());
        assert_eq!(klein.ground().label(0), "(0,0)");
        for a in 0..4 {
            assert_eq!(klein.op(a, a), klein.identity());
        }
        let mut sub = PointSet::empty(klein.ground());
        sub.insert(0).unwrap();
        sub.insert(3).unwrap();
        assert!(klein.check_subgroup(&sub).is_ok());
        let mut bad = PointSet::empty(klein.ground());
        bad.insert(1).unwrap();
        assert!(matches!(
            klein.check_subgroup(&bad),
            Err(CoarseError::NotSubgroup { reason: "missing identity", .. })
        ));
    }

    #[test]
    fn bad_tables_are_rejected_with_the_right_error() {
        let g = GroundSet::numbered(2);
        assert!(matches!(
            FiniteGroup::new(&g, &[vec![0, 1]]),
            Err(CoarseError::TableShape { .. })
        ));
        assert!(matches!(
            FiniteGroup::new(&g, &[vec![0, 1], vec![1, 2]]),
            Err(CoarseError::TableRange { value: 2, .. })
        ));
        // Left zero semigroup: associative but no identity.
        assert!(matches!(
            FiniteGroup::new(&g, &[vec![0, 0], vec![1, 1]]),
            Err(CoarseError::NoIdentity)
        ));
        let g3 = GroundSet::numbered(3);
        // Not associative: (1*1)*2 = 0*2 = 2 but 1*(1*2) = 1*0 = 1.
        let t = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 1]];
        assert!(matches!(FiniteGroup::new(&g3, &t), Err(CoarseError::NotAssociative { .. })));
    }

    #[test]
    fn symmetric_group_table_is_a_true_composition() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a = s3.ground().position("102").unwrap();
        let b = s3.ground().position("120").unwrap();
        // (swap first two) after (rotate): apply "120" first, then "102".
        // p(q(0))=p(1)=0, p(q(1))=p(2)=2, p(q(2))=p(0)=1 gives "021".
        assert_eq!(s3.ground().label(s3.op(a, b)), "021");
        assert_eq!(s3.ground().label(s3.op(b, a)), "210");
    }
}
