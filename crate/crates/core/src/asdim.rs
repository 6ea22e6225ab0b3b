//! Covers with separation and boundedness certificates, and the search
//! engine that turns them into dimension witnesses.
//!
//! A cover at control scale `E_i` splits the ground set into `n + 1`
//! families of point sets. Two checks make it a witness: inside each
//! family the sets are `E_i`-separated (no set meets the `E_i`-image of
//! another), and every set is bounded at some chain scale `E_s`. The least
//! usable bound index is recorded per control scale; small indices mean
//! tight covers. Every candidate the engine emits is re-verified through
//! the same public checks, so a returned witness never depends on a search
//! strategy being correct.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{CoarseError, Result};
use crate::group::{FiniteGroup, IdealChain};
use crate::relation::{PointSet, Relation};
use crate::space::{CoarseSpace, Provenance, Scale};

/// Largest ground size the exhaustive fallback inside the witness engine
/// will attempt.
pub const DEFAULT_EXACT_CAP: usize = 24;

/// Hard ground-size cap for [`asdim_exact_small`].
pub const EXACT_SMALL_CAP: usize = 16;

/// `n + 1` families of point sets covering the ground set, with the least
/// chain index at which every set is bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub families: Vec<Vec<PointSet>>,
    pub bound_scale: Scale,
}

/// One verified cover per chain scale; index `i` holds the cover whose
/// families are `E_i`-separated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsdimWitness {
    pub per_scale: Vec<Cover>,
}

impl AsdimWitness {
    pub fn bound_scales(&self) -> Vec<Scale> {
        self.per_scale.iter().map(|c| c.bound_scale).collect()
    }

    /// Padding with empty families turns a witness for `n` into one for
    /// `n + extra`: coverage and separation are untouched.
    pub fn padded(&self, extra: usize) -> AsdimWitness {
        AsdimWitness {
            per_scale: self
                .per_scale
                .iter()
                .map(|c| {
                    let mut families = c.families.clone();
                    families.extend((0..extra).map(|_| Vec::new()));
                    Cover { families, bound_scale: c.bound_scale }
                })
                .collect(),
        }
    }

    /// Re-runs the public checks on every stored cover. True only when each
    /// cover verifies at its scale with exactly the recorded bound index.
    pub fn reverify(&self, space: &CoarseSpace) -> Result<bool> {
        if self.per_scale.len() != space.chain_len() {
            return Ok(false);
        }
        for (scale, cover) in self.per_scale.iter().enumerate() {
            if verify_cover(&cover.families, space, scale)? != cover.bound_scale {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Verdict of the witness engine, tagged with how far the search went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AsdimOutcome {
    /// A verified cover exists at every chain scale.
    Witness(AsdimWitness),
    /// Exhaustive search at this scale proved no admissible cover exists.
    ExhaustedExact { scale: usize },
    /// Heuristics found nothing and the ground set exceeds the exhaustive
    /// cap. Says nothing about whether a cover exists.
    GaveUpHeuristic { scale: usize },
}

impl AsdimOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, AsdimOutcome::Witness(_))
    }

    pub fn witness(&self) -> Option<&AsdimWitness> {
        match self {
            AsdimOutcome::Witness(w) => Some(w),
            _ => None,
        }
    }
}

fn set_bounded_at(set: &PointSet, e: &Relation) -> Result<bool> {
    for u in set.iter() {
        if !set.is_subset_of(&e.ball(u)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least chain index bounding every set of every family: each set must sit
/// inside the scale's ball around each of its own points. `None` when some
/// set is unbounded even at the top. Empty sets are an error.
pub fn uniform_bound_scale(families: &[Vec<PointSet>], space: &CoarseSpace) -> Result<Scale> {
    let chain = space.chain();
    let mut worst = 0usize;
    for (fi, family) in families.iter().enumerate() {
        for (si, set) in family.iter().enumerate() {
            if set.is_empty() {
                return Err(CoarseError::EmptyCoverSet { family: fi, set: si });
            }
            // boundedness is monotone along the chain
            let mut lo = 0;
            let mut hi = chain.len();
            while lo < hi {
                let mid = (lo + hi) / 2;
                if set_bounded_at(set, &chain[mid])? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            if lo == chain.len() {
                return Ok(None);
            }
            worst = worst.max(lo);
        }
    }
    Ok(Some(worst))
}

/// True when no set of the family meets the `e`-image of another.
pub fn separated_check(family: &[PointSet], e: &Relation) -> Result<bool> {
    for (i, u) in family.iter().enumerate() {
        let image = e.image(u)?;
        for (j, v) in family.iter().enumerate() {
            if i != j && !image.is_disjoint_from(v)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Full check for a candidate cover at one control scale. Structural
/// problems (a point left uncovered, an empty set) are errors; failed
/// separation or boundedness is the verdict `None`. On success returns the
/// least usable bound index.
pub fn verify_cover(families: &[Vec<PointSet>], space: &CoarseSpace, scale: usize) -> Result<Scale> {
    let mut covered = PointSet::empty(space.ground());
    for (fi, family) in families.iter().enumerate() {
        for (si, set) in family.iter().enumerate() {
            if set.is_empty() {
                return Err(CoarseError::EmptyCoverSet { family: fi, set: si });
            }
            covered = covered.union(set)?;
        }
    }
    for p in 0..space.ground().len() {
        if !covered.contains(p) {
            return Err(CoarseError::NotACover(p));
        }
    }
    let e = space.element(scale);
    for family in families {
        if !separated_check(family, e)? {
            return Ok(None);
        }
    }
    uniform_bound_scale(families, space)
}

/// Alternating interval blocks for banded metric chains. Blocks of
/// `reach + 1` consecutive points cycle through the families, so
/// same-family blocks are at least a full block apart, beyond the reach of
/// the control scale.
fn interval_families(space: &CoarseSpace, scale: usize, n: usize) -> Option<Vec<Vec<PointSet>>> {
    if space.provenance() != Provenance::Metric {
        return None;
    }
    let runs = space.element(scale).band_runs()?;
    let reach = runs.iter().enumerate().map(|(a, &(lo, hi))| (hi - a).max(a - lo)).max()?;
    let block_len = reach + 1;
    let mut families = vec![Vec::new(); n + 1];
    let mut block = 0;
    let mut start = 0;
    while start < runs.len() {
        let stop = (start + block_len).min(runs.len());
        let pts: Vec<usize> = (start..stop).collect();
        families[block % (n + 1)]
            .push(PointSet::from_indices(space.ground(), &pts).expect("indices in range"));
        block += 1;
        start = stop;
    }
    Some(families)
}

/// Brick covers for product grids. For `n = 2`, masonry: bands of
/// `reach + 1` rows, bricks twice as wide, odd bands offset by half a
/// brick, colors `(brick + band % 2) mod 3`. Consecutive bands shift brick
/// boundaries by exactly half a brick, so a brick meets only bricks of the
/// two other colors across a band edge. For `n >= 3`, aligned squares of
/// side `2 * (reach + 1)` on a two-by-two color pattern.
fn brick_families(space: &CoarseSpace, scale: usize, n: usize) -> Option<Vec<Vec<PointSet>>> {
    let Provenance::Product { left: nx, right: ny } = space.provenance() else {
        return None;
    };
    if n < 2 || nx == 0 || ny == 0 {
        return None;
    }
    let e = space.element(scale);
    let mut reach = 0usize;
    e.for_each_pair(|a, b| {
        let (ax, ay) = (a / ny, a % ny);
        let (bx, by) = (b / ny, b % ny);
        reach = reach.max(ax.abs_diff(bx)).max(ay.abs_diff(by));
    });
    let l = reach + 1;
    let mut bricks: BTreeMap<(usize, usize), (usize, Vec<usize>)> = BTreeMap::new();
    for a in 0..nx * ny {
        let (x, y) = (a / ny, a % ny);
        let (key, color) = if n == 2 {
            let t = y / l;
            let k = (x + (t % 2) * l) / (2 * l);
            ((t, k), (k + t % 2) % 3)
        } else {
            let (bx, by) = (x / (2 * l), y / (2 * l));
            ((bx, by), bx % 2 + 2 * (by % 2))
        };
        bricks.entry(key).or_insert_with(|| (color, Vec::new())).1.push(a);
    }
    let mut families = vec![Vec::new(); n + 1];
    for (color, pts) in bricks.into_values() {
        families[color].push(PointSet::from_indices(space.ground(), &pts).expect("indices in range"));
    }
    Some(families)
}

/// Breadth-first layers cycled through the families, one run per
/// component. An edge never skips a layer, so same-family layers (`n + 1`
/// apart, `n >= 1`) are separated; each layer sits inside its component
/// and is bounded wherever the component is.
fn layer_families(space: &CoarseSpace, scale: usize, n: usize) -> Result<Vec<Vec<PointSet>>> {
    let e = space.element(scale);
    let mut families = vec![Vec::new(); n + 1];
    for comp in e.components() {
        let root = comp.iter().next().expect("components are nonempty");
        let mut visited = PointSet::empty(space.ground());
        let mut frontier = PointSet::from_indices(space.ground(), &[root])?;
        let mut depth = 0usize;
        while !frontier.is_empty() {
            visited = visited.union(&frontier)?;
            families[depth % (n + 1)].push(frontier.clone());
            let mut next = PointSet::empty(space.ground());
            for p in e.image(&frontier)?.intersect(&comp)?.iter() {
                if !visited.contains(p) {
                    next.insert(p)?;
                }
            }
            frontier = next;
            depth += 1;
        }
    }
    Ok(families)
}

/// Whole components cycled through the families. Distinct components never
/// interact, so any assignment is separated.
fn component_families(space: &CoarseSpace, scale: usize, n: usize) -> Vec<Vec<PointSet>> {
    let mut families = vec![Vec::new(); n + 1];
    for (i, comp) in space.element(scale).components().into_iter().enumerate() {
        families[i % (n + 1)].push(comp);
    }
    families
}

fn row_masks(e: &Relation) -> Vec<u64> {
    (0..e.ground().len())
        .map(|a| {
            let mut w = 0u64;
            for b in e.ball(a).expect("index in range").iter() {
                w |= 1 << b;
            }
            w
        })
        .collect()
}

struct ExactSearch<'a> {
    rows_sep: &'a [u64],
    rows_bound: &'a [u64],
    colors_allowed: usize,
    colors: Vec<u8>,
    class: Vec<u64>,
}

impl ExactSearch<'_> {
    fn run(&mut self, p: usize, used: usize) -> bool {
        if p == self.colors.len() {
            return true;
        }
        // canonical order: a fresh color is only ever the next unused one
        let limit = (used + 1).min(self.colors_allowed);
        for c in 0..limit {
            self.class[c] |= 1 << p;
            self.colors[p] = c as u8;
            if self.class_ok(c, p) && self.run(p + 1, used.max(c + 1)) {
                return true;
            }
            self.class[c] &= !(1 << p);
        }
        false
    }

    /// The monochrome component of `p` must stay inside every member's
    /// bound row. Later points can only grow a component, never shrink it,
    /// so a violation here prunes the whole subtree.
    fn class_ok(&self, c: usize, p: usize) -> bool {
        let mask = self.class[c];
        let mut comp = 1u64 << p;
        loop {
            let mut next = 0u64;
            let mut rest = comp;
            while rest != 0 {
                let a = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= self.rows_sep[a] & mask;
            }
            if comp | next == comp {
                break;
            }
            comp |= next;
        }
        let mut rest = comp;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if comp & !self.rows_bound[a] != 0 {
                return false;
            }
        }
        true
    }
}

/// Exhaustive search for a coloring whose monochrome components under the
/// control scale are all bounded by the bound scale. Equivalent to the
/// cover question: shrinking each family to its monochrome components
/// preserves separation and boundedness.
fn exact_coloring(space: &CoarseSpace, scale: usize, bound: usize, n: usize) -> Option<Vec<u8>> {
    let m = space.ground().len();
    debug_assert!(m <= 64);
    let rows_sep = row_masks(space.element(scale));
    let rows_bound = row_masks(space.element(bound));
    let mut search = ExactSearch {
        rows_sep: &rows_sep,
        rows_bound: &rows_bound,
        colors_allowed: n + 1,
        colors: vec![0; m],
        class: vec![0; n + 1],
    };
    if search.run(0, 0) {
        Some(search.colors)
    } else {
        None
    }
}

fn families_from_coloring(
    space: &CoarseSpace,
    scale: usize,
    colors: &[u8],
    n: usize,
) -> Result<Vec<Vec<PointSet>>> {
    let m = space.ground().len();
    let rows = row_masks(space.element(scale));
    let mut families = vec![Vec::new(); n + 1];
    for c in 0..=n {
        let mut mask = 0u64;
        for (p, &cp) in colors.iter().enumerate() {
            if cp as usize == c {
                mask |= 1 << p;
            }
        }
        let mut left = mask;
        while left != 0 {
            let seed = left.trailing_zeros() as usize;
            let mut comp = 1u64 << seed;
            loop {
                let mut next = 0u64;
                let mut rest = comp;
                while rest != 0 {
                    let a = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    next |= rows[a] & mask;
                }
                if comp | next == comp {
                    break;
                }
                comp |= next;
            }
            left &= !comp;
            let pts: Vec<usize> = (0..m).filter(|&p| comp >> p & 1 == 1).collect();
            families[c].push(PointSet::from_indices(space.ground(), &pts)?);
        }
    }
    Ok(families)
}

enum ScaleSearch {
    Found(Cover),
    Exhausted,
    GaveUp,
}

/// One scale of the witness search: verified templates, then verified
/// greedy covers, then the exhaustive fallback for small grounds.
fn witness_at_scale(space: &CoarseSpace, scale: usize, n: usize, exact_cap: usize) -> Result<ScaleSearch> {
    let mut candidates: Vec<Vec<Vec<PointSet>>> = Vec::new();
    if let Some(f) = interval_families(space, scale, n) {
        candidates.push(f);
    }
    if let Some(f) = brick_families(space, scale, n) {
        candidates.push(f);
    }
    if n >= 1 {
        candidates.push(layer_families(space, scale, n)?);
    }
    candidates.push(component_families(space, scale, n));
    for families in candidates {
        if let Some(sigma) = verify_cover(&families, space, scale)? {
            return Ok(ScaleSearch::Found(Cover { families, bound_scale: Some(sigma) }));
        }
    }
    // exhaustive existence check: bounded at all means bounded at the top
    if space.ground().len() <= exact_cap.min(64) {
        let top = space.chain_len() - 1;
        if let Some(colors) = exact_coloring(space, scale, top, n) {
            let families = families_from_coloring(space, scale, &colors, n)?;
            let sigma = verify_cover(&families, space, scale)?.expect("exhaustive solutions verify");
            return Ok(ScaleSearch::Found(Cover { families, bound_scale: Some(sigma) }));
        }
        return Ok(ScaleSearch::Exhausted);
    }
    Ok(ScaleSearch::GaveUp)
}

/// Searches every chain scale for a cover into `n + 1` separated,
/// uniformly bounded families. Every emitted cover has been re-verified
/// through [`verify_cover`]. Failure names the first scale left uncovered
/// and is definitive only when the exhaustive fallback ran. Scales are
/// independent and searched in parallel.
pub fn asdim_upper_witness(space: &CoarseSpace, n: usize, exact_cap: usize) -> Result<AsdimOutcome> {
    let per: Vec<Result<ScaleSearch>> = (0..space.chain_len())
        .into_par_iter()
        .map(|scale| witness_at_scale(space, scale, n, exact_cap))
        .collect();
    let mut covers = Vec::with_capacity(per.len());
    for (scale, outcome) in per.into_iter().enumerate() {
        match outcome? {
            ScaleSearch::Found(c) => covers.push(c),
            ScaleSearch::Exhausted => return Ok(AsdimOutcome::ExhaustedExact { scale }),
            ScaleSearch::GaveUp => return Ok(AsdimOutcome::GaveUpHeuristic { scale }),
        }
    }
    Ok(AsdimOutcome::Witness(AsdimWitness { per_scale: covers }))
}

/// Decides exactly whether a cover into `n + 1` families exists with the
/// given control and bound scales, by exhaustive backtracking over
/// colorings. Points are assigned in ground order and a fresh family is
/// only ever the next unused one, which kills family-permutation symmetry.
pub fn asdim_exact_small(space: &CoarseSpace, scale: usize, bound: usize, n: usize) -> Result<bool> {
    let m = space.ground().len();
    if m > EXACT_SMALL_CAP {
        return Err(CoarseError::ExactCapExceeded { size: m, cap: EXACT_SMALL_CAP });
    }
    Ok(exact_coloring(space, scale, bound, n).is_some())
}

/// Runs the witness engine on the left entourage space of an ideal chain.
/// For the finitary ideal on a finite group the top entourage relates
/// everything, so the zero-dimensional witness exists at every scale.
pub fn group_asdim_check(
    group: &FiniteGroup,
    ideal: &IdealChain,
    n: usize,
    exact_cap: usize,
) -> Result<AsdimOutcome> {
    let space = ideal.left_space(group)?;
    asdim_upper_witness(&space, n, exact_cap)
}
