//! Finite ground sets, point sets, and binary relations.
//!
//! A [`Relation`] is stored as one dense bitset per row, so composition is a
//! row-wise bit-or over set bits and all verdicts are bit-exact. Every binary
//! operation checks that both operands share the same ground set; pairs from
//! different spaces never mix silently.
//!
//! Rows that form contiguous runs with monotone endpoints (the shape every
//! distance strip on an ordered line has) are detected once at construction,
//! and composition of two such relations collapses to interval arithmetic.
//! The fast path is exact, not approximate, and is cross-checked against the
//! generic path in the test suite.

use std::fmt;
use std::sync::Arc;

use crate::error::{CoarseError, Result};

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn for_each_set_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &word) in words.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Sets every bit in `lo..=hi`.
fn set_bit_range(words: &mut [u64], lo: usize, hi: usize) {
    let (wl, wh) = (lo / 64, hi / 64);
    let head = !0u64 << (lo % 64);
    let tail = !0u64 >> (63 - hi % 64);
    if wl == wh {
        words[wl] |= head & tail;
    } else {
        words[wl] |= head;
        for w in &mut words[wl + 1..wh] {
            *w = !0;
        }
        words[wh] |= tail;
    }
}

#[derive(Debug)]
struct GroundInner {
    labels: Vec<String>,
    index: std::collections::HashMap<String, usize>,
}

/// An immutable finite set of labelled points. Cloning is cheap; two clones
/// of the same construction are identical for the mixing check.
#[derive(Clone, Debug)]
pub struct GroundSet {
    inner: Arc<GroundInner>,
}

impl GroundSet {
    /// Builds a ground set from distinct labels. The label order is the point
    /// order used everywhere else (rows, bit positions, reports).
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut index = std::collections::HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(CoarseError::DuplicateLabel(label.clone()));
            }
        }
        Ok(GroundSet { inner: Arc::new(GroundInner { labels, index }) })
    }

    /// Ground set `{ "0", "1", ..., "n-1" }`.
    pub fn numbered(n: usize) -> Self {
        GroundSet::new((0..n).map(|i| i.to_string()).collect()).expect("numbered labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.position(label).ok_or_else(|| CoarseError::UnknownPoint(label.to_string()))
    }

    /// Same ground set: one shared construction, or equal label sequences.
    pub fn is_same(&self, other: &GroundSet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }

    pub(crate) fn check_same(&self, other: &GroundSet) -> Result<()> {
        if self.is_same(other) {
            Ok(())
        } else {
            Err(CoarseError::GroundMismatch { left: self.len(), right: other.len() })
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(CoarseError::PointOutOfRange { index, size: self.len() })
        }
    }
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.is_same(other)
    }
}
impl Eq for GroundSet {}

/// A subset of a ground set, stored as a bitset.
#[derive(Clone)]
pub struct PointSet {
    ground: GroundSet,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(ground: &GroundSet) -> Self {
        PointSet { ground: ground.clone(), words: vec![0; words_for(ground.len())] }
    }

    pub fn full(ground: &GroundSet) -> Self {
        let mut s = PointSet::empty(ground);
        if !ground.is_empty() {
            set_bit_range(&mut s.words, 0, ground.len() - 1);
        }
        s
    }

    pub fn from_indices(ground: &GroundSet, indices: &[usize]) -> Result<Self> {
        let mut s = PointSet::empty(ground);
        for &i in indices {
            ground.check_index(i)?;
            s.words[i / 64] |= 1 << (i % 64);
        }
        Ok(s)
    }

    pub fn from_labels(ground: &GroundSet, labels: &[impl AsRef<str>]) -> Result<Self> {
        let mut s = PointSet::empty(ground);
        for label in labels {
            let i = ground.require(label.as_ref())?;
            s.words[i / 64] |= 1 << (i % 64);
        }
        Ok(s)
    }

    pub(crate) fn from_words(ground: &GroundSet, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(ground.len()));
        PointSet { ground: ground.clone(), words }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn insert(&mut self, index: usize) -> Result<()> {
        self.ground.check_index(index)?;
        self.words[index / 64] |= 1 << (index % 64);
        Ok(())
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.ground.len() && self.words[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.ground.check_same(&other.ground)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(PointSet { ground: self.ground.clone(), words })
    }

    pub fn intersect(&self, other: &PointSet) -> Result<PointSet> {
        self.ground.check_same(&other.ground)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(PointSet { ground: self.ground.clone(), words })
    }

    pub fn is_subset_of(&self, other: &PointSet) -> Result<bool> {
        self.ground.check_same(&other.ground)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    pub fn is_disjoint_from(&self, other: &PointSet) -> Result<bool> {
        self.ground.check_same(&other.ground)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_labels(&self) -> Vec<String> {
        self.iter().map(|i| self.ground.label(i).to_string()).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.ground.is_same(&other.ground) && self.words == other.words
    }
}
impl Eq for PointSet {}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_labels().join(","))
    }
}

/// One contiguous row run: bits `lo..=hi` are set, nothing else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Band {
    lo: u32,
    hi: u32,
}

/// A binary relation on a ground set, one bitset row per point.
/// `contains(a, b)` means the ordered pair `(a, b)` is related.
#[derive(Clone)]
pub struct Relation {
    ground: GroundSet,
    words_per_row: usize,
    bits: Vec<u64>,
    band: Option<Vec<Band>>,
}

impl Relation {
    fn from_bits(ground: GroundSet, bits: Vec<u64>) -> Self {
        let words_per_row = words_for(ground.len());
        debug_assert_eq!(bits.len(), words_per_row * ground.len());
        let band = detect_band(ground.len(), words_per_row, &bits);
        Relation { ground, words_per_row, bits, band }
    }

    pub fn empty(ground: &GroundSet) -> Self {
        let wpr = words_for(ground.len());
        Relation::from_bits(ground.clone(), vec![0; wpr * ground.len()])
    }

    /// The diagonal `{(m, m)}`.
    pub fn diagonal(ground: &GroundSet) -> Self {
        let n = ground.len();
        let wpr = words_for(n);
        let mut bits = vec![0u64; wpr * n];
        for a in 0..n {
            bits[a * wpr + a / 64] |= 1 << (a % 64);
        }
        Relation::from_bits(ground.clone(), bits)
    }

    /// The full relation `M x M`.
    pub fn full(ground: &GroundSet) -> Self {
        let n = ground.len();
        let wpr = words_for(n);
        let mut bits = vec![0u64; wpr * n];
        if n > 0 {
            for a in 0..n {
                set_bit_range(&mut bits[a * wpr..(a + 1) * wpr], 0, n - 1);
            }
        }
        Relation::from_bits(ground.clone(), bits)
    }

    pub fn from_pairs(ground: &GroundSet, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut b = RelationBuilder::new(ground);
        for &(x, y) in pairs {
            b.insert(x, y)?;
        }
        Ok(b.build())
    }

    pub fn from_label_pairs(ground: &GroundSet, pairs: &[(impl AsRef<str>, impl AsRef<str>)]) -> Result<Self> {
        let mut b = RelationBuilder::new(ground);
        for (x, y) in pairs {
            b.insert(ground.require(x.as_ref())?, ground.require(y.as_ref())?)?;
        }
        Ok(b.build())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words_per_row..(a + 1) * self.words_per_row]
    }

    /// Per-row `(lo, hi)` runs when every row is a single contiguous interval
    /// containing its own index with monotone endpoints, else `None`.
    pub(crate) fn band_runs(&self) -> Option<Vec<(usize, usize)>> {
        self.band
            .as_ref()
            .map(|bands| bands.iter().map(|b| (b.lo as usize, b.hi as usize)).collect())
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.ground.len() && b < self.ground.len() && self.row(a)[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn for_each_pair(&self, mut f: impl FnMut(usize, usize)) {
        for a in 0..self.ground.len() {
            for_each_set_bit(self.row(a), |b| f(a, b));
        }
    }

    /// First related pair in row-major order, if any.
    pub fn first_pair(&self) -> Option<(usize, usize)> {
        for a in 0..self.ground.len() {
            let row = self.row(a);
            for (wi, &w) in row.iter().enumerate() {
                if w != 0 {
                    return Some((a, wi * 64 + w.trailing_zeros() as usize));
                }
            }
        }
        None
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.pair_count());
        self.for_each_pair(|a, b| out.push((a, b)));
        out
    }

    /// The ball `E[m] = { m' : (m, m') related }`.
    pub fn ball(&self, m: usize) -> Result<PointSet> {
        self.ground.check_index(m)?;
        Ok(PointSet::from_words(&self.ground, self.row(m).to_vec()))
    }

    /// The image `E[A] = union of E[a] over a in A`.
    pub fn image(&self, set: &PointSet) -> Result<PointSet> {
        self.ground.check_same(set.ground())?;
        let mut words = vec![0u64; self.words_per_row];
        for_each_set_bit(set.words(), |a| {
            let row = self.row(a);
            for (o, w) in words.iter_mut().zip(row) {
                *o |= w;
            }
        });
        Ok(PointSet::from_words(&self.ground, words))
    }

    /// The inverse relation (transpose).
    pub fn inverse(&self) -> Relation {
        let n = self.ground.len();
        let wpr = self.words_per_row;
        let mut bits = vec![0u64; wpr * n];
        self.for_each_pair(|a, b| bits[b * wpr + a / 64] |= 1 << (a % 64));
        Relation::from_bits(self.ground.clone(), bits)
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.ground.check_same(&other.ground)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        Ok(Relation::from_bits(self.ground.clone(), bits))
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation> {
        self.ground.check_same(&other.ground)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        Ok(Relation::from_bits(self.ground.clone(), bits))
    }

    /// Composition `E o F = {(a, b) : exists c with (a, c) in E and (c, b) in F}`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.ground.check_same(&other.ground)?;
        let n = self.ground.len();
        let wpr = self.words_per_row;

        // Both operands banded: row a of the output is the run from the low
        // endpoint of other's first reachable row to the high endpoint of its
        // last one. Exact because consecutive reflexive runs overlap.
        if let (Some(eb), Some(fb)) = (&self.band, &other.band) {
            let mut bits = vec![0u64; wpr * n];
            for a in 0..n {
                let lo = fb[eb[a].lo as usize].lo as usize;
                let hi = fb[eb[a].hi as usize].hi as usize;
                set_bit_range(&mut bits[a * wpr..(a + 1) * wpr], lo, hi);
            }
            return Ok(Relation::from_bits(self.ground.clone(), bits));
        }

        let mut bits = vec![0u64; wpr * n];
        let mut out = vec![0u64; wpr];
        for a in 0..n {
            out.fill(0);
            for_each_set_bit(self.row(a), |c| {
                for (o, w) in out.iter_mut().zip(other.row(c)) {
                    *o |= w;
                }
            });
            bits[a * wpr..(a + 1) * wpr].copy_from_slice(&out);
        }
        Ok(Relation::from_bits(self.ground.clone(), bits))
    }

    pub fn is_subset_of(&self, other: &Relation) -> Result<bool> {
        self.ground.check_same(&other.ground)?;
        if let (Some(sb), Some(ob)) = (&self.band, &other.band) {
            return Ok(sb.iter().zip(ob).all(|(s, o)| o.lo <= s.lo && s.hi <= o.hi));
        }
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    /// First pair of `self` missing from `other`, if any.
    pub fn first_pair_outside(&self, other: &Relation) -> Result<Option<(usize, usize)>> {
        self.ground.check_same(&other.ground)?;
        if let (Some(sb), Some(ob)) = (&self.band, &other.band) {
            for (a, (s, o)) in sb.iter().zip(ob).enumerate() {
                if s.lo < o.lo {
                    return Ok(Some((a, s.lo as usize)));
                }
                if s.hi > o.hi {
                    // lowest excess bit: just past other's run, unless the
                    // runs do not overlap at all
                    return Ok(Some((a, (o.hi + 1).max(s.lo) as usize)));
                }
            }
            return Ok(None);
        }
        for a in 0..self.ground.len() {
            let (s, o) = (self.row(a), other.row(a));
            for wi in 0..self.words_per_row {
                let excess = s[wi] & !o[wi];
                if excess != 0 {
                    return Ok(Some((a, wi * 64 + excess.trailing_zeros() as usize)));
                }
            }
        }
        Ok(None)
    }

    pub fn contains_diagonal(&self) -> bool {
        (0..self.ground.len()).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetric_pair().is_none()
    }

    /// First asymmetric pair `(a, b)` with `(b, a)` missing, if any, in row
    /// then column order.
    pub fn first_asymmetric_pair(&self) -> Option<(usize, usize)> {
        // Bands pin the whole row to one run with monotone endpoints, so the
        // violations in row a sit at the run ends: a prefix of b < a whose
        // rows end before a, or a suffix of b > a whose rows start after a.
        if let Some(bands) = &self.band {
            for (a, band) in bands.iter().enumerate() {
                let (lo, hi) = (band.lo as usize, band.hi as usize);
                if lo < a && (bands[lo].hi as usize) < a {
                    return Some((a, lo));
                }
                if hi > a && (bands[hi].lo as usize) > a {
                    // least b > a whose run starts past a; lo is monotone
                    let mut bad = hi;
                    let (mut left, mut right) = (a + 1, hi);
                    while left <= right {
                        let mid = (left + right) / 2;
                        if (bands[mid].lo as usize) > a {
                            bad = mid;
                            right = mid - 1;
                        } else {
                            left = mid + 1;
                        }
                    }
                    return Some((a, bad));
                }
            }
            return None;
        }
        let mut found = None;
        for a in 0..self.ground.len() {
            for_each_set_bit(self.row(a), |b| {
                if found.is_none() && !self.contains(b, a) {
                    found = Some((a, b));
                }
            });
            if found.is_some() {
                break;
            }
        }
        found
    }

    /// Reflexive + symmetric + transitive, checked in `O(n^2 / 64)` by
    /// comparing each row against its connected component.
    pub fn is_equivalence(&self) -> bool {
        let n = self.ground.len();
        if !self.contains_diagonal() || !self.is_symmetric() {
            return false;
        }
        let wpr = self.words_per_row;
        let mut visited = vec![0u64; wpr];
        for a in 0..n {
            if visited[a / 64] >> (a % 64) & 1 == 1 {
                continue;
            }
            let mut comp = self.row(a).to_vec();
            comp[a / 64] |= 1 << (a % 64);
            let mut frontier = comp.clone();
            loop {
                let mut next = vec![0u64; wpr];
                for_each_set_bit(&frontier, |u| {
                    for (o, w) in next.iter_mut().zip(self.row(u)) {
                        *o |= w;
                    }
                });
                let mut grew = false;
                for wi in 0..wpr {
                    let added = next[wi] & !comp[wi];
                    if added != 0 {
                        grew = true;
                    }
                    frontier[wi] = added;
                    comp[wi] |= added;
                }
                if !grew {
                    break;
                }
            }
            let mut ok = true;
            for_each_set_bit(&comp, |u| {
                let mut row = self.row(u).to_vec();
                row[u / 64] |= 1 << (u % 64);
                ok &= row == comp;
            });
            if !ok {
                return false;
            }
            for wi in 0..wpr {
                visited[wi] |= comp[wi];
            }
        }
        true
    }

    /// Connected components under the symmetrized relation, each as a point set.
    pub fn components(&self) -> Vec<PointSet> {
        let n = self.ground.len();
        let wpr = self.words_per_row;
        let inv = self.inverse();
        let mut visited = vec![0u64; wpr];
        let mut out = Vec::new();
        for a in 0..n {
            if visited[a / 64] >> (a % 64) & 1 == 1 {
                continue;
            }
            let mut comp = vec![0u64; wpr];
            comp[a / 64] |= 1 << (a % 64);
            let mut frontier = comp.clone();
            loop {
                let mut next = vec![0u64; wpr];
                for_each_set_bit(&frontier, |u| {
                    for ((o, w), v) in next.iter_mut().zip(self.row(u)).zip(inv.row(u)) {
                        *o |= w | v;
                    }
                });
                let mut grew = false;
                for wi in 0..wpr {
                    let added = next[wi] & !comp[wi];
                    if added != 0 {
                        grew = true;
                    }
                    frontier[wi] = added;
                    comp[wi] |= added;
                }
                if !grew {
                    break;
                }
            }
            for wi in 0..wpr {
                visited[wi] |= comp[wi];
            }
            out.push(PointSet::from_words(&self.ground, comp));
        }
        out
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.ground.is_same(&other.ground) && self.bits == other.bits
    }
}
impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| format!("({},{})", self.ground.label(a), self.ground.label(b)))
            .collect();
        write!(f, "Relation[{}]", pairs.join(" "))
    }
}

/// Incremental pair-by-pair construction.
pub struct RelationBuilder {
    ground: GroundSet,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl RelationBuilder {
    pub fn new(ground: &GroundSet) -> Self {
        let wpr = words_for(ground.len());
        RelationBuilder { ground: ground.clone(), words_per_row: wpr, bits: vec![0; wpr * ground.len()] }
    }

    pub fn insert(&mut self, a: usize, b: usize) -> Result<()> {
        self.ground.check_index(a)?;
        self.ground.check_index(b)?;
        self.bits[a * self.words_per_row + b / 64] |= 1 << (b % 64);
        Ok(())
    }

    /// Sets the whole run `(a, lo)..=(a, hi)` at once.
    pub fn insert_row_range(&mut self, a: usize, lo: usize, hi: usize) -> Result<()> {
        self.ground.check_index(a)?;
        self.ground.check_index(lo)?;
        self.ground.check_index(hi)?;
        if lo <= hi {
            set_bit_range(&mut self.bits[a * self.words_per_row..(a + 1) * self.words_per_row], lo, hi);
        }
        Ok(())
    }

    pub fn build(self) -> Relation {
        Relation::from_bits(self.ground, self.bits)
    }
}

/// `Some(bands)` iff every row is one contiguous run containing its own
/// index, with both endpoints nondecreasing row to row.
fn detect_band(n: usize, wpr: usize, bits: &[u64]) -> Option<Vec<Band>> {
    let mut bands = Vec::with_capacity(n);
    let mut prev = Band { lo: 0, hi: 0 };
    for a in 0..n {
        let row = &bits[a * wpr..(a + 1) * wpr];
        let mut lo = None;
        let mut hi = 0usize;
        let mut count = 0usize;
        for (wi, &w) in row.iter().enumerate() {
            if w != 0 {
                if lo.is_none() {
                    lo = Some(wi * 64 + w.trailing_zeros() as usize);
                }
                hi = wi * 64 + 63 - w.leading_zeros() as usize;
                count += w.count_ones() as usize;
            }
        }
        let lo = lo?;
        if count != hi - lo + 1 || a < lo || a > hi {
            return None;
        }
        let band = Band { lo: lo as u32, hi: hi as u32 };
        if a > 0 && (band.lo < prev.lo || band.hi < prev.hi) {
            return None;
        }
        bands.push(band);
        prev = band;
    }
    Some(bands)
}
