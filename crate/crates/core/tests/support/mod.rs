//! Naive pair-set oracles and seeded random generators shared by the
//! integration tests. The oracles are deliberately dumb nested loops: they
//! are the ground truth the bit kernels are compared against.

// each integration test binary pulls in the whole module but uses its own
// subset of the helpers
#![allow(dead_code)]

use std::collections::BTreeSet;

use coarse_core::relation::RelationBuilder;
use coarse_core::{GroundSet, PointSet, Relation};
use rand::prelude::*;
use rand::rngs::StdRng;

pub type Pairs = BTreeSet<(usize, usize)>;

pub fn pair_set(r: &Relation) -> Pairs {
    r.pairs().into_iter().collect()
}

pub fn naive_compose(e: &Pairs, f: &Pairs) -> Pairs {
    let mut out = BTreeSet::new();
    for &(a, c) in e {
        for &(c2, b) in f {
            if c == c2 {
                out.insert((a, b));
            }
        }
    }
    out
}

pub fn naive_inverse(e: &Pairs) -> Pairs {
    e.iter().map(|&(a, b)| (b, a)).collect()
}

pub fn naive_ball(e: &Pairs, m: usize) -> BTreeSet<usize> {
    e.iter().filter(|&&(a, _)| a == m).map(|&(_, b)| b).collect()
}

pub fn naive_image(e: &Pairs, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    e.iter().filter(|&&(a, _)| set.contains(&a)).map(|&(_, b)| b).collect()
}

pub fn naive_pull_back(assign: &[usize], f_rel: &Pairs) -> Pairs {
    let mut out = BTreeSet::new();
    for a in 0..assign.len() {
        for b in 0..assign.len() {
            if f_rel.contains(&(assign[a], assign[b])) {
                out.insert((a, b));
            }
        }
    }
    out
}

pub fn random_relation(ground: &GroundSet, rng: &mut StdRng, density: f64) -> Relation {
    let n = ground.len();
    let mut b = RelationBuilder::new(ground);
    for a in 0..n {
        for c in 0..n {
            if rng.random_bool(density) {
                b.insert(a, c).unwrap();
            }
        }
    }
    b.build()
}

/// A random relation whose rows are contiguous runs containing their own
/// index with monotone endpoints, so the band fast paths kick in.
pub fn random_banded(ground: &GroundSet, rng: &mut StdRng) -> Relation {
    let n = ground.len();
    let mut b = RelationBuilder::new(ground);
    let mut lo = 0usize;
    let mut hi = 0usize;
    for a in 0..n {
        hi = hi.max(a);
        if hi + 1 < n && rng.random_bool(0.6) {
            hi += rng.random_range(1..=(n - hi - 1).min(2));
        }
        let lo_min = lo;
        let lo_max = a;
        lo = rng.random_range(lo_min..=lo_max);
        b.insert_row_range(a, lo, hi).unwrap();
    }
    b.build()
}

pub fn random_subset(ground: &GroundSet, rng: &mut StdRng) -> PointSet {
    let mut s = PointSet::empty(ground);
    for p in 0..ground.len() {
        if rng.random_bool(0.5) {
            s.insert(p).unwrap();
        }
    }
    s
}

pub fn set_of(points: &PointSet) -> BTreeSet<usize> {
    points.iter().collect()
}
