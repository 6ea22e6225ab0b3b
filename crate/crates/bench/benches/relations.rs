use coarse_core::relation::{GroundSet, Relation, RelationBuilder};
use coarse_core::space::CoarseSpace;
use criterion::{criterion_group, criterion_main, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::hint::black_box;

fn sparse(rng: &mut StdRng, g: &GroundSet, pairs: usize) -> Relation {
    let n = g.len();
    let mut b = RelationBuilder::new(g);
    for _ in 0..pairs {
        b.insert(rng.random_range(0..n), rng.random_range(0..n)).unwrap();
    }
    b.build()
}

fn strip(g: &GroundSet, reach: usize) -> Relation {
    let n = g.len();
    let mut b = RelationBuilder::new(g);
    for a in 0..n {
        b.insert_row_range(a, a.saturating_sub(reach), (a + reach).min(n - 1)).unwrap();
    }
    b.build()
}

fn relation_kernels(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(1);
    let g = GroundSet::numbered(512);
    let e = sparse(&mut rng, &g, 6_000);
    let f = sparse(&mut rng, &g, 6_000);
    c.bench_function("compose sparse 512", |b| {
        b.iter(|| black_box(&e).compose(black_box(&f)).unwrap())
    });

    let big = GroundSet::numbered(4096);
    let banded = strip(&big, 8);
    c.bench_function("compose banded 4096", |b| {
        b.iter(|| black_box(&banded).compose(black_box(&banded)).unwrap())
    });

    let sym = e.union(&e.inverse()).unwrap();
    c.bench_function("symmetry scan sparse 512", |b| {
        b.iter(|| black_box(&sym).first_asymmetric_pair())
    });

    let full = Relation::full(&GroundSet::numbered(2048));
    c.bench_function("equivalence check full 2048", |b| {
        b.iter(|| black_box(&full).is_equivalence())
    });
}

fn metric_closure(c: &mut Criterion) {
    // cycle metric: worst case for the strip-then-square completion, since
    // wraparound keeps the top from closing until it swallows the whole cycle
    let n = 96usize;
    let g = GroundSet::numbered(n);
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = i.abs_diff(j);
                    d.min(n - d) as f64
                })
                .collect()
        })
        .collect();
    c.bench_function("metric space cycle 96", |b| {
        b.iter(|| CoarseSpace::from_metric(black_box(&g), black_box(&dist), &[1.0, 2.0, 4.0]).unwrap())
    });
}

criterion_group!(benches, relation_kernels, metric_closure);
criterion_main!(benches);
