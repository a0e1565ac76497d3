use std::hint::black_box;

use cogsec_bench::{joint6, orthogonal_codebook, random_points};
use cogsec_core::binning::{exact_equivocation, Observer, DEFAULT_EXACT_BUDGET};
use cogsec_core::bounds::{search_region, AuxCards, BoundKind, BoundSpec};
use cogsec_core::region::{convexify_2d, pareto_filter, Dims};
use cogsec_core::{DiscreteCrc, Info};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn information(c: &mut Criterion) {
    let p = joint6(7);
    c.bench_function("cmi/direct", |b| {
        b.iter(|| black_box(&p).conditional_mutual_information(&["A", "B"], &["C"], &["D", "E"]))
    });
    c.bench_function("cmi/memoized-batch", |b| {
        b.iter(|| {
            let info = Info::new(black_box(&p));
            for (x, y, z) in [("A", "B", "C"), ("B", "C", "D"), ("C", "D", "E"), ("A", "F", "C")] {
                black_box(info.cmi(&[x], &[y], &[z]).unwrap());
            }
        })
    });
}

fn regions(c: &mut Criterion) {
    let pts = random_points(2000, 3);
    c.bench_function("pareto_filter/2000x4", |b| {
        b.iter_batched(|| pts.clone(), |p| pareto_filter(p, Dims::ALL), BatchSize::SmallInput)
    });
    let planar = pareto_filter(random_points(2000, 4), Dims::RATES);
    c.bench_function("convexify_2d/2000", |b| b.iter(|| convexify_2d(black_box(&planar)).unwrap()));

    let ch = DiscreteCrc::orthogonal();
    let cards = AuxCards { q: 1, w: 1, v: 1, u: 2 };
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("inner/orthogonal/200", |b| {
        b.iter(|| search_region(&ch, BoundSpec::new(BoundKind::Inner), cards, 200, 1).unwrap())
    });
    g.finish();
}

fn binning(c: &mut Criterion) {
    let (_, rates, cb) = orthogonal_codebook(8);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    c.bench_function("encode/orthogonal/n8", |b| {
        b.iter(|| cb.encode(black_box((3, 0, 5)), rates.eps, &mut rng).unwrap())
    });
    let y = cb.u_word(3, 0).clone();
    c.bench_function("decode_cognitive/orthogonal/n8", |b| {
        b.iter(|| cb.decode_cognitive(black_box(&y), rates.eps).unwrap())
    });
    let ch = DiscreteCrc::orthogonal();
    let mut g = c.benchmark_group("equivocation");
    g.sample_size(10);
    g.bench_function("exact/orthogonal/n8", |b| {
        b.iter(|| exact_equivocation(&cb, &ch, Observer::M1AtY2, rates.eps, DEFAULT_EXACT_BUDGET).unwrap())
    });
    g.finish();
}

criterion_group!(benches, information, regions, binning);
criterion_main!(benches);
