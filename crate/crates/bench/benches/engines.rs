use criterion::{black_box, criterion_group, criterion_main, Criterion};
use lshape_core::embed::{embed, embed_ordered, EmbedConfig};
use lshape_core::geometry::enumerate_canonical_pointsets;
use lshape_core::harness::{exhaustive_verify, Mode, SweepOptions};
use lshape_core::sat::{build_cnf_any, build_cnf_with, solve, Encoding};
use lshape_core::trees::{enumerate_ordered_trees, enumerate_trees, make_t10, make_t13, MAX_DEGREE};
use lshape_core::{AnyTree, PointSet, StaircaseSpec, SymmetryGroup};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    g.sample_size(10);
    g.bench_function("pointsets_full8_n8", |b| {
        b.iter(|| enumerate_canonical_pointsets(black_box(8), SymmetryGroup::Full8).count())
    });
    g.bench_function("trees_n12", |b| b.iter(|| enumerate_trees(black_box(12), MAX_DEGREE).len()));
    g.bench_function("ordered_trees_n9", |b| b.iter(|| enumerate_ordered_trees(black_box(9), MAX_DEGREE, false).len()));
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let t13 = make_t13();
    let p = "(2,2,2,2,2,2,1)".parse::<StaircaseSpec>().unwrap().points();
    let cfg = EmbedConfig::for_pointset(&p);
    g.bench_function("t13_embeddable_staircase", |b| b.iter(|| embed(&t13, black_box(&p), &cfg).unwrap()));
    let t10 = make_t10();
    let s10: PointSet = "2,1,3,6,7,4,5,8,10,9".parse().unwrap();
    g.bench_function("t10_on_s10", |b| {
        b.iter(|| embed_ordered(&t10, black_box(&s10), &EmbedConfig::default()).unwrap())
    });
    let opts = SweepOptions { jobs: 1, ..Default::default() };
    g.bench_function("sweep_unordered_n7", |b| b.iter(|| exhaustive_verify(7, Mode::Unordered, &opts).unwrap()));
    g.finish();
}

fn sat(c: &mut Criterion) {
    let mut g = c.benchmark_group("sat");
    g.sample_size(10);
    let t13 = make_t13();
    let s13 = "(2,2,2,1,2,2,2)".parse::<StaircaseSpec>().unwrap().points();
    for enc in [Encoding::Pairwise, Encoding::Rays] {
        g.bench_function(format!("build_t13_{enc}"), |b| {
            b.iter(|| build_cnf_with(&t13, black_box(&s13), enc).unwrap())
        });
    }
    let s10: PointSet = "2,1,3,6,7,4,5,8,10,9".parse().unwrap();
    let (f, _) = build_cnf_any(&AnyTree::Ordered(make_t10()), &s10, Encoding::Rays).unwrap();
    g.bench_function("solve_t10_rays", |b| b.iter(|| solve(black_box(&f))));
    g.finish();
}

criterion_group!(benches, enumeration, search, sat);
criterion_main!(benches);
