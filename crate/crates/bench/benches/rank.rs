use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tropdiv::rank::{self, rank_by_enumeration, EnumerationBudget, Method, RankOptions};
use tropdiv::reduction::{reduce_metric, FiringGraph};
use tropdiv_bench::{banana, chorded_cycle, complete, random_divisor, spread, vertex};

fn graph_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_graph");
    for n in [4, 5, 6] {
        let g = complete(n);
        let d = spread(&g, n, g.genus() as usize + 1);
        group.bench_with_input(BenchmarkId::new("complete", n), &d, |b, d| {
            b.iter(|| rank::rank_graph(&g, black_box(d), &RankOptions::default()).unwrap().rank)
        });
    }
    group.finish();
}

fn metric_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_metric");
    let g = chorded_cycle(6);
    let d = random_divisor(&g, 4, 11);
    group.bench_function("subdivision", |b| {
        b.iter(|| rank::rank_metric(&g, black_box(&d), &RankOptions::default()).unwrap().rank)
    });
    let g = banana(&[1, 1, 1]);
    let d = spread(&g, 2, 3);
    let exact = RankOptions { method: Method::Enumeration, ..RankOptions::default() };
    group.bench_function("enumeration_banana", |b| b.iter(|| rank::rank_metric(&g, black_box(&d), &exact).unwrap().rank));
    let truncated = EnumerationBudget::truncated(2).without_pruning();
    group.bench_function("enumeration_banana_unpruned_u2", |b| {
        b.iter(|| rank_by_enumeration(&g, black_box(&d), &truncated, &mut |_| {}).unwrap().rank)
    });
    group.finish();
}

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce");
    let g = complete(8);
    let fg = FiringGraph::new(&g);
    let values: Vec<i64> = (0..8).map(|v| if v == 7 { 30 } else { -1 }).collect();
    group.bench_function("graph_k8", |b| b.iter(|| fg.reduce(black_box(&values), 0).reduced));
    let g = banana(&[2, 3, 4]);
    let d = spread(&g, 2, 6);
    group.bench_function("metric_banana_234", |b| b.iter(|| reduce_metric(&g, black_box(&d), &vertex(0)).unwrap().reduced));
    group.finish();
}

criterion_group!(benches, graph_rank, metric_rank, reduction);
criterion_main!(benches);
