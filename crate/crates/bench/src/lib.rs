//! Shared fixtures for the benchmarks.

use tropdiv::corpus;
use tropdiv::rational::{int, ratio};
use tropdiv::{Divisor, Graph, MetricGraph, Point};

/// Two vertices joined by `k` parallel edges of the given lengths.
pub fn banana(lengths: &[i64]) -> MetricGraph {
    let edges: Vec<_> = lengths.iter().map(|&l| (0, 1, int(l))).collect();
    MetricGraph::from_edges(2, &edges).expect("valid banana")
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    Graph::from_edges(n, &edges).expect("connected")
}

/// `n`-cycle with one chord, lengths alternating 1 and 3/2.
pub fn chorded_cycle(n: usize) -> MetricGraph {
    let mut edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, if i % 2 == 0 { int(1) } else { ratio(3, 2) })).collect();
    edges.push((0, n / 2, int(2)));
    MetricGraph::from_edges(n, &edges).expect("connected")
}

/// `d` chips spread over the vertices round robin.
pub fn spread(host: &impl tropdiv::Host, n: usize, chips: usize) -> Divisor {
    let mut values = vec![0i64; n];
    for i in 0..chips {
        values[i % n] += 1;
    }
    Divisor::from_vertex_values(host, &values)
}

/// Seeded divisor with chips on vertices and interior points.
pub fn random_divisor(g: &MetricGraph, chips: usize, seed: u64) -> Divisor {
    let mut rng = corpus::rng(seed);
    corpus::random_divisor(g, chips, 0, 2, &mut rng)
}

pub fn vertex(v: usize) -> Point {
    Point::Vertex(v)
}
