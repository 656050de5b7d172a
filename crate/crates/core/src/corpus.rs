//! Deterministic test material: small multigraphs up to isomorphism and
//! seeded random divisors, functions and permutations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divisor::Divisor;
use crate::permutation::Permutation;
use crate::plfunc::PlFunction;
use crate::rational::{int, ratio, Rational};
use crate::topology::{Graph, Host, MetricGraph, Point};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edge multiset in a canonical vertex labelling: the lexicographically
/// smallest sorted edge list over all relabellings.
fn canonical_form(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut relabelled: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        relabelled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabelled < *b) {
            best = Some(relabelled);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every connected multigraph with `1..=max_n` vertices and `0..=max_m`
/// edges, one per isomorphism class, ordered by `(n, m, edge list)`.
pub fn multigraphs(max_n: usize, max_m: usize, loops: bool) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).filter(|&(a, b)| loops || a != b).collect();
        for m in 0..=max_m {
            let mut seen = BTreeSet::new();
            let mut choice = vec![0usize; m];
            loop {
                if m == 0 || !pairs.is_empty() {
                    let edges: Vec<(usize, usize)> = choice.iter().map(|&i| pairs[i]).collect();
                    if connected(n, &edges) {
                        seen.insert(canonical_form(n, &edges));
                    }
                }
                // Next multiset (non-decreasing index tuple).
                let mut i = m;
                while i > 0 && choice[i - 1] + 1 >= pairs.len() {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                choice[i - 1] += 1;
                let x = choice[i - 1];
                for slot in choice.iter_mut().skip(i) {
                    *slot = x;
                }
            }
            for edges in seen {
                out.push(Graph::from_edges(n, &edges).expect("connected by construction"));
            }
        }
    }
    out
}

/// `g` with every edge of length one.
pub fn unit_metric(g: &Graph) -> MetricGraph {
    g.to_metric()
}

/// `g` with lengths drawn from `choices`.
pub fn random_lengths(g: &Graph, choices: &[Rational], rng: &mut CorpusRng) -> MetricGraph {
    let lengths = (0..g.edge_count()).map(|_| choices.choose(rng).expect("nonempty choices").clone()).collect();
    MetricGraph::new(g.clone(), lengths).expect("positive lengths")
}

/// The length set `{1, 1/2, 3/2, 2}`.
pub fn mixed_lengths() -> Vec<Rational> {
    vec![int(1), ratio(1, 2), ratio(3, 2), int(2)]
}

/// Vertex divisor with values uniform in `lo..=hi`.
pub fn random_vertex_divisor(host: &impl Host, n: usize, lo: i64, hi: i64, rng: &mut CorpusRng) -> Divisor {
    let values: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    Divisor::from_vertex_values(host, &values)
}

/// Random interior point with an offset whose denominator divides `den`.
pub fn random_interior_point(g: &MetricGraph, den: i64, rng: &mut CorpusRng) -> Option<Point> {
    if g.edge_count() == 0 {
        return None;
    }
    let e = rng.gen_range(0..g.edge_count());
    let steps = (g.length(e) * int(den)).floor().to_integer();
    let steps: i64 = steps.try_into().ok()?;
    if steps < 2 {
        return None;
    }
    let k = rng.gen_range(1..steps);
    g.point_at(e, &ratio(k, den)).ok().filter(|p| !p.is_vertex())
}

/// Divisor with a few chips on vertices and interior points.
pub fn random_divisor(g: &MetricGraph, chips: usize, lo: i64, hi: i64, rng: &mut CorpusRng) -> Divisor {
    let mut d = Divisor::zero(g);
    for _ in 0..chips {
        let p = if rng.gen_bool(0.5) {
            random_interior_point(g, 4, rng)
        } else {
            None
        }
        .unwrap_or_else(|| Point::Vertex(rng.gen_range(0..g.vertex_count())));
        d.add_chips(p, rng.gen_range(lo..=hi));
    }
    d
}

/// Random valid function: random half-integer vertex values, and on every
/// edge two integer slopes `a < b` around the average slope joined at the
/// one breakpoint that matches the end values.
pub fn random_pl_function(g: &MetricGraph, rng: &mut CorpusRng) -> PlFunction {
    let values: Vec<Rational> = (0..g.vertex_count()).map(|_| ratio(rng.gen_range(-8..=8), 2)).collect();
    let mut breakpoints = vec![Vec::new(); g.edge_count()];
    for (e, edge) in g.graph().edges().iter().enumerate() {
        let len = g.length(e);
        let rise = &values[edge.head] - &values[edge.tail];
        let avg = &rise / len;
        if avg.is_integer() && rng.gen_bool(0.3) {
            continue;
        }
        let a = avg.floor() - int(rng.gen_range(0..=1)) - if avg.is_integer() { int(1) } else { int(0) };
        let b = avg.ceil() + int(rng.gen_range(0..=1)) + if avg.is_integer() { int(1) } else { int(0) };
        // a * t + b * (len - t) = rise
        let t = (&b * len - &rise) / (&b - &a);
        let y = &values[edge.tail] + &a * &t;
        breakpoints[e].push((t, y));
    }
    PlFunction::new(g, values, breakpoints).expect("integer slopes by construction")
}

/// Random permutation: every vertex and loop midpoint, minus a random
/// selection of degree-two vertices that are not needed to cut a cycle, plus
/// a few random interior points, in random order.
pub fn random_permutation(g: &MetricGraph, extra: usize, rng: &mut CorpusRng) -> Permutation {
    let mut points: Vec<Point> = (0..g.vertex_count()).map(Point::Vertex).collect();
    for (e, edge) in g.graph().edges().iter().enumerate() {
        if edge.is_loop() {
            points.push(Point::interior(e, g.length(e) / int(2)));
        }
    }
    for _ in 0..extra {
        if let Some(p) = random_interior_point(g, 6, rng) {
            if !points.contains(&p) {
                points.push(p);
            }
        }
    }
    let mut droppable: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) == 2).collect();
    droppable.shuffle(rng);
    for v in droppable {
        if rng.gen_bool(0.5) {
            let trial: Vec<Point> = points.iter().filter(|p| **p != Point::Vertex(v)).cloned().collect();
            if Permutation::new(g, trial.clone()).is_ok() {
                points = trial;
            }
        }
    }
    points.shuffle(rng);
    Permutation::new(g, points).expect("vertices and loop midpoints cut every cycle")
}
