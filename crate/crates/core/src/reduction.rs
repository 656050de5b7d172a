//! Reduced divisors, linear equivalence and the emptiness test for linear
//! systems.
//!
//! On graphs the reduced divisor is found by layered firing followed by
//! repeated Dhar burning. Metric graphs with rational data are handled on
//! their unit subdivision (after loops are split at their midpoints), where
//! graph and metric reducedness coincide.

use std::collections::VecDeque;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::permutation::{nu_divisor, Permutation, SegmentGraph};
use crate::plfunc::PlFunction;
use crate::rational::Rational;
use crate::topology::{eliminate_loops, unit_subdivision, Graph, Host, MetricGraph, Point, Refinement};

/// Reduced form on a graph plus the firing script that produced it:
/// `reduced = input + D_sigma` where `sigma` is the script read as a
/// function linear on every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphReduction {
    pub reduced: Vec<i64>,
    pub firing: Vec<i64>,
}

/// Reduced divisor on a metric graph and a function `f` with
/// `reduced = input + D_f`.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub reduced: Divisor,
    pub certificate: PlFunction,
}

/// Boundary data of a closed set at one of its points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub edges_leaving: i64,
    pub chips: i64,
    pub saturated: bool,
}

impl SaturationReport {
    pub fn new(edges_leaving: i64, chips: i64) -> SaturationReport {
        SaturationReport { edges_leaving, chips, saturated: edges_leaving <= chips }
    }
}

/// Loopless adjacency with multiplicities, the view chip-firing needs.
#[derive(Clone, Debug)]
pub struct FiringGraph {
    adj: Vec<Vec<(usize, i64)>>,
}

impl FiringGraph {
    pub fn new(g: &Graph) -> FiringGraph {
        let n = g.vertex_count();
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for e in g.edges() {
            if e.is_loop() {
                continue;
            }
            for (a, b) in [(e.tail, e.head), (e.head, e.tail)] {
                match adj[a].iter_mut().find(|(w, _)| *w == b) {
                    Some((_, m)) => *m += 1,
                    None => adj[a].push((b, 1)),
                }
            }
        }
        FiringGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, i64)] {
        &self.adj[v]
    }

    fn distances(&self, v0: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[v0] = 0;
        let mut queue = VecDeque::from([v0]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Fires every vertex of `set` `times` times.
    fn fire(&self, d: &mut [i64], firing: &mut [i64], set: &[bool], times: i64) {
        for v in 0..self.len() {
            if !set[v] {
                continue;
            }
            firing[v] += times;
            for &(w, m) in &self.adj[v] {
                if !set[w] {
                    d[v] -= times * m;
                    d[w] += times * m;
                }
            }
        }
    }

    /// Dhar burn from `v0`: the set of vertices that never catch fire.
    fn unburnt(&self, d: &[i64], v0: usize) -> Vec<bool> {
        let n = self.len();
        let mut burnt = vec![false; n];
        let mut exposure = vec![0i64; n];
        burnt[v0] = true;
        let mut stack = vec![v0];
        while let Some(v) = stack.pop() {
            for &(w, m) in &self.adj[v] {
                if burnt[w] {
                    continue;
                }
                exposure[w] += m;
                if d[w] < exposure[w] {
                    burnt[w] = true;
                    stack.push(w);
                }
            }
        }
        burnt.into_iter().map(|b| !b).collect()
    }

    /// The unique `v0`-reduced divisor equivalent to `d`.
    pub fn reduce(&self, d: &[i64], v0: usize) -> GraphReduction {
        let n = self.len();
        let mut d = d.to_vec();
        let mut firing = vec![0i64; n];

        // Layered firing: make every vertex other than v0 nonnegative,
        // farthest layer first.
        let dist = self.distances(v0);
        let depth = dist.iter().copied().max().unwrap_or(0);
        for layer in (1..=depth).rev() {
            let inner: Vec<bool> = dist.iter().map(|&x| x < layer).collect();
            let mut times = 0;
            for u in (0..n).filter(|&u| dist[u] == layer && d[u] < 0) {
                let cross: i64 = self.adj[u].iter().filter(|(w, _)| inner[*w]).map(|(_, m)| m).sum();
                times = times.max((-d[u] + cross - 1) / cross);
            }
            if times > 0 {
                self.fire(&mut d, &mut firing, &inner, times);
            }
        }

        // Burning: fire the unburnt set as often as stays legal.
        loop {
            let unburnt = self.unburnt(&d, v0);
            if !unburnt.iter().any(|&u| u) {
                break;
            }
            let times = (0..n)
                .filter(|&u| unburnt[u])
                .filter_map(|u| {
                    let out: i64 = self.adj[u].iter().filter(|(w, _)| !unburnt[*w]).map(|(_, m)| m).sum();
                    (out > 0).then(|| d[u] / out)
                })
                .min()
                .expect("an unburnt set borders the burnt one");
            debug_assert!(times >= 1);
            self.fire(&mut d, &mut firing, &unburnt, times);
        }
        GraphReduction { reduced: d, firing }
    }

    pub fn is_reduced(&self, d: &[i64], v0: usize) -> bool {
        (0..self.len()).all(|v| v == v0 || d[v] >= 0) && !self.unburnt(d, v0).iter().any(|&u| u)
    }

    /// Subset-by-subset check of reducedness; exponential, for tests.
    pub fn is_reduced_exhaustive(&self, d: &[i64], v0: usize) -> bool {
        let n = self.len();
        assert!(n <= 24, "exhaustive check limited to small graphs");
        if (0..n).any(|v| v != v0 && d[v] < 0) {
            return false;
        }
        let others: Vec<usize> = (0..n).filter(|&v| v != v0).collect();
        for mask in 1u32..(1 << others.len()) {
            let mut in_a = vec![false; n];
            for (i, &v) in others.iter().enumerate() {
                in_a[v] = mask >> i & 1 == 1;
            }
            let has_unsaturated = (0..n).filter(|&v| in_a[v]).any(|v| {
                let outdeg: i64 = self.adj[v].iter().filter(|(w, _)| !in_a[*w]).map(|(_, m)| m).sum();
                d[v] < outdeg
            });
            if !has_unsaturated {
                return false;
            }
        }
        true
    }

    /// Whether `d` is equivalent to no effective divisor.
    pub fn is_empty_system(&self, d: &[i64], v0: usize) -> bool {
        if d.iter().all(|&x| x >= 0) {
            return false;
        }
        if d.iter().sum::<i64>() < 0 {
            return true;
        }
        self.reduce(d, v0).reduced[v0] < 0
    }
}

/// Base point used whenever a canonical reduced form is needed: the vertex
/// with the lexicographically smallest id.
pub fn default_base(g: &Graph) -> usize {
    (0..g.vertex_count()).min_by(|&a, &b| g.vertex_name(a).cmp(g.vertex_name(b))).unwrap_or(0)
}

pub fn reduce_graph(g: &Graph, d: &Divisor, v0: usize) -> Result<GraphReduction> {
    d.check_host(g)?;
    let values = d.vertex_values(g.vertex_count())?;
    Ok(FiringGraph::new(g).reduce(&values, v0))
}

pub fn is_reduced_graph(g: &Graph, d: &Divisor, v0: usize) -> Result<bool> {
    d.check_host(g)?;
    let values = d.vertex_values(g.vertex_count())?;
    Ok(FiringGraph::new(g).is_reduced(&values, v0))
}

/// Loops split, then unit-subdivided with `marks` on the grid.
pub(crate) struct Grid {
    pub graph: Graph,
    pub map: Refinement,
    pub firing: FiringGraph,
}

impl Grid {
    pub fn new(g: &MetricGraph, marks: &[Point]) -> Result<Grid> {
        let split = eliminate_loops(g);
        let marks: Vec<Point> = marks.iter().map(|p| split.refinement.forward(p)).collect::<Result<_>>()?;
        let sub = unit_subdivision(&split.graph, &marks)?;
        let map = split.refinement.then(&sub.refinement);
        let firing = FiringGraph::new(&sub.graph);
        Ok(Grid { graph: sub.graph, map, firing })
    }

    pub fn vertex_of(&self, p: &Point) -> Result<usize> {
        self.map
            .forward(p)?
            .as_vertex()
            .ok_or_else(|| Error::InvalidPoint(format!("{p:?} is off the grid")))
    }

    pub fn values(&self, d: &Divisor) -> Result<Vec<i64>> {
        let mut out = vec![0; self.graph.vertex_count()];
        for (p, &n) in d.iter() {
            out[self.vertex_of(p)?] += n;
        }
        Ok(out)
    }

    pub fn divisor(&self, values: &[i64]) -> Divisor {
        let mut d = Divisor::with_host(self.map.base_id());
        for (v, &n) in values.iter().enumerate() {
            d.add_chips(self.map.vertex_origin(v).clone(), n);
        }
        d
    }

    /// The grid function `values` (linear on grid edges) on the base graph.
    pub fn function(&self, values: &[i64], base: &MetricGraph) -> Result<PlFunction> {
        let unit = self.graph.to_metric();
        let f = PlFunction::linear(&unit, values.iter().map(|&x| Rational::from_integer(x.into())).collect())?;
        f.pull_back(&self.map, base)
    }
}

fn marks_for(d: &Divisor, extra: &[Point]) -> Vec<Point> {
    d.support().cloned().chain(extra.iter().cloned()).collect()
}

/// The unique `v0`-reduced divisor equivalent to `d` on a metric graph.
pub fn reduce_metric(g: &MetricGraph, d: &Divisor, v0: &Point) -> Result<ReductionResult> {
    d.check_host(g)?;
    if !g.contains(v0) {
        return Err(Error::InvalidPoint(g.point_name(v0)));
    }
    let grid = Grid::new(g, &marks_for(d, std::slice::from_ref(v0)))?;
    let base = grid.vertex_of(v0)?;
    let red = grid.firing.reduce(&grid.values(d)?, base);
    Ok(ReductionResult { reduced: grid.divisor(&red.reduced), certificate: grid.function(&red.firing, g)? })
}

pub fn is_reduced_metric(g: &MetricGraph, d: &Divisor, v0: &Point) -> Result<bool> {
    Ok(reduce_metric(g, d, v0)?.reduced == *d)
}

fn base_point(g: &MetricGraph) -> Point {
    Point::Vertex(default_base(g.graph()))
}

/// Outcome of [`equivalent`].
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub equivalent: bool,
    /// When equivalent: `f` with `d2 = d1 + D_f`.
    pub witness: Option<PlFunction>,
}

pub fn equivalent(g: &MetricGraph, d1: &Divisor, d2: &Divisor) -> Result<Equivalence> {
    if d1.host() != d2.host() {
        return Err(Error::HostMismatch);
    }
    d1.check_host(g)?;
    d2.check_host(g)?;
    if d1.degree() != d2.degree() {
        return Ok(Equivalence { equivalent: false, witness: None });
    }
    let v0 = base_point(g);
    let marks: Vec<Point> = d1.support().chain(d2.support()).cloned().chain([v0.clone()]).collect();
    let grid = Grid::new(g, &marks)?;
    let base = grid.vertex_of(&v0)?;
    let r1 = grid.firing.reduce(&grid.values(d1)?, base);
    let r2 = grid.firing.reduce(&grid.values(d2)?, base);
    if r1.reduced != r2.reduced {
        return Ok(Equivalence { equivalent: false, witness: None });
    }
    let diff: Vec<i64> = r1.firing.iter().zip(&r2.firing).map(|(a, b)| a - b).collect();
    Ok(Equivalence { equivalent: true, witness: Some(grid.function(&diff, g)?) })
}

/// 0 if `d` is equivalent to an effective divisor, 1 otherwise.
pub fn epsilon(g: &MetricGraph, d: &Divisor) -> Result<u8> {
    d.check_host(g)?;
    if d.is_effective() {
        return Ok(0);
    }
    if d.degree() < 0 {
        return Ok(1);
    }
    let v0 = base_point(g);
    let grid = Grid::new(g, &marks_for(d, std::slice::from_ref(&v0)))?;
    let base = grid.vertex_of(&v0)?;
    Ok(u8::from(grid.firing.is_empty_system(&grid.values(d)?, base)))
}

/// Either `d` has an effective equivalent, or a permutation `P` with
/// `nu_P >= D0` for the reduced form `D0` of `d`.
#[derive(Clone, Debug)]
pub enum Witness {
    Effective,
    Dominated { permutation: Permutation, reduced: Divisor },
}

pub fn nonspecial_witness(g: &MetricGraph, d: &Divisor) -> Result<Witness> {
    d.check_host(g)?;
    let v0 = base_point(g);
    let split = eliminate_loops(g);
    let branch: Vec<Point> = split
        .graph
        .branch_set()
        .into_iter()
        .map(|v| split.refinement.vertex_origin(v).clone())
        .collect();
    let grid = Grid::new(g, &marks_for(d, &[std::slice::from_ref(&v0), &branch[..]].concat()))?;
    let base = grid.vertex_of(&v0)?;
    let red = grid.firing.reduce(&grid.values(d)?, base);
    if red.reduced[base] >= 0 {
        return Ok(Witness::Effective);
    }
    let reduced = grid.divisor(&red.reduced);

    let n = grid.graph.vertex_count();
    let mut in_q = vec![false; n];
    for p in branch.iter().chain(reduced.support()).chain([&v0]) {
        in_q[grid.vertex_of(p)?] = true;
    }
    complete_transversal(g, &grid, &mut in_q)?;

    // Order Q: start at v0, then repeatedly a non-saturated boundary point of
    // the closed set cut off by the points not yet ordered.
    let mut ordered = vec![false; n];
    ordered[base] = true;
    let mut order = vec![base];
    let remaining = in_q.iter().filter(|&&q| q).count() - 1;
    for _ in 0..remaining {
        let reach = reachable_avoiding(&grid.firing, base, |v| in_q[v] && !ordered[v]);
        let next = (0..n)
            .filter(|&v| in_q[v] && !ordered[v])
            .map(|v| {
                let leaving: i64 = grid.firing.neighbors(v).iter().filter(|(w, _)| reach[*w]).map(|(_, m)| m).sum();
                (v, SaturationReport::new(leaving, red.reduced[v]))
            })
            .filter(|(_, s)| s.edges_leaving > 0 && !s.saturated)
            .min_by(|a, b| grid.map.vertex_origin(a.0).cmp(grid.map.vertex_origin(b.0)))
            .map(|(v, _)| v)
            .ok_or_else(|| Error::Invalid("reduced divisor has a saturated boundary".into()))?;
        ordered[next] = true;
        order.push(next);
    }
    let points: Vec<Point> = order.iter().map(|&v| grid.map.vertex_origin(v).clone()).collect();
    let permutation = Permutation::new(g, points)?;
    debug_assert!({
        let nu = nu_divisor(g, &permutation)?;
        (&nu - &reduced).is_effective() || (&nu - &reduced).is_zero()
    });
    Ok(Witness::Dominated { permutation, reduced })
}

/// Vertices reachable from `start` without entering a blocked vertex.
fn reachable_avoiding(fg: &FiringGraph, start: usize, blocked: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; fg.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(w, _) in fg.neighbors(v) {
            if !seen[w] && !blocked(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Adds one grid vertex to every cycle that the chosen points leave uncut,
/// so the resulting point set supports a permutation.
fn complete_transversal(g: &MetricGraph, grid: &Grid, in_q: &mut [bool]) -> Result<()> {
    loop {
        let support: Vec<Point> = (0..in_q.len()).filter(|&v| in_q[v]).map(|v| grid.map.vertex_origin(v).clone()).collect();
        match SegmentGraph::build(g, &support) {
            Ok(_) => return Ok(()),
            Err(Error::MissingSupportPoint(_)) => {}
            Err(e) => return Err(e),
        }
        // Some support point closes a cycle of grid vertices outside Q; cut
        // it at the middle grid vertex of that cycle.
        let added = (0..in_q.len()).filter(|&v| in_q[v]).find_map(|s| closed_cycle_middle(grid, in_q, s));
        match added {
            Some(v) => in_q[v] = true,
            None => return Err(Error::Invalid("cannot complete loop transversal".into())),
        }
    }
}

fn closed_cycle_middle(grid: &Grid, in_q: &[bool], s: usize) -> Option<usize> {
    let g = &grid.graph;
    for &(e0, first) in g.incidence(s) {
        let mut path = Vec::new();
        let (mut prev_edge, mut cur) = (e0, first);
        while !in_q[cur] {
            path.push(cur);
            let &(e, next) = g.incidence(cur).iter().find(|(x, _)| *x != prev_edge)?;
            prev_edge = e;
            cur = next;
        }
        if cur == s && !path.is_empty() {
            return Some(path[path.len() / 2]);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn banana_graph() -> Graph {
        Graph::from_edges(2, &[(0, 1); 3]).unwrap()
    }

    #[test]
    fn banana_three_chips_move_to_base() {
        let g = banana_graph();
        let d = Divisor::from_vertex_values(&g, &[0, 3]);
        let r = reduce_graph(&g, &d, 0).unwrap();
        assert_eq!(r.reduced, vec![3, 0]);
        let fg = FiringGraph::new(&g);
        assert!(fg.is_reduced_exhaustive(&r.reduced, 0));
        assert!(!fg.is_reduced_exhaustive(&[0, 3], 0));
        assert!(!is_reduced_graph(&g, &d, 0).unwrap());
        assert!(is_reduced_graph(&g, &Divisor::from_vertex_values(&g, &[3, 0]), 0).unwrap());
    }

    #[test]
    fn reduced_input_is_fixed_with_zero_script() {
        let g = banana_graph();
        let d = Divisor::from_vertex_values(&g, &[5, 2]);
        let r = reduce_graph(&g, &d, 0).unwrap();
        assert_eq!(r.reduced, vec![5, 2]);
        assert!(r.firing.iter().all(|&x| x == 0));
    }

    #[test]
    fn triangle_reduction_matches_exhaustive_search() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let fg = FiringGraph::new(&g);
        let r = fg.reduce(&[0, 2, 0], 0);
        assert_eq!(r.reduced, vec![1, 0, 1]);
        // Brute force over firing scripts in a small box: exactly one
        // equivalent divisor is reduced.
        let mut reduced_forms = Vec::new();
        for a in -3..=3 {
            for b in -3..=3 {
                let script = [0i64, a, b];
                let mut d = vec![0, 2, 0];
                for v in 0..3 {
                    for &(w, m) in fg.neighbors(v) {
                        d[v] -= m * script[v];
                        d[w] += m * script[v];
                    }
                }
                if fg.is_reduced_exhaustive(&d, 0) && !reduced_forms.contains(&d) {
                    reduced_forms.push(d);
                }
            }
        }
        assert_eq!(reduced_forms, vec![vec![1, 0, 1]]);
    }

    #[test]
    fn negative_off_base_is_not_reduced() {
        let g = banana_graph();
        assert!(!FiringGraph::new(&g).is_reduced(&[4, -1], 0));
    }

    #[test]
    fn firing_script_certifies_reduction() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).unwrap();
        let metric = g.to_metric();
        let d = Divisor::from_vertex_values(&g, &[-3, 4, -1, 5]);
        let r = reduce_graph(&g, &d, 0).unwrap();
        let f = PlFunction::linear(&metric, r.firing.iter().map(|&x| int(x)).collect()).unwrap();
        let lhs = &Divisor::from_vertex_values(&g, &r.reduced) - &d;
        assert_eq!(lhs, f.divisor().rehost(&g).unwrap());
    }

    #[test]
    fn metric_banana_example() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(3)), (0, 1, int(4))]).unwrap();
        let d = Divisor::from_chips(&g, [(Point::Vertex(1), 3)]).unwrap();
        let r = reduce_metric(&g, &d, &Point::Vertex(0)).unwrap();
        let expected = Divisor::from_chips(
            &g,
            [(Point::Vertex(0), 1), (Point::interior(1, int(1)), 1), (Point::interior(2, int(2)), 1)],
        )
        .unwrap();
        assert_eq!(r.reduced, expected);
        assert_eq!(&d + &r.certificate.divisor(), r.reduced);
    }

    #[test]
    fn effective_at_base_is_unchanged() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(3))]).unwrap();
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), 4)]).unwrap();
        assert_eq!(reduce_metric(&g, &d, &Point::Vertex(0)).unwrap().reduced, d);
    }

    #[test]
    fn equivalence_examples() {
        let tree = MetricGraph::from_edges(3, &[(0, 1, int(1)), (1, 2, int(2))]).unwrap();
        let a = Divisor::from_chips(&tree, [(Point::Vertex(0), 1)]).unwrap();
        let b = Divisor::from_chips(&tree, [(Point::Vertex(2), 1)]).unwrap();
        let eq = equivalent(&tree, &a, &b).unwrap();
        assert!(eq.equivalent);
        assert_eq!(&a + &eq.witness.unwrap().divisor(), b);
        assert!(equivalent(&tree, &a, &a).unwrap().equivalent);

        let cycle = MetricGraph::from_edges(2, &[(0, 1, int(1)), (1, 0, int(1))]).unwrap();
        let a = Divisor::from_chips(&cycle, [(Point::Vertex(0), 1)]).unwrap();
        let b = Divisor::from_chips(&cycle, [(Point::Vertex(1), 1)]).unwrap();
        assert!(!equivalent(&cycle, &a, &b).unwrap().equivalent);
        let c = Divisor::from_chips(&cycle, [(Point::Vertex(1), 2)]).unwrap();
        assert!(!equivalent(&cycle, &a, &c).unwrap().equivalent);
    }

    #[test]
    fn epsilon_examples() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(1)), (1, 0, int(2))]).unwrap();
        assert_eq!(epsilon(&g, &Divisor::zero(&g)).unwrap(), 0);
        let neg = Divisor::from_chips(&g, [(Point::Vertex(0), 2), (Point::Vertex(1), -3)]).unwrap();
        assert_eq!(epsilon(&g, &neg).unwrap(), 1);
        let p = Permutation::new(&g, vec![Point::Vertex(0), Point::Vertex(1)]).unwrap();
        assert_eq!(epsilon(&g, &nu_divisor(&g, &p).unwrap()).unwrap(), 1);
    }

    #[test]
    fn witness_for_minus_base() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2)), (1, 1, int(1))]).unwrap();
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), -1)]).unwrap();
        match nonspecial_witness(&g, &d).unwrap() {
            Witness::Dominated { permutation, reduced } => {
                let nu = nu_divisor(&g, &permutation).unwrap();
                let gap = &nu - &reduced;
                assert!(gap.iter().all(|(_, &n)| n >= 0));
                assert_eq!(nu.get(&permutation.points()[0]), -1);
                assert_eq!(epsilon(&g, &(&nu - &d)).unwrap(), 0);
            }
            Witness::Effective => panic!("-(v0) has no effective equivalent"),
        }
        let e = Divisor::from_chips(&g, [(Point::Vertex(1), 1)]).unwrap();
        assert!(matches!(nonspecial_witness(&g, &e).unwrap(), Witness::Effective));
    }

    #[test]
    fn witness_on_plain_cycle_cuts_it() {
        let g = MetricGraph::from_edges(3, &[(0, 1, int(1)), (1, 2, int(1)), (2, 0, int(1))]).unwrap();
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), -1)]).unwrap();
        let Witness::Dominated { permutation, reduced } = nonspecial_witness(&g, &d).unwrap() else {
            panic!("expected a permutation");
        };
        let nu = nu_divisor(&g, &permutation).unwrap();
        assert!((&nu - &reduced).iter().all(|(_, &n)| n >= 0));
    }
}
