//! Graphs, metric graphs and tropical curves, together with the points that
//! divisors live on.
//!
//! Vertices and edges are addressed by dense indices; the string ids from the
//! input are kept for display and serialization only. Every edge has a
//! declared orientation (tail to head) and interior offsets are measured from
//! the tail.

mod refine;
pub(crate) use refine::insert_points;

pub use refine::{
    eliminate_loops, insert_point, scale_lengths, unit_subdivision, EdgeSpan, LoopElimination,
    Refinement, Subdivision,
};

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{One, Signed, Zero};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// A location on a host. Interior offsets are strictly inside their edge, so
/// structural equality is point equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    Interior { edge: usize, offset: Rational },
    /// Interior point of an infinite edge, offset from its attachment vertex.
    Ray { ray: usize, offset: Rational },
    /// The unbounded end of an infinite edge.
    End(usize),
}

impl Point {
    pub fn interior(edge: usize, offset: Rational) -> Point {
        Point::Interior { edge, offset }
    }

    pub fn as_vertex(&self) -> Option<usize> {
        match *self {
            Point::Vertex(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, Point::Vertex(_))
    }
}

/// Structural fingerprint of a host, used to reject mixing divisors from
/// different graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HostId(u64);

/// Anything divisors can live on.
pub trait Host {
    fn host_id(&self) -> HostId;
    fn contains(&self, p: &Point) -> bool;
    fn point_name(&self, p: &Point) -> String;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// Finite connected multigraph; loops allowed.
#[derive(Clone, Debug)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    /// `(edge, other end)` per edge-end at each vertex; a loop appears twice.
    incidence: Vec<Vec<(usize, usize)>>,
    id: HostId,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

fn fingerprint<'a>(
    vertex_count: usize,
    edges: &[Edge],
    lengths: impl Iterator<Item = &'a Rational>,
    rays: &[usize],
) -> HostId {
    let mut h = DefaultHasher::new();
    vertex_count.hash(&mut h);
    for e in edges {
        (e.tail, e.head).hash(&mut h);
    }
    for l in lengths {
        l.hash(&mut h);
    }
    rays.hash(&mut h);
    HostId(h.finish())
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Graph> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::new();
        for name in vertices.iter().chain(edges.iter().map(|e| &e.name)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateId(name.clone()));
            }
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(Error::UnknownVertex(e.name.clone()));
            }
            incidence[e.tail].push((i, e.head));
            incidence[e.head].push((i, e.tail));
        }
        let one = Rational::one();
        let id = fingerprint(vertices.len(), &edges, std::iter::repeat_n(&one, edges.len()), &[]);
        let g = Graph { vertices, edges, incidence, id };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Vertices `v0..v{n-1}`, edges `e1..em` in the given order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let vertices = (0..n).map(|i| format!("v{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(tail, head))| Edge { name: format!("e{}", i + 1), tail, head })
            .collect();
        Graph::new(vertices, edges)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(_, w) in &self.incidence[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge-ends at `v` as `(edge, other end)`; loops contribute two entries.
    pub fn incidence(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    /// Number of edge-ends at `v` (loops count twice).
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// Cyclomatic number |E| - |V| + 1.
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// Canonical divisor with value deg(v) - 2 at every vertex.
    pub fn canonical_divisor(&self) -> Divisor {
        let mut k = Divisor::zero(self);
        for v in 0..self.vertex_count() {
            k.add_chips(Point::Vertex(v), self.degree(v) as i64 - 2);
        }
        k
    }

    /// Unit-length metric graph with the same host identity.
    pub fn to_metric(&self) -> MetricGraph {
        MetricGraph::new(self.clone(), vec![Rational::one(); self.edge_count()])
            .expect("unit lengths are positive")
    }
}

impl Host for Graph {
    fn host_id(&self) -> HostId {
        self.id
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(*p, Point::Vertex(v) if v < self.vertex_count())
    }

    fn point_name(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) if *v < self.vertex_count() => self.vertices[*v].clone(),
            other => format!("{other:?}"),
        }
    }
}

/// Graph with exact positive rational edge lengths.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    graph: Graph,
    lengths: Vec<Rational>,
    /// Degree-2 vertices introduced by point insertion; always treated as branching.
    auxiliary: Vec<bool>,
    id: HostId,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &MetricGraph) -> bool {
        self.graph == other.graph && self.lengths == other.lengths
    }
}

impl Eq for MetricGraph {}

impl MetricGraph {
    pub fn new(graph: Graph, lengths: Vec<Rational>) -> Result<MetricGraph> {
        let aux = vec![false; graph.vertex_count()];
        MetricGraph::with_auxiliary(graph, lengths, aux)
    }

    pub(crate) fn with_auxiliary(
        graph: Graph,
        lengths: Vec<Rational>,
        auxiliary: Vec<bool>,
    ) -> Result<MetricGraph> {
        if lengths.len() != graph.edge_count() {
            return Err(Error::Invalid(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        for (e, l) in graph.edges().iter().zip(&lengths) {
            if !l.is_positive() {
                return Err(Error::NonPositiveLength {
                    edge: e.name.clone(),
                    length: format_rational(l),
                });
            }
        }
        let id = fingerprint(graph.vertex_count(), graph.edges(), lengths.iter(), &[]);
        Ok(MetricGraph { graph, lengths, auxiliary, id })
    }

    /// Convenience constructor: `v0..`, `e1..`, lengths as given.
    pub fn from_edges(n: usize, edges: &[(usize, usize, Rational)]) -> Result<MetricGraph> {
        let pairs: Vec<_> = edges.iter().map(|(u, v, _)| (*u, *v)).collect();
        let g = Graph::from_edges(n, &pairs)?;
        MetricGraph::new(g, edges.iter().map(|(_, _, l)| l.clone()).collect())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn length(&self, e: usize) -> &Rational {
        &self.lengths[e]
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    pub fn is_auxiliary(&self, v: usize) -> bool {
        self.auxiliary[v]
    }

    pub fn genus(&self) -> i64 {
        self.graph.genus()
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.lengths.iter().all(One::is_one)
    }

    pub fn canonical_divisor(&self) -> Divisor {
        let mut k = Divisor::zero(self);
        for v in 0..self.vertex_count() {
            k.add_chips(Point::Vertex(v), self.degree(v) as i64 - 2);
        }
        k
    }

    /// Canonical point at `offset` along `edge`: endpoints become vertices.
    pub fn point_at(&self, edge: usize, offset: &Rational) -> Result<Point> {
        let e = self.graph.edge(edge);
        let len = &self.lengths[edge];
        if offset.is_negative() || offset > len {
            return Err(Error::OffsetOutOfRange(format!(
                "{}@{} on edge of length {}",
                e.name,
                format_rational(offset),
                format_rational(len)
            )));
        }
        if offset.is_zero() {
            Ok(Point::Vertex(e.tail))
        } else if offset == len {
            Ok(Point::Vertex(e.head))
        } else {
            Ok(Point::interior(edge, offset.clone()))
        }
    }

    /// Branching points: vertices of degree other than two plus auxiliary
    /// vertices. A graph that is a single cycle gets its first vertex.
    pub fn branch_set(&self) -> Vec<usize> {
        let set: Vec<usize> = (0..self.vertex_count())
            .filter(|&v| self.degree(v) != 2 || self.auxiliary[v])
            .collect();
        if set.is_empty() {
            vec![0]
        } else {
            set
        }
    }

    /// Branch set used by enumerations once auxiliary points are present:
    /// every vertex.
    pub fn extended_branch_set(&self) -> Vec<usize> {
        (0..self.vertex_count()).collect()
    }

    pub fn max_length(&self) -> Rational {
        self.lengths.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min_length(&self) -> Option<Rational> {
        self.lengths.iter().min().cloned()
    }
}

impl Host for MetricGraph {
    fn host_id(&self) -> HostId {
        self.id
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => *v < self.vertex_count(),
            Point::Interior { edge, offset } => {
                *edge < self.edge_count() && offset.is_positive() && offset < &self.lengths[*edge]
            }
            _ => false,
        }
    }

    fn point_name(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) if *v < self.vertex_count() => self.graph.vertex_name(*v).to_string(),
            Point::Interior { edge, offset } if *edge < self.edge_count() => {
                format!("{}@{}", self.graph.edge(*edge).name, format_rational(offset))
            }
            other => format!("{other:?}"),
        }
    }
}

/// An infinite edge of a tropical curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub name: String,
    pub attach: usize,
    pub end_name: String,
}

/// Metric graph with some infinite leaf edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    metric: MetricGraph,
    rays: Vec<Ray>,
    id: HostId,
}

impl TropicalCurve {
    pub fn new(metric: MetricGraph, rays: Vec<Ray>) -> Result<TropicalCurve> {
        let mut names: BTreeSet<&str> = metric
            .graph()
            .vertex_names()
            .iter()
            .map(String::as_str)
            .chain(metric.graph().edges().iter().map(|e| e.name.as_str()))
            .collect();
        for r in &rays {
            if r.attach >= metric.vertex_count() {
                return Err(Error::UnknownVertex(r.name.clone()));
            }
            for n in [&r.name, &r.end_name] {
                if !names.insert(n.as_str()) {
                    return Err(Error::UnboundedEndDegree(n.clone()));
                }
            }
        }
        let attach: Vec<usize> = rays.iter().map(|r| r.attach).collect();
        let id = fingerprint(
            metric.vertex_count(),
            metric.graph().edges(),
            metric.lengths().iter(),
            &attach,
        );
        Ok(TropicalCurve { metric, rays, id })
    }

    pub fn metric(&self) -> &MetricGraph {
        &self.metric
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    /// Each infinite edge adds one edge and one vertex, so the genus is that
    /// of the finite part.
    pub fn genus(&self) -> i64 {
        self.metric.genus()
    }

    /// Degree of a vertex of the finite part, counting attached infinite edges.
    pub fn degree(&self, v: usize) -> usize {
        self.metric.degree(v) + self.rays.iter().filter(|r| r.attach == v).count()
    }

    /// deg(v) - 2 at every vertex, including -1 at each unbounded end.
    pub fn canonical_divisor(&self) -> Divisor {
        let mut k = Divisor::zero(self);
        for v in 0..self.metric.vertex_count() {
            k.add_chips(Point::Vertex(v), self.degree(v) as i64 - 2);
        }
        for r in 0..self.rays.len() {
            k.add_chips(Point::End(r), -1);
        }
        k
    }

    /// Drops the infinite edges and moves chips on them to their attachment
    /// vertices. Degree and effectiveness are preserved.
    pub fn retract(&self, d: &Divisor) -> Result<(MetricGraph, Divisor)> {
        d.check_host(self)?;
        let mut out = Divisor::zero(&self.metric);
        for (p, &n) in d.iter() {
            let q = match p {
                Point::Ray { ray, .. } | Point::End(ray) => Point::Vertex(self.rays[*ray].attach),
                other => other.clone(),
            };
            out.add_chips(q, n);
        }
        Ok((self.metric.clone(), out))
    }
}

impl Host for TropicalCurve {
    fn host_id(&self) -> HostId {
        self.id
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Ray { ray, offset } => *ray < self.rays.len() && offset.is_positive(),
            Point::End(ray) => *ray < self.rays.len(),
            other => self.metric.contains(other),
        }
    }

    fn point_name(&self, p: &Point) -> String {
        match p {
            Point::Ray { ray, offset } if *ray < self.rays.len() => {
                format!("{}@{}", self.rays[*ray].name, format_rational(offset))
            }
            Point::End(ray) if *ray < self.rays.len() => self.rays[*ray].end_name.clone(),
            other => self.metric.point_name(other),
        }
    }
}

/// A value that is one of the three host kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyHost {
    Metric(MetricGraph),
    Tropical(TropicalCurve),
}

impl AnyHost {
    pub fn genus(&self) -> i64 {
        match self {
            AnyHost::Metric(g) => g.genus(),
            AnyHost::Tropical(c) => c.genus(),
        }
    }

    pub fn canonical_divisor(&self) -> Divisor {
        match self {
            AnyHost::Metric(g) => g.canonical_divisor(),
            AnyHost::Tropical(c) => c.canonical_divisor(),
        }
    }

    pub fn metric(&self) -> &MetricGraph {
        match self {
            AnyHost::Metric(g) => g,
            AnyHost::Tropical(c) => c.metric(),
        }
    }
}

impl Host for AnyHost {
    fn host_id(&self) -> HostId {
        match self {
            AnyHost::Metric(g) => g.host_id(),
            AnyHost::Tropical(c) => c.host_id(),
        }
    }

    fn contains(&self, p: &Point) -> bool {
        match self {
            AnyHost::Metric(g) => g.contains(p),
            AnyHost::Tropical(c) => c.contains(p),
        }
    }

    fn point_name(&self, p: &Point) -> String {
        match self {
            AnyHost::Metric(g) => g.point_name(p),
            AnyHost::Tropical(c) => c.point_name(p),
        }
    }
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}
