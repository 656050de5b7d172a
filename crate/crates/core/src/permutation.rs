//! Orderings of finitely many points, the segments they cut the graph into,
//! and the divisors `nu_P` built from them.

use std::collections::HashMap;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::topology::{Host, HostId, MetricGraph, Point};

/// An ordered sequence of distinct points whose support contains every
/// branching point and cuts every cycle of degree-2 points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    host: HostId,
    points: Vec<Point>,
}

/// A maximal segment whose ends are support points and whose interior
/// avoids the support. Parallel segments are distinguished by their edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSegment {
    pub start: Point,
    pub end: Point,
    /// Edges of the host the segment runs along, in walking order.
    pub edges: Vec<usize>,
}

/// Support points and, per point, the far end of every segment leaving it.
#[derive(Clone, Debug)]
pub struct SegmentGraph {
    pub points: Vec<Point>,
    pub ends: Vec<Vec<usize>>,
    pub(crate) segments: Vec<PSegment>,
}

impl SegmentGraph {
    /// Cuts `g` at `support`. Fails if a vertex of degree other than two is
    /// missing or if some segment would close up on itself.
    pub fn build(g: &MetricGraph, support: &[Point]) -> Result<SegmentGraph> {
        let graph = g.graph();
        let mut index: HashMap<&Point, usize> = HashMap::new();
        for (i, p) in support.iter().enumerate() {
            if !g.contains(p) {
                return Err(Error::InvalidPoint(g.point_name(p)));
            }
            if index.insert(p, i).is_some() {
                return Err(Error::RepeatedPoint(g.point_name(p)));
            }
        }
        for v in 0..g.vertex_count() {
            if graph.degree(v) != 2 && !index.contains_key(&Point::Vertex(v)) {
                return Err(Error::MissingSupportPoint(g.point_name(&Point::Vertex(v))));
            }
        }
        // Interior support points per edge, sorted by offset.
        let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); g.edge_count()];
        for (i, p) in support.iter().enumerate() {
            if let Point::Interior { edge, .. } = p {
                on_edge[*edge].push(i);
            }
        }
        for list in &mut on_edge {
            list.sort_by(|a, b| support[*a].cmp(&support[*b]));
        }

        // Walk from each support point in each direction.
        let mut ends = vec![Vec::new(); support.len()];
        let mut segments = Vec::new();
        for (i, p) in support.iter().enumerate() {
            let starts: Vec<(usize, bool)> = match p {
                Point::Vertex(v) => graph
                    .edges()
                    .iter()
                    .enumerate()
                    .flat_map(|(e, edge)| {
                        let mut dirs = Vec::new();
                        if edge.tail == *v {
                            dirs.push((e, true));
                        }
                        if edge.head == *v {
                            dirs.push((e, false));
                        }
                        dirs
                    })
                    .collect(),
                Point::Interior { edge, .. } => vec![(*edge, true), (*edge, false)],
                _ => unreachable!("validated above"),
            };
            for (edge, forward) in starts {
                let (end, edges) = walk(g, support, &index, &on_edge, p, edge, forward);
                if end == i {
                    return Err(Error::MissingSupportPoint(format!(
                        "transversal point on the cycle through {}",
                        g.point_name(p)
                    )));
                }
                ends[i].push(end);
                let first = edges[0];
                let last = *edges.last().unwrap();
                // Each segment is met from both ends; keep one copy.
                if (first, i) <= (last, end) {
                    segments.push(PSegment { start: p.clone(), end: support[end].clone(), edges });
                }
            }
        }
        Ok(SegmentGraph { points: support.to_vec(), ends, segments })
    }

    /// `nu` value at each support point for the given order (`order[k]` is
    /// the index into `points` placed k-th).
    pub fn nu_values(&self, order: &[usize]) -> Vec<i64> {
        let mut pos = vec![usize::MAX; self.points.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        (0..self.points.len())
            .map(|i| self.ends[i].iter().filter(|&&j| pos[j] < pos[i]).count() as i64 - 1)
            .collect()
    }
}

/// Follows the graph from support point `from` along `edge` (with or
/// against its orientation) until the next support point.
fn walk(
    g: &MetricGraph,
    support: &[Point],
    index: &HashMap<&Point, usize>,
    on_edge: &[Vec<usize>],
    from: &Point,
    mut edge: usize,
    mut forward: bool,
) -> (usize, Vec<usize>) {
    let graph = g.graph();
    let mut edges = Vec::new();
    let mut after = match from {
        Point::Interior { offset, .. } => Some(offset),
        _ => None,
    };
    loop {
        edges.push(edge);
        let offset_of = |j: usize| match &support[j] {
            Point::Interior { offset, .. } => offset,
            _ => unreachable!("only interior points are listed per edge"),
        };
        let ahead = on_edge[edge].iter().copied().filter(|&j| match after {
            Some(a) if forward => offset_of(j) > a,
            Some(a) => offset_of(j) < a,
            None => true,
        });
        let next = if forward { ahead.min_by_key(|&j| offset_of(j)) } else { ahead.max_by_key(|&j| offset_of(j)) };
        if let Some(j) = next {
            return (j, edges);
        }
        let e = graph.edge(edge);
        let v = if forward { e.head } else { e.tail };
        if let Some(&j) = index.get(&Point::Vertex(v)) {
            return (j, edges);
        }
        // `v` has degree 2 and is not in the support: leave by its other edge-end.
        if e.is_loop() {
            after = None;
            continue;
        }
        let (next_edge, _) = *graph
            .incidence(v)
            .iter()
            .find(|(x, _)| *x != edge)
            .expect("degree-2 vertex has a second edge");
        forward = graph.edge(next_edge).tail == v;
        edge = next_edge;
        after = None;
    }
}

impl Permutation {
    pub fn new(g: &MetricGraph, points: Vec<Point>) -> Result<Permutation> {
        SegmentGraph::build(g, &points)?;
        Ok(Permutation { host: g.host_id(), points })
    }

    pub fn host(&self) -> HostId {
        self.host
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    /// The reverse order on the same support.
    pub fn reverse(&self) -> Permutation {
        let mut points = self.points.clone();
        points.reverse();
        Permutation { host: self.host, points }
    }

    pub fn segments(&self, g: &MetricGraph) -> Result<Vec<PSegment>> {
        self.check_host(g)?;
        Ok(SegmentGraph::build(g, &self.points)?.segments)
    }

    /// Inserts a point outside the support between the two ends of the
    /// segment containing it; `nu` does not change.
    pub fn insert_between_ends(&self, g: &MetricGraph, p: &Point) -> Result<Permutation> {
        self.check_host(g)?;
        if self.contains(p) || !g.contains(p) {
            return Err(Error::InvalidPoint(g.point_name(p)));
        }
        let mut cut = self.points.clone();
        cut.push(p.clone());
        let sg = SegmentGraph::build(g, &cut)?;
        let (start, end) = match sg.ends[cut.len() - 1][..] {
            [a, b] => (cut[a].clone(), cut[b].clone()),
            _ => return Err(Error::InvalidPoint(g.point_name(p))),
        };
        let pos = |q: &Point| self.points.iter().position(|x| x == q).unwrap();
        let later = pos(&start).max(pos(&end));
        let mut points = self.points.clone();
        points.insert(later, p.clone());
        Ok(Permutation { host: self.host, points })
    }

    fn check_host(&self, g: &MetricGraph) -> Result<()> {
        if self.host == g.host_id() {
            Ok(())
        } else {
            Err(Error::HostMismatch)
        }
    }
}

/// `nu_P`: at each support point, the number of segments to earlier points
/// minus one.
pub fn nu_divisor(g: &MetricGraph, p: &Permutation) -> Result<Divisor> {
    p.check_host(g)?;
    let sg = SegmentGraph::build(g, &p.points)?;
    let order: Vec<usize> = (0..p.points.len()).collect();
    let values = sg.nu_values(&order);
    let mut d = Divisor::zero(g);
    for (pt, n) in p.points.iter().zip(values) {
        d.add_chips(pt.clone(), n);
    }
    Ok(d)
}

pub fn reverse_perm(p: &Permutation) -> Permutation {
    p.reverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn banana() -> MetricGraph {
        MetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(1)), (0, 1, int(1))]).unwrap()
    }

    #[test]
    fn banana_nu() {
        let g = banana();
        let p = Permutation::new(&g, vec![Point::Vertex(0), Point::Vertex(1)]).unwrap();
        let nu = nu_divisor(&g, &p).unwrap();
        assert_eq!(nu.get(&Point::Vertex(0)), -1);
        assert_eq!(nu.get(&Point::Vertex(1)), 2);
        assert_eq!(nu.degree(), g.genus() - 1);
        let sum = &nu + &nu_divisor(&g, &p.reverse()).unwrap();
        assert_eq!(sum, g.canonical_divisor());
    }

    #[test]
    fn unit_loop_with_transversal() {
        let g = MetricGraph::from_edges(1, &[(0, 0, int(1))]).unwrap();
        let x = Point::interior(0, ratio(1, 2));
        let p = Permutation::new(&g, vec![Point::Vertex(0), x.clone()]).unwrap();
        let nu = nu_divisor(&g, &p).unwrap();
        assert_eq!(nu.get(&Point::Vertex(0)), -1);
        assert_eq!(nu.get(&x), 1);
        assert_eq!(nu.degree(), 0);
    }

    #[test]
    fn missing_transversal_or_branch_point() {
        let g = MetricGraph::from_edges(1, &[(0, 0, int(1))]).unwrap();
        assert!(matches!(Permutation::new(&g, vec![Point::Vertex(0)]), Err(Error::MissingSupportPoint(_))));
        let g = banana();
        assert!(matches!(Permutation::new(&g, vec![Point::Vertex(0)]), Err(Error::MissingSupportPoint(_))));
        assert!(matches!(
            Permutation::new(&g, vec![Point::Vertex(0), Point::Vertex(1), Point::Vertex(0)]),
            Err(Error::RepeatedPoint(_))
        ));
    }

    #[test]
    fn segments_through_degree_two_vertices() {
        // Triangle: v1 and v2 have degree 2 and may be left out.
        let g = MetricGraph::from_edges(3, &[(0, 1, int(1)), (1, 2, int(1)), (2, 0, int(1))]).unwrap();
        let x = Point::interior(1, ratio(1, 2));
        let p = Permutation::new(&g, vec![Point::Vertex(0), x.clone()]).unwrap();
        let segs = p.segments(&g).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(nu_divisor(&g, &p).unwrap().degree(), 0);
    }

    #[test]
    fn insertion_keeps_nu() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(3)), (0, 1, int(1))]).unwrap();
        let p = Permutation::new(&g, vec![Point::Vertex(1), Point::Vertex(0)]).unwrap();
        let nu = nu_divisor(&g, &p).unwrap();
        let q = p.insert_between_ends(&g, &Point::interior(1, int(2))).unwrap();
        assert_eq!(nu_divisor(&g, &q).unwrap(), nu);
        let r = q.insert_between_ends(&g, &Point::interior(1, int(1))).unwrap();
        assert_eq!(nu_divisor(&g, &r).unwrap(), nu);
    }

    #[test]
    fn reverse_is_involution() {
        let g = banana();
        let p = Permutation::new(&g, vec![Point::Vertex(1), Point::interior(2, ratio(1, 2)), Point::Vertex(0)]).unwrap();
        assert_eq!(reverse_perm(&reverse_perm(&p)), p);
        assert_eq!(nu_divisor(&g, &p.reverse()).unwrap().degree(), g.genus() - 1);
    }
}
