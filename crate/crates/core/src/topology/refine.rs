use num_traits::{One, Signed, Zero};

use super::{Edge, Graph, Host, HostId, MetricGraph, Point};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, lcm_denominators, Rational};

/// Where a derived edge sits on its base edge, in base length units.
/// `from < to` always: derived edges keep the base orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpan {
    pub edge: usize,
    pub from: Rational,
    pub to: Rational,
}

/// Point correspondence between a base metric graph and a derived graph
/// obtained by cutting edges at interior points and scaling all lengths.
///
/// Base vertex `i` is derived vertex `i`; new vertices follow.
#[derive(Clone, Debug)]
pub struct Refinement {
    scale: Rational,
    vertex_origin: Vec<Point>,
    edge_origin: Vec<EdgeSpan>,
    /// Derived edges along each base edge, ordered from its tail.
    chains: Vec<Vec<usize>>,
    derived_tails: Vec<usize>,
    derived_heads: Vec<usize>,
    base_id: HostId,
    derived_id: HostId,
}

impl Refinement {
    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn base_id(&self) -> HostId {
        self.base_id
    }

    pub fn derived_id(&self) -> HostId {
        self.derived_id
    }

    pub fn vertex_origin(&self, v: usize) -> &Point {
        &self.vertex_origin[v]
    }

    pub fn edge_origin(&self, e: usize) -> &EdgeSpan {
        &self.edge_origin[e]
    }

    pub fn chain(&self, base_edge: usize) -> &[usize] {
        &self.chains[base_edge]
    }

    /// Base point to derived point.
    pub fn forward(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Vertex(v) if *v < self.vertex_origin.len() => Ok(Point::Vertex(*v)),
            Point::Interior { edge, offset } if *edge < self.chains.len() => {
                for &h in &self.chains[*edge] {
                    let span = &self.edge_origin[h];
                    if offset < &span.from || offset > &span.to {
                        continue;
                    }
                    return Ok(if *offset == span.from {
                        Point::Vertex(self.derived_tails[h])
                    } else if *offset == span.to {
                        Point::Vertex(self.derived_heads[h])
                    } else {
                        Point::interior(h, (offset - &span.from) * &self.scale)
                    });
                }
                Err(Error::InvalidPoint(format!("{p:?}")))
            }
            _ => Err(Error::InvalidPoint(format!("{p:?}"))),
        }
    }

    /// Derived point to base point.
    pub fn inverse(&self, q: &Point) -> Result<Point> {
        match q {
            Point::Vertex(v) if *v < self.vertex_origin.len() => Ok(self.vertex_origin[*v].clone()),
            Point::Interior { edge, offset } if *edge < self.edge_origin.len() => {
                let span = &self.edge_origin[*edge];
                let base = &span.from + offset / &self.scale;
                if base.is_positive() {
                    Ok(Point::interior(span.edge, base))
                } else {
                    Err(Error::InvalidPoint(format!("{q:?}")))
                }
            }
            _ => Err(Error::InvalidPoint(format!("{q:?}"))),
        }
    }

    pub fn forward_divisor(&self, d: &Divisor) -> Result<Divisor> {
        if d.host() != self.base_id {
            return Err(Error::HostMismatch);
        }
        let mut out = Divisor::with_host(self.derived_id);
        for (p, &n) in d.iter() {
            out.add_chips(self.forward(p)?, n);
        }
        Ok(out)
    }

    pub fn inverse_divisor(&self, d: &Divisor) -> Result<Divisor> {
        if d.host() != self.derived_id {
            return Err(Error::HostMismatch);
        }
        let mut out = Divisor::with_host(self.base_id);
        for (p, &n) in d.iter() {
            out.add_chips(self.inverse(p)?, n);
        }
        Ok(out)
    }

    /// `self` maps G to H, `next` maps H to K; the result maps G to K.
    pub fn then(&self, next: &Refinement) -> Refinement {
        assert_eq!(self.derived_id, next.base_id, "refinements do not compose");
        let vertex_origin = next
            .vertex_origin
            .iter()
            .map(|p| self.inverse(p).expect("derived vertex maps back"))
            .collect();
        let edge_origin: Vec<EdgeSpan> = next
            .edge_origin
            .iter()
            .map(|span| {
                let outer = &self.edge_origin[span.edge];
                EdgeSpan {
                    edge: outer.edge,
                    from: &outer.from + &span.from / &self.scale,
                    to: &outer.from + &span.to / &self.scale,
                }
            })
            .collect();
        let chains = self
            .chains
            .iter()
            .map(|chain| chain.iter().flat_map(|&h| next.chains[h].iter().copied()).collect())
            .collect();
        Refinement {
            scale: &self.scale * &next.scale,
            vertex_origin,
            edge_origin,
            chains,
            base_id: self.base_id,
            derived_id: next.derived_id,
            derived_tails: next.derived_tails.clone(),
            derived_heads: next.derived_heads.clone(),
        }
    }
}

impl Refinement {
    pub fn identity(g: &MetricGraph) -> Refinement {
        refine(g, &vec![Vec::new(); g.edge_count()], &Rational::one(), false).1
    }
}

/// Cuts every edge at the given sorted interior offsets and multiplies all
/// lengths by `scale`.
fn refine(
    g: &MetricGraph,
    cuts: &[Vec<Rational>],
    scale: &Rational,
    auxiliary: bool,
) -> (MetricGraph, Refinement) {
    let base = g.graph();
    let mut names: Vec<String> = base.vertex_names().to_vec();
    let mut aux: Vec<bool> = (0..base.vertex_count()).map(|v| g.is_auxiliary(v)).collect();
    let mut vertex_origin: Vec<Point> = (0..base.vertex_count()).map(Point::Vertex).collect();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut edge_origin = Vec::new();
    let mut chains = Vec::with_capacity(base.edge_count());

    for (e, edge) in base.edges().iter().enumerate() {
        let len = g.length(e);
        let mut stops = vec![Rational::zero()];
        stops.extend(cuts[e].iter().cloned());
        stops.push(len.clone());
        let mut ends = vec![edge.tail];
        for c in &cuts[e] {
            ends.push(names.len());
            names.push(format!("{}@{}", edge.name, format_rational(c)));
            aux.push(auxiliary);
            vertex_origin.push(Point::interior(e, c.clone()));
        }
        ends.push(edge.head);
        let split = !cuts[e].is_empty();
        let mut chain = Vec::new();
        for k in 0..stops.len() - 1 {
            chain.push(edges.len());
            edges.push(Edge {
                name: if split { format!("{}.{}", edge.name, k + 1) } else { edge.name.clone() },
                tail: ends[k],
                head: ends[k + 1],
            });
            lengths.push((&stops[k + 1] - &stops[k]) * scale);
            edge_origin.push(EdgeSpan { edge: e, from: stops[k].clone(), to: stops[k + 1].clone() });
        }
        chains.push(chain);
    }
    let derived_tails = edges.iter().map(|e: &Edge| e.tail).collect();
    let derived_heads = edges.iter().map(|e: &Edge| e.head).collect();
    let graph = Graph::new(names, edges).expect("refinement of a valid graph is valid");
    let metric = MetricGraph::with_auxiliary(graph, lengths, aux).expect("positive lengths");
    let refinement = Refinement {
        scale: scale.clone(),
        vertex_origin,
        edge_origin,
        chains,
        base_id: g.host_id(),
        derived_id: metric.host_id(),
        derived_tails,
        derived_heads,
    };
    (metric, refinement)
}

/// Promotes an interior point to a degree-2 auxiliary vertex. A vertex point
/// gives back the same graph with the identity map.
pub fn insert_point(g: &MetricGraph, p: &Point) -> Result<(MetricGraph, Refinement)> {
    if !g.contains(p) {
        return Err(Error::InvalidPoint(g.point_name(p)));
    }
    insert_points(g, std::slice::from_ref(p))
}

pub(crate) fn insert_points(g: &MetricGraph, points: &[Point]) -> Result<(MetricGraph, Refinement)> {
    let mut cuts = vec![Vec::new(); g.edge_count()];
    for p in points {
        match p {
            Point::Vertex(v) if *v < g.vertex_count() => {}
            Point::Interior { edge, offset } if g.contains(p) => cuts[*edge].push(offset.clone()),
            _ => return Err(Error::InvalidPoint(g.point_name(p))),
        }
    }
    for c in &mut cuts {
        c.sort();
        c.dedup();
    }
    Ok(refine(g, &cuts, &Rational::one(), true))
}

/// Homothety: all lengths times `factor`.
pub fn scale_lengths(g: &MetricGraph, factor: &Rational) -> Result<(MetricGraph, Refinement)> {
    if !factor.is_positive() {
        return Err(Error::NonPositiveScale(format_rational(factor)));
    }
    Ok(refine(g, &vec![Vec::new(); g.edge_count()], factor, false))
}

/// Result of [`eliminate_loops`].
#[derive(Clone, Debug)]
pub struct LoopElimination {
    pub graph: MetricGraph,
    pub refinement: Refinement,
    /// The inserted loop midpoints, as vertices of `graph`.
    pub transversal: Vec<usize>,
}

/// Inserts an auxiliary vertex at the midpoint of every loop, so each loop
/// becomes a pair of parallel edges. The midpoints form the loop transversal.
pub fn eliminate_loops(g: &MetricGraph) -> LoopElimination {
    let mids: Vec<Point> = g
        .graph()
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_loop())
        .map(|(i, _)| Point::interior(i, g.length(i) / Rational::from_integer(2.into())))
        .collect();
    let (graph, refinement) = insert_points(g, &mids).expect("loop midpoints are interior");
    let transversal = mids
        .iter()
        .map(|p| refinement.forward(p).unwrap().as_vertex().unwrap())
        .collect();
    LoopElimination { graph, refinement, transversal }
}

/// Result of [`unit_subdivision`].
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub graph: Graph,
    pub refinement: Refinement,
}

impl Subdivision {
    /// Vertex of the subdivided graph at a base point that lies on the grid.
    pub fn forward_vertex(&self, p: &Point) -> Result<usize> {
        self.refinement
            .forward(p)?
            .as_vertex()
            .ok_or_else(|| Error::InvalidPoint(format!("{p:?} is not on the subdivision grid")))
    }

    pub fn inverse_vertex(&self, v: usize) -> &Point {
        self.refinement.vertex_origin(v)
    }

    pub fn scale(&self) -> &Rational {
        self.refinement.scale()
    }
}

/// Scales by the lcm `q` of all length and mark denominators and replaces
/// every edge of integer length `L` by a path of `L` unit edges. Every vertex
/// and every marked point lands on a vertex of the result.
pub fn unit_subdivision(g: &MetricGraph, marked: &[Point]) -> Result<Subdivision> {
    let mut offsets = Vec::new();
    for p in marked {
        match p {
            Point::Vertex(v) if *v < g.vertex_count() => {}
            Point::Interior { offset, .. } if g.contains(p) => offsets.push(offset),
            _ => return Err(Error::InvalidPoint(g.point_name(p))),
        }
    }
    let q = Rational::from_integer(lcm_denominators(g.lengths().iter().chain(offsets)));
    let cuts: Vec<Vec<Rational>> = g
        .lengths()
        .iter()
        .map(|len| {
            let units = (len * &q).to_integer();
            num_iter(&units).map(|k| Rational::from_integer(k) / &q).collect()
        })
        .collect();
    let (metric, refinement) = refine(g, &cuts, &q, false);
    debug_assert!(metric.has_unit_lengths());
    Ok(Subdivision { graph: metric.graph().clone(), refinement })
}

fn num_iter(units: &num_bigint::BigInt) -> impl Iterator<Item = num_bigint::BigInt> {
    let n: u64 = units.try_into().expect("subdivision too large");
    (1..n).map(num_bigint::BigInt::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn insert_point_splits_edge() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2))]).unwrap();
        let (h, map) = insert_point(&g, &Point::interior(0, ratio(1, 2))).unwrap();
        assert_eq!(h.lengths(), &[ratio(1, 2), ratio(3, 2)]);
        assert_eq!(h.vertex_count(), 3);
        assert!(h.is_auxiliary(2));
        let p = Point::interior(0, ratio(3, 2));
        let q = map.forward(&p).unwrap();
        assert_eq!(q, Point::interior(1, int(1)));
        assert_eq!(map.inverse(&q).unwrap(), p);
        assert_eq!(map.forward(&Point::interior(0, ratio(1, 2))).unwrap(), Point::Vertex(2));
    }

    #[test]
    fn insert_at_vertex_is_identity() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2))]).unwrap();
        let (h, map) = insert_point(&g, &Point::Vertex(1)).unwrap();
        assert_eq!(h, g);
        assert_eq!(map.forward(&Point::interior(0, int(1))).unwrap(), Point::interior(0, int(1)));
    }

    #[test]
    fn insert_on_loop_gives_parallel_edges() {
        let g = MetricGraph::from_edges(1, &[(0, 0, int(1))]).unwrap();
        let (h, _) = insert_point(&g, &Point::interior(0, ratio(1, 3))).unwrap();
        assert_eq!(h.lengths(), &[ratio(1, 3), ratio(2, 3)]);
        assert!(!h.graph().has_loops());
        assert_eq!(h.genus(), 1);
    }

    #[test]
    fn scaling_examples() {
        let g = MetricGraph::from_edges(2, &[(0, 1, ratio(3, 2)), (0, 1, int(1))]).unwrap();
        let (h, map) = scale_lengths(&g, &int(2)).unwrap();
        assert_eq!(h.lengths(), &[int(3), int(2)]);
        assert_eq!(map.forward(&Point::interior(0, ratio(3, 4))).unwrap(), Point::interior(0, ratio(3, 2)));
        let (same, _) = scale_lengths(&g, &int(1)).unwrap();
        assert_eq!(same, g);
        assert!(scale_lengths(&g, &int(0)).is_err());
        assert!(scale_lengths(&g, &int(-1)).is_err());
    }

    #[test]
    fn unit_subdivision_examples() {
        let g = MetricGraph::from_edges(2, &[(0, 1, ratio(3, 2))]).unwrap();
        let s = unit_subdivision(&g, &[]).unwrap();
        assert_eq!(s.scale(), &int(2));
        assert_eq!(s.graph.edge_count(), 3);

        let g = MetricGraph::from_edges(2, &[(0, 1, int(1))]).unwrap();
        let mark = Point::interior(0, ratio(1, 3));
        let s = unit_subdivision(&g, std::slice::from_ref(&mark)).unwrap();
        assert_eq!(s.graph.edge_count(), 3);
        let v = s.forward_vertex(&mark).unwrap();
        assert_eq!(s.inverse_vertex(v), &mark);

        let banana = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(3)), (0, 1, int(4))]).unwrap();
        let s = unit_subdivision(&banana, &[]).unwrap();
        assert_eq!(s.graph.edge_count(), 9);
        assert_eq!(s.graph.vertex_count(), 8);
        assert_eq!(s.graph.genus(), 2);
    }

    #[test]
    fn loops_eliminated_at_midpoints() {
        let g = MetricGraph::from_edges(2, &[(0, 0, int(1)), (0, 1, int(1))]).unwrap();
        let le = eliminate_loops(&g);
        assert!(!le.graph.graph().has_loops());
        assert_eq!(le.transversal.len(), 1);
        assert_eq!(le.refinement.vertex_origin(le.transversal[0]), &Point::interior(0, ratio(1, 2)));
        assert_eq!(le.graph.genus(), g.genus());
    }

    #[test]
    fn composition_matches_stepwise_maps() {
        let g = MetricGraph::from_edges(2, &[(0, 1, ratio(3, 2)), (1, 0, int(1))]).unwrap();
        let (h, first) = insert_point(&g, &Point::interior(0, ratio(1, 2))).unwrap();
        let (_, second) = scale_lengths(&h, &int(3)).unwrap();
        let both = first.then(&second);
        for p in [Point::interior(0, ratio(1, 4)), Point::interior(0, int(1)), Point::interior(1, ratio(1, 3)), Point::Vertex(1)] {
            let stepwise = second.forward(&first.forward(&p).unwrap()).unwrap();
            assert_eq!(both.forward(&p).unwrap(), stepwise);
            assert_eq!(both.inverse(&stepwise).unwrap(), p);
        }
    }

    #[test]
    fn identity_refinement_roundtrip() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2))]).unwrap();
        let id = Refinement::identity(&g);
        let p = Point::interior(0, int(1));
        assert_eq!(id.forward(&p).unwrap(), p);
    }
}
