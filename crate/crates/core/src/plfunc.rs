//! Continuous piecewise-linear functions with integer slopes on metric
//! graphs, and the principal divisors they define.

use num_traits::{Signed, Zero};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rational::{format_rational, is_integer, to_i64, Rational};
use crate::topology::{Host, HostId, MetricGraph, Point, Refinement};

/// A rational function on a metric graph. Breakpoints are interior points
/// where the slope actually changes; the representation is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    host: HostId,
    lengths: Vec<Rational>,
    ends: Vec<(usize, usize)>,
    vertex_values: Vec<Rational>,
    breakpoints: Vec<Vec<(Rational, Rational)>>,
}

/// One linear piece of an edge: `[from, to]` with an integer slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub from: Rational,
    pub to: Rational,
    pub slope: i64,
}

impl PlFunction {
    /// Validates and normalizes. `breakpoints[e]` lists interior
    /// `(offset, value)` pairs of edge `e` in any order.
    pub fn new(
        g: &MetricGraph,
        vertex_values: Vec<Rational>,
        breakpoints: Vec<Vec<(Rational, Rational)>>,
    ) -> Result<PlFunction> {
        if vertex_values.len() != g.vertex_count() || breakpoints.len() != g.edge_count() {
            return Err(Error::Invalid("function data does not match the graph".into()));
        }
        let mut f = PlFunction {
            host: g.host_id(),
            lengths: g.lengths().to_vec(),
            ends: g.graph().edges().iter().map(|e| (e.tail, e.head)).collect(),
            vertex_values,
            breakpoints: Vec::with_capacity(g.edge_count()),
        };
        for (e, mut bps) in breakpoints.into_iter().enumerate() {
            bps.sort_by(|a, b| a.0.cmp(&b.0));
            let mut clean: Vec<(Rational, Rational)> = Vec::with_capacity(bps.len());
            for (t, y) in bps {
                if !t.is_positive() || t >= f.lengths[e] {
                    return Err(Error::OffsetOutOfRange(g.point_name(&Point::interior(e, t))));
                }
                match clean.last() {
                    Some((t0, y0)) if *t0 == t => {
                        if *y0 != y {
                            return Err(Error::Discontinuous(g.point_name(&Point::interior(e, t))));
                        }
                    }
                    _ => clean.push((t, y)),
                }
            }
            f.breakpoints.push(clean);
            for (k, piece) in f.raw_pieces(e).iter().enumerate() {
                if !is_integer(&piece.2) {
                    return Err(Error::NonIntegerSlope { edge: g.graph().edge(e).name.clone(), piece: k + 1 });
                }
            }
            f.normalize_edge(e);
        }
        Ok(f)
    }

    pub fn constant(g: &MetricGraph, c: Rational) -> PlFunction {
        PlFunction::new(g, vec![c; g.vertex_count()], vec![Vec::new(); g.edge_count()])
            .expect("constants have slope zero")
    }

    /// Linear on every edge between the given vertex values.
    pub fn linear(g: &MetricGraph, vertex_values: Vec<Rational>) -> Result<PlFunction> {
        PlFunction::new(g, vertex_values, vec![Vec::new(); g.edge_count()])
    }

    pub fn host(&self) -> HostId {
        self.host
    }

    pub fn vertex_value(&self, v: usize) -> &Rational {
        &self.vertex_values[v]
    }

    pub fn breakpoints(&self, e: usize) -> &[(Rational, Rational)] {
        &self.breakpoints[e]
    }

    fn raw_pieces(&self, e: usize) -> Vec<(Rational, Rational, Rational)> {
        let (tail, head) = self.ends[e];
        let mut pts = Vec::with_capacity(self.breakpoints[e].len() + 2);
        pts.push((Rational::zero(), self.vertex_values[tail].clone()));
        pts.extend(self.breakpoints[e].iter().cloned());
        pts.push((self.lengths[e].clone(), self.vertex_values[head].clone()));
        pts.windows(2)
            .map(|w| {
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                (w[0].0.clone(), w[1].0.clone(), slope)
            })
            .collect()
    }

    fn normalize_edge(&mut self, e: usize) {
        let pieces = self.pieces(e);
        let keep: Vec<bool> = pieces.windows(2).map(|w| w[0].slope != w[1].slope).collect();
        let bps = std::mem::take(&mut self.breakpoints[e]);
        self.breakpoints[e] = bps.into_iter().zip(keep).filter(|(_, k)| *k).map(|(b, _)| b).collect();
    }

    /// Linear pieces of edge `e` from tail to head.
    pub fn pieces(&self, e: usize) -> Vec<Piece> {
        self.raw_pieces(e)
            .into_iter()
            .map(|(from, to, s)| Piece { from, to, slope: to_i64(&s).expect("validated integer slope") })
            .collect()
    }

    pub fn evaluate(&self, p: &Point) -> Rational {
        match p {
            Point::Vertex(v) => self.vertex_values[*v].clone(),
            Point::Interior { edge, offset } => {
                let (tail, _) = self.ends[*edge];
                let mut x0 = Rational::zero();
                let mut y0 = self.vertex_values[tail].clone();
                for piece in self.pieces(*edge) {
                    if offset <= &piece.to {
                        return &y0 + (offset - &x0) * Rational::from_integer(piece.slope.into());
                    }
                    y0 = &y0 + (&piece.to - &x0) * Rational::from_integer(piece.slope.into());
                    x0 = piece.to;
                }
                y0
            }
            _ => panic!("point {p:?} is not on a metric graph"),
        }
    }

    /// Sum of outgoing slopes at `p`.
    pub fn order_at(&self, p: &Point) -> i64 {
        match p {
            Point::Vertex(v) => {
                let mut ord = 0;
                for (e, &(tail, head)) in self.ends.iter().enumerate() {
                    if tail != *v && head != *v {
                        continue;
                    }
                    let pieces = self.pieces(e);
                    if tail == *v {
                        ord += pieces[0].slope;
                    }
                    if head == *v {
                        ord -= pieces[pieces.len() - 1].slope;
                    }
                }
                ord
            }
            Point::Interior { edge, offset } => {
                let pieces = self.pieces(*edge);
                match pieces.windows(2).find(|w| &w[0].to == offset) {
                    Some(w) => w[1].slope - w[0].slope,
                    None => 0,
                }
            }
            _ => 0,
        }
    }

    /// The principal divisor `D_f`.
    pub fn divisor(&self) -> Divisor {
        let mut d = Divisor::with_host(self.host);
        for v in 0..self.vertex_values.len() {
            d.add_chips(Point::Vertex(v), self.order_at(&Point::Vertex(v)));
        }
        for e in 0..self.ends.len() {
            for w in self.pieces(e).windows(2) {
                d.add_chips(Point::interior(e, w[0].to.clone()), w[1].slope - w[0].slope);
            }
        }
        d
    }

    /// Pointwise sum.
    pub fn add(&self, other: &PlFunction) -> Result<PlFunction> {
        if self.host != other.host {
            return Err(Error::HostMismatch);
        }
        let vertex_values = self
            .vertex_values
            .iter()
            .zip(&other.vertex_values)
            .map(|(a, b)| a + b)
            .collect();
        let breakpoints = (0..self.ends.len())
            .map(|e| {
                let mut offsets: Vec<&Rational> =
                    self.breakpoints[e].iter().chain(&other.breakpoints[e]).map(|(t, _)| t).collect();
                offsets.sort();
                offsets.dedup();
                offsets
                    .into_iter()
                    .map(|t| {
                        let p = Point::interior(e, t.clone());
                        (t.clone(), self.evaluate(&p) + other.evaluate(&p))
                    })
                    .collect()
            })
            .collect();
        let mut sum = PlFunction {
            host: self.host,
            lengths: self.lengths.clone(),
            ends: self.ends.clone(),
            vertex_values,
            breakpoints,
        };
        for e in 0..sum.ends.len() {
            sum.normalize_edge(e);
        }
        Ok(sum)
    }

    pub fn negate(&self) -> PlFunction {
        let mut out = self.clone();
        for v in &mut out.vertex_values {
            *v = -v.clone();
        }
        for bps in &mut out.breakpoints {
            for (_, y) in bps {
                *y = -y.clone();
            }
        }
        out
    }

    /// Transports a function on the derived graph of `map` back to `base`.
    /// Values are divided by the scale factor so slopes and orders are kept.
    pub fn pull_back(&self, map: &Refinement, base: &MetricGraph) -> Result<PlFunction> {
        if self.host != map.derived_id() || base.host_id() != map.base_id() {
            return Err(Error::HostMismatch);
        }
        let scale = map.scale();
        let vertex_values = (0..base.vertex_count()).map(|v| &self.vertex_values[v] / scale).collect();
        let breakpoints = (0..base.edge_count())
            .map(|e| {
                let chain = map.chain(e);
                let mut bps = Vec::new();
                for (i, &h) in chain.iter().enumerate() {
                    let span = map.edge_origin(h);
                    for (t, y) in &self.breakpoints[h] {
                        bps.push((&span.from + t / scale, y / scale));
                    }
                    if i + 1 < chain.len() {
                        let (_, head) = self.ends[h];
                        bps.push((span.to.clone(), &self.vertex_values[head] / scale));
                    }
                }
                bps
            })
            .collect();
        PlFunction::new(base, vertex_values, breakpoints)
    }

    /// Short text form used in diagnostics and JSON output.
    pub fn describe(&self, host: &MetricGraph) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = (0..self.vertex_values.len())
            .map(|v| (host.point_name(&Point::Vertex(v)), format_rational(&self.vertex_values[v])))
            .collect();
        for (e, bps) in self.breakpoints.iter().enumerate() {
            for (t, y) in bps {
                out.push((host.point_name(&Point::interior(e, t.clone())), format_rational(y)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::topology::unit_subdivision;

    fn edge2() -> MetricGraph {
        MetricGraph::from_edges(2, &[(0, 1, int(2))]).unwrap()
    }

    #[test]
    fn constant_is_valid_and_flat() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, ratio(1, 3))]).unwrap();
        let f = PlFunction::constant(&g, int(0));
        assert!(f.pieces(1).iter().all(|p| p.slope == 0));
        assert!(f.divisor().is_zero());
    }

    #[test]
    fn rejects_fractional_slope() {
        let err = PlFunction::linear(&edge2(), vec![int(0), int(3)]).unwrap_err();
        assert_eq!(err, Error::NonIntegerSlope { edge: "e1".into(), piece: 1 });
    }

    #[test]
    fn two_piece_function() {
        let g = edge2();
        let f = PlFunction::new(&g, vec![int(0), int(3)], vec![vec![(int(1), int(1))]]).unwrap();
        let slopes: Vec<i64> = f.pieces(0).iter().map(|p| p.slope).collect();
        assert_eq!(slopes, vec![1, 2]);
        let bp = Point::interior(0, int(1));
        assert_eq!(f.order_at(&bp), 1);
        assert_eq!(f.evaluate(&bp), int(1));
        let d = f.divisor();
        assert_eq!(d.get(&Point::Vertex(0)), 1);
        assert_eq!(d.get(&bp), 1);
        assert_eq!(d.get(&Point::Vertex(1)), -2);
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn rejects_discontinuity_and_range() {
        let g = edge2();
        let dup = PlFunction::new(&g, vec![int(0), int(2)], vec![vec![(int(1), int(1)), (int(1), int(0))]]);
        assert!(matches!(dup, Err(Error::Discontinuous(_))));
        let out = PlFunction::new(&g, vec![int(0), int(2)], vec![vec![(int(2), int(2))]]);
        assert!(matches!(out, Err(Error::OffsetOutOfRange(_))));
    }

    #[test]
    fn evaluation_and_orders() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(1))]).unwrap();
        let f = PlFunction::linear(&g, vec![int(0), int(1)]).unwrap();
        assert_eq!(f.evaluate(&Point::interior(0, ratio(1, 2))), ratio(1, 2));
        assert_eq!(f.evaluate(&Point::Vertex(1)), int(1));
        assert_eq!(f.order_at(&Point::interior(0, ratio(1, 3))), 0);

        let path = edge2();
        let f = PlFunction::linear(&path, vec![int(0), int(2)]).unwrap();
        assert_eq!(f.order_at(&Point::Vertex(0)), 1);
        assert_eq!(f.order_at(&Point::Vertex(1)), -1);
    }

    #[test]
    fn collinear_breakpoints_are_dropped() {
        let f = PlFunction::new(&edge2(), vec![int(0), int(2)], vec![vec![(int(1), int(1))]]).unwrap();
        assert!(f.breakpoints(0).is_empty());
    }

    #[test]
    fn loop_orders_count_both_ends() {
        let g = MetricGraph::from_edges(1, &[(0, 0, int(2))]).unwrap();
        let f = PlFunction::new(&g, vec![int(0)], vec![vec![(int(1), int(1))]]).unwrap();
        assert_eq!(f.order_at(&Point::Vertex(0)), 2);
        assert_eq!(f.order_at(&Point::interior(0, int(1))), -2);
        assert_eq!(f.divisor().degree(), 0);
    }

    #[test]
    fn sum_is_additive_on_divisors() {
        let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(1))]).unwrap();
        let f = PlFunction::new(&g, vec![int(0), int(1)], vec![vec![(int(1), int(2))], vec![]]).unwrap();
        let h = PlFunction::new(&g, vec![int(1), int(0)], vec![vec![(ratio(1, 2), ratio(3, 2))], vec![]]).unwrap();
        let sum = f.add(&h).unwrap();
        assert_eq!(sum.divisor(), &f.divisor() + &h.divisor());
        assert!(f.add(&f.negate()).unwrap().divisor().is_zero());
    }

    #[test]
    fn pull_back_preserves_orders() {
        let g = MetricGraph::from_edges(2, &[(0, 1, ratio(3, 2)), (1, 0, int(1))]).unwrap();
        let sub = unit_subdivision(&g, &[]).unwrap();
        let h = sub.graph.to_metric();
        let values: Vec<Rational> = (0..h.vertex_count()).map(|v| int([0, 2, -1, 3, 1][v % 5])).collect();
        let fh = PlFunction::linear(&h, values).unwrap();
        let fg = fh.pull_back(&sub.refinement, &g).unwrap();
        assert_eq!(fg.divisor(), sub.refinement.inverse_divisor(&fh.divisor()).unwrap());
    }
}
