//! Divisors: finitely supported integer-valued maps on the points of a host.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::topology::{Host, HostId, Point};

/// Element of the free abelian group on the points of a host. Zero values
/// are never stored; iteration follows the canonical point order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    host: HostId,
    chips: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn zero(host: &impl Host) -> Divisor {
        Divisor::with_host(host.host_id())
    }

    pub(crate) fn with_host(host: HostId) -> Divisor {
        Divisor { host, chips: BTreeMap::new() }
    }

    pub fn from_chips(host: &impl Host, chips: impl IntoIterator<Item = (Point, i64)>) -> Result<Divisor> {
        let mut d = Divisor::zero(host);
        for (p, n) in chips {
            if !host.contains(&p) {
                return Err(Error::InvalidPoint(host.point_name(&p)));
            }
            d.add_chips(p, n);
        }
        Ok(d)
    }

    /// Vertex divisor from per-vertex values.
    pub fn from_vertex_values(host: &impl Host, values: &[i64]) -> Divisor {
        let mut d = Divisor::zero(host);
        for (v, &n) in values.iter().enumerate() {
            d.add_chips(Point::Vertex(v), n);
        }
        d
    }

    pub fn host(&self) -> HostId {
        self.host
    }

    /// Ok if this divisor was built for `host` and all its points lie on it.
    pub fn check_host(&self, host: &impl Host) -> Result<()> {
        if self.host != host.host_id() {
            return Err(Error::HostMismatch);
        }
        match self.chips.keys().find(|p| !host.contains(p)) {
            Some(p) => Err(Error::InvalidPoint(host.point_name(p))),
            None => Ok(()),
        }
    }

    pub fn get(&self, p: &Point) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn add_chips(&mut self, p: Point, n: i64) {
        if n == 0 {
            return;
        }
        let entry = self.chips.entry(p).or_insert(0);
        *entry += n;
        if *entry == 0 {
            self.chips.retain(|_, v| *v != 0);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &i64)> {
        self.chips.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.chips.keys()
    }

    /// Number of points in the support.
    pub fn support_len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn deg_plus(&self) -> i64 {
        self.chips.values().filter(|&&n| n > 0).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&n| n > 0)
    }

    /// Largest absolute chip value, 0 for the zero divisor.
    pub fn max_abs(&self) -> i64 {
        self.chips.values().map(|n| n.abs()).max().unwrap_or(0)
    }

    pub fn positive_part(&self) -> Divisor {
        Divisor {
            host: self.host,
            chips: self.chips.iter().filter(|(_, &n)| n > 0).map(|(p, &n)| (p.clone(), n)).collect(),
        }
    }

    pub fn is_vertex_supported(&self) -> bool {
        self.chips.keys().all(Point::is_vertex)
    }

    /// Dense per-vertex values; fails on interior support.
    pub fn vertex_values(&self, vertex_count: usize) -> Result<Vec<i64>> {
        let mut out = vec![0; vertex_count];
        for (p, &n) in &self.chips {
            match p {
                Point::Vertex(v) if *v < vertex_count => out[*v] = n,
                other => return Err(Error::NotVertexSupported(other.clone())),
            }
        }
        Ok(out)
    }

    /// `a * d1 + b * d2`.
    pub fn combine(a: i64, d1: &Divisor, b: i64, d2: &Divisor) -> Result<Divisor> {
        if d1.host != d2.host {
            return Err(Error::HostMismatch);
        }
        let mut out = Divisor::with_host(d1.host);
        for (p, &n) in &d1.chips {
            out.add_chips(p.clone(), a * n);
        }
        for (p, &n) in &d2.chips {
            out.add_chips(p.clone(), b * n);
        }
        Ok(out)
    }

    /// Same chips on a different host with identical point set, e.g. a
    /// graph and its unit-length metric graph.
    pub fn rehost(&self, host: &impl Host) -> Result<Divisor> {
        Divisor::from_chips(host, self.chips.iter().map(|(p, &n)| (p.clone(), n)))
    }

    /// `2(v0) - (e1@1/2)`-style text; `0` for the zero divisor.
    pub fn display(&self, host: &impl Host) -> String {
        if self.chips.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (p, &n)) in self.chips.iter().enumerate() {
            let sign = if n < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = n.abs();
            let coeff = if mag == 1 { String::new() } else { mag.to_string() };
            out.push_str(&format!("{sign}{coeff}({})", host.point_name(p)));
        }
        out
    }
}

impl Add for &Divisor {
    type Output = Divisor;

    /// Panics on a host mismatch; use [`Divisor::combine`] to handle it.
    fn add(self, rhs: &Divisor) -> Divisor {
        Divisor::combine(1, self, 1, rhs).expect("divisors on the same host")
    }
}

impl Sub for &Divisor {
    type Output = Divisor;

    fn sub(self, rhs: &Divisor) -> Divisor {
        Divisor::combine(1, self, -1, rhs).expect("divisors on the same host")
    }
}

impl Neg for &Divisor {
    type Output = Divisor;

    fn neg(self) -> Divisor {
        Divisor { host: self.host, chips: self.chips.iter().map(|(p, &n)| (p.clone(), -n)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::topology::MetricGraph;
    use proptest::prelude::*;

    fn host() -> MetricGraph {
        MetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2))]).unwrap()
    }

    #[test]
    fn degree_examples() {
        let g = host();
        assert_eq!(Divisor::zero(&g).degree(), 0);
        let d = Divisor::from_chips(&g, [(Point::Vertex(1), 3)]).unwrap();
        assert_eq!(d.degree(), 3);
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), 1), (Point::interior(1, ratio(1, 2)), -2)]).unwrap();
        assert_eq!(d.degree(), -1);
    }

    #[test]
    fn deg_plus_examples() {
        let g = host();
        assert_eq!(Divisor::zero(&g).deg_plus(), 0);
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), 1), (Point::Vertex(1), -2)]).unwrap();
        assert_eq!(d.deg_plus(), 1);
    }

    #[test]
    fn combine_examples() {
        let g = host();
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), 1), (Point::interior(1, int(1)), -4)]).unwrap();
        assert!(Divisor::combine(1, &d, -1, &d).unwrap().is_zero());
        let v0 = Divisor::from_chips(&g, [(Point::Vertex(0), 1)]).unwrap();
        assert_eq!(Divisor::combine(1, &v0, 1, &v0).unwrap().get(&Point::Vertex(0)), 2);
        let other = MetricGraph::from_edges(1, &[]).unwrap();
        assert_eq!(Divisor::combine(1, &v0, 1, &Divisor::zero(&other)), Err(Error::HostMismatch));
    }

    #[test]
    fn rejects_points_off_host() {
        let g = host();
        assert!(Divisor::from_chips(&g, [(Point::interior(0, int(1)), 1)]).is_err());
        assert!(Divisor::from_chips(&g, [(Point::Vertex(5), 1)]).is_err());
    }

    #[test]
    fn display_format() {
        let g = host();
        let d = Divisor::from_chips(&g, [(Point::Vertex(0), -1), (Point::Vertex(1), 2)]).unwrap();
        assert_eq!(d.display(&g), "-(v0)+2(v1)");
        assert_eq!(Divisor::zero(&g).display(&g), "0");
    }

    fn arb_divisor() -> impl Strategy<Value = Vec<(u8, i64)>> {
        prop::collection::vec((0u8..6, -5i64..=5), 0..8)
    }

    fn build(g: &MetricGraph, raw: &[(u8, i64)]) -> Divisor {
        let points = [
            Point::Vertex(0),
            Point::Vertex(1),
            Point::interior(0, ratio(1, 2)),
            Point::interior(1, int(1)),
            Point::interior(1, ratio(1, 3)),
            Point::interior(1, ratio(5, 3)),
        ];
        Divisor::from_chips(g, raw.iter().map(|&(i, n)| (points[i as usize].clone(), n))).unwrap()
    }

    proptest! {
        #[test]
        fn degree_is_linear(a in -3i64..=3, b in -3i64..=3, x in arb_divisor(), y in arb_divisor()) {
            let g = host();
            let (d1, d2) = (build(&g, &x), build(&g, &y));
            let c = Divisor::combine(a, &d1, b, &d2).unwrap();
            prop_assert_eq!(c.degree(), a * d1.degree() + b * d2.degree());
            prop_assert!(c.iter().all(|(_, &n)| n != 0));
        }

        #[test]
        fn deg_plus_dominates_degree(x in arb_divisor()) {
            let d = build(&host(), &x);
            prop_assert!(d.deg_plus() >= d.degree());
            prop_assert_eq!(d.deg_plus() == d.degree(), d.is_effective());
        }
    }
}
