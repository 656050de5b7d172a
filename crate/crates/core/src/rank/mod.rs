//! Ranks of divisors and the Riemann-Roch checks built on them.

mod enumerate;

use std::collections::HashMap;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::permutation::{nu_divisor, Permutation};
use crate::plfunc::PlFunction;
use crate::reduction::{default_base, epsilon, nonspecial_witness, FiringGraph, Grid, Witness};
use crate::topology::{AnyHost, Graph, MetricGraph, Point, TropicalCurve};

pub use enumerate::{
    extend_tree_function, rank_by_enumeration, slope_bound, spanning_trees, EnumerationBudget, EnumerationStats, TermRecord,
    MAX_ORDER_POINTS,
};

/// `(D', P, f)` with `D' = D + D_f` and `deg+(D' - nu_P) - 1` equal to the
/// reported rank.
#[derive(Clone, Debug)]
pub struct RankCertificate {
    pub divisor: Divisor,
    pub permutation: Permutation,
    pub function: PlFunction,
}

impl RankCertificate {
    /// `deg+(D' - nu_P) - 1`.
    pub fn term(&self, g: &MetricGraph) -> Result<i64> {
        let nu = nu_divisor(g, &self.permutation)?;
        Ok(Divisor::combine(1, &self.divisor, -1, &nu)?.deg_plus() - 1)
    }
}

#[derive(Clone, Debug)]
pub struct RankResult {
    pub rank: i64,
    /// Effective `E` of degree `rank + 1` with `|D - E|` empty.
    pub witness: Divisor,
    pub certificate: Option<RankCertificate>,
    /// False when the enumeration was truncated; `rank` is then an upper
    /// bound.
    pub exact: bool,
    pub stats: Option<EnumerationStats>,
}

impl RankResult {
    pub(crate) fn trivial(rank: i64, witness: Divisor) -> RankResult {
        RankResult { rank, witness, certificate: None, exact: true, stats: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Subdivision unless enumeration is requested explicitly.
    #[default]
    Auto,
    Subdivision,
    Enumeration,
}

#[derive(Clone, Debug, Default)]
pub struct RankOptions {
    pub method: Method,
    pub budget: EnumerationBudget,
    /// Use `r = deg - g` above degree `2g - 2` on loopless graphs. Never set
    /// when verifying Riemann-Roch.
    pub riemann_roch_shortcut: bool,
}

/// Rank search on a graph, memoized on reduced forms:
/// `r(D) = -1` if `|D|` is empty, else `1 + min_v r(D - v)`.
pub(crate) struct GraphRank<'a> {
    fg: &'a FiringGraph,
    v0: usize,
    memo: HashMap<Vec<i64>, i64>,
}

impl<'a> GraphRank<'a> {
    pub fn new(fg: &'a FiringGraph, v0: usize) -> GraphRank<'a> {
        GraphRank { fg, v0, memo: HashMap::new() }
    }

    pub fn rank(&mut self, d: &[i64]) -> i64 {
        if d.iter().sum::<i64>() < 0 {
            return -1;
        }
        let mut reduced = self.fg.reduce(d, self.v0).reduced;
        if reduced[self.v0] < 0 {
            return -1;
        }
        if let Some(&r) = self.memo.get(&reduced) {
            return r;
        }
        // A reduced divisor loses effectiveness after reduced(v0) + 1 chips
        // are taken from v0.
        let mut best = reduced[self.v0];
        for v in 0..self.fg.len() {
            if best == 0 {
                break;
            }
            reduced[v] -= 1;
            best = best.min(1 + self.rank(&reduced));
            reduced[v] += 1;
        }
        self.memo.insert(reduced, best);
        best
    }

    /// First effective `E` of degree `k`, in lexicographic order of sorted
    /// vertex tuples, with `|D - E|` empty. Requires `k > rank(d)`.
    pub fn first_unreachable(&mut self, d: &[i64], k: usize) -> Vec<usize> {
        let mut d = d.to_vec();
        let mut picked = Vec::with_capacity(k);
        let found = self.search(&mut d, 0, k, &mut picked);
        assert!(found, "no unreachable divisor of degree {k}");
        picked
    }

    fn search(&mut self, d: &mut Vec<i64>, from: usize, left: usize, picked: &mut Vec<usize>) -> bool {
        if self.rank(d) >= left as i64 {
            return false;
        }
        if left == 0 {
            return true;
        }
        for v in from..self.fg.len() {
            d[v] -= 1;
            picked.push(v);
            if self.search(d, v, left - 1, picked) {
                d[v] += 1;
                return true;
            }
            picked.pop();
            d[v] += 1;
        }
        false
    }
}

fn rank_on_grid(fg: &FiringGraph, values: &[i64], v0: usize, shortcut: Option<i64>) -> (i64, Vec<usize>) {
    let mut search = GraphRank::new(fg, v0);
    let rank = shortcut.unwrap_or_else(|| search.rank(values));
    let witness = search.first_unreachable(values, (rank + 1) as usize);
    (rank, witness)
}

/// Baker-Norine rank of a vertex divisor on a graph. Loops do not take part
/// in chip firing.
pub fn rank_graph(g: &Graph, d: &Divisor, opts: &RankOptions) -> Result<RankResult> {
    d.check_host(g)?;
    let values = d.vertex_values(g.vertex_count())?;
    let deg = d.degree();
    if deg < 0 {
        return Ok(RankResult::trivial(-1, Divisor::zero(g)));
    }
    let shortcut = (opts.riemann_roch_shortcut && !g.has_loops() && deg > 2 * g.genus() - 2).then(|| deg - g.genus());
    let fg = FiringGraph::new(g);
    let (rank, witness) = rank_on_grid(&fg, &values, default_base(g), shortcut);
    let mut e = Divisor::zero(g);
    for v in witness {
        e.add_chips(Point::Vertex(v), 1);
    }
    Ok(RankResult::trivial(rank, e))
}

/// Rank on a metric graph with rational lengths.
pub fn rank_metric(g: &MetricGraph, d: &Divisor, opts: &RankOptions) -> Result<RankResult> {
    d.check_host(g)?;
    match opts.method {
        Method::Auto | Method::Subdivision => rank_by_subdivision(g, d, opts.riemann_roch_shortcut),
        Method::Enumeration => rank_by_enumeration(g, d, &opts.budget, &mut |_| {}),
    }
}

fn rank_by_subdivision(g: &MetricGraph, d: &Divisor, shortcut: bool) -> Result<RankResult> {
    if d.degree() < 0 {
        return Ok(RankResult::trivial(-1, Divisor::zero(g)));
    }
    let base = Point::Vertex(default_base(g.graph()));
    let marks: Vec<Point> = d.support().cloned().chain([base.clone()]).collect();
    let grid = Grid::new(g, &marks)?;
    let values = grid.values(d)?;
    let deg = d.degree();
    let shortcut = (shortcut && deg > 2 * g.genus() - 2).then(|| deg - g.genus());
    let (rank, witness) = rank_on_grid(&grid.firing, &values, grid.vertex_of(&base)?, shortcut);
    let mut e = vec![0; values.len()];
    for v in witness {
        e[v] += 1;
    }
    Ok(RankResult::trivial(rank, grid.divisor(&e)))
}

/// Rank on a tropical curve: retract the infinite edges, then rank on the
/// finite part. The witness is reported on the retraction.
pub fn rank_tropical(c: &TropicalCurve, d: &Divisor, opts: &RankOptions) -> Result<RankResult> {
    let (metric, retracted) = c.retract(d)?;
    rank_metric(&metric, &retracted, opts)
}

pub fn rank_any(host: &AnyHost, d: &Divisor, opts: &RankOptions) -> Result<RankResult> {
    match host {
        AnyHost::Metric(g) => rank_metric(g, d, opts),
        AnyHost::Tropical(c) => rank_tropical(c, d, opts),
    }
}

/// `r(D) - r(K - D) - deg(D) - 1 + g`; zero whenever Riemann-Roch holds.
/// Ranks are computed without the degree shortcut.
pub fn riemann_roch_residual(host: &AnyHost, d: &Divisor) -> Result<i64> {
    d.check_host(host)?;
    let opts = RankOptions::default();
    let k = host.canonical_divisor();
    let dual = Divisor::combine(1, &k, -1, d)?;
    let r = rank_any(host, d, &opts)?.rank;
    let r_dual = rank_any(host, &dual, &opts)?.rank;
    Ok(r - r_dual - d.degree() - 1 + host.genus())
}

/// Riemann-Roch residual on a loopless graph with combinatorial ranks.
pub fn riemann_roch_residual_graph(g: &Graph, d: &Divisor) -> Result<i64> {
    if g.has_loops() {
        return Err(Error::Invalid("graph Riemann-Roch needs a loopless graph".into()));
    }
    let opts = RankOptions::default();
    let dual = Divisor::combine(1, &g.canonical_divisor(), -1, d)?;
    let r = rank_graph(g, d, &opts)?.rank;
    let r_dual = rank_graph(g, &dual, &opts)?.rank;
    Ok(r - r_dual - d.degree() - 1 + g.genus())
}

/// Outcome of the two combinatorial Riemann-Roch conditions for one divisor.
#[derive(Clone, Debug)]
pub struct RrReport {
    pub epsilon: u8,
    /// Permutation with `nu_P - D` effective-equivalent, when `|D|` is empty.
    pub permutation: Option<Permutation>,
    /// Exactly one of `epsilon(D) = 0` and a valid permutation holds.
    pub rr1: bool,
    /// `epsilon(D) = epsilon(K - D)`; only for degree `g - 1`.
    pub rr2: Option<bool>,
}

/// First condition: `|D|` is nonempty, or some `nu_P - D` is equivalent to an
/// effective divisor, and never both.
pub fn check_rr1(g: &MetricGraph, d: &Divisor) -> Result<(u8, Option<Permutation>, bool)> {
    let eps = epsilon(g, d)?;
    match nonspecial_witness(g, d)? {
        Witness::Effective => Ok((eps, None, eps == 0)),
        Witness::Dominated { permutation, reduced } => {
            let nu = nu_divisor(g, &permutation)?;
            let dominated = (&nu - &reduced).iter().all(|(_, &n)| n >= 0);
            let reachable = epsilon(g, &(&nu - d))? == 0;
            Ok((eps, Some(permutation), eps == 1 && dominated && reachable))
        }
    }
}

/// Second condition for `deg(D) = g - 1`: `epsilon(D) = epsilon(K - D)`.
pub fn check_rr2(g: &MetricGraph, d: &Divisor) -> Result<bool> {
    let expected = g.genus() - 1;
    if d.degree() != expected {
        return Err(Error::WrongDegree { expected, actual: d.degree() });
    }
    let dual = Divisor::combine(1, &g.canonical_divisor(), -1, d)?;
    Ok(epsilon(g, d)? == epsilon(g, &dual)?)
}

pub fn check_rr_conditions(g: &MetricGraph, d: &Divisor) -> Result<RrReport> {
    let (eps, permutation, rr1) = check_rr1(g, d)?;
    let rr2 = if d.degree() == g.genus() - 1 { Some(check_rr2(g, d)?) } else { None };
    Ok(RrReport { epsilon: eps, permutation, rr1, rr2 })
}
