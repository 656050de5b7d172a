//! The spanning-tree enumeration over rational functions and orderings.
//!
//! After preprocessing the host is loopless, carries the divisor on its
//! vertices and has integer edge lengths. For every spanning tree `T` and
//! every slope assignment `F: T -> [-U, U]` the function `f` is fixed on the
//! vertices; each non-tree edge gets the linear extension or the one with a
//! single break of order +1. The term for `(T, F)` is the minimum over all
//! orderings `P` of the support of `deg+(D + D_f - nu_P) - 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::permutation::{nu_divisor, Permutation};
use crate::plfunc::PlFunction;
use crate::rational::{lcm_denominators, Rational};
use crate::reduction::default_base;
use crate::topology::{eliminate_loops, scale_lengths, Graph, MetricGraph, Point, Refinement};

use super::{RankCertificate, RankResult};

/// Largest number of support points the ordering search accepts.
pub const MAX_ORDER_POINTS: usize = 22;

/// Limits for the enumeration. `slope_bound: None` means the bound
/// `(Delta + p)^e` that makes the search exhaustive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub slope_bound: Option<u64>,
    pub term_cap: Option<u64>,
    /// Skip slope vectors that provably cannot improve the current minimum.
    pub prune: bool,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget::exact()
    }
}

impl EnumerationBudget {
    pub fn exact() -> EnumerationBudget {
        EnumerationBudget { slope_bound: None, term_cap: None, prune: true }
    }

    pub fn truncated(u: u64) -> EnumerationBudget {
        EnumerationBudget { slope_bound: Some(u), term_cap: None, prune: true }
    }

    pub fn with_term_cap(mut self, cap: u64) -> EnumerationBudget {
        self.term_cap = Some(cap);
        self
    }

    pub fn without_pruning(mut self) -> EnumerationBudget {
        self.prune = false;
        self
    }
}

/// Parameters of a run on the preprocessed host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Vertices (all treated as branching points).
    pub n: usize,
    /// Edges.
    pub m: usize,
    /// Largest absolute chip count.
    pub max_chips: i64,
    pub max_degree: usize,
    /// `2(nM + m)`.
    pub p: i64,
    /// `(Delta + p)^e`.
    pub exact_bound: BigInt,
    /// Bound actually used.
    pub slope_bound: BigInt,
    pub trees: usize,
    /// `trees * (2U + 1)^(n - 1)`.
    pub candidates: BigInt,
    pub evaluated: u64,
    pub stopped_by_cap: bool,
    pub exact: bool,
}

/// One `(T, F)` pair and its term, handed to observers.
#[derive(Clone, Debug)]
pub struct TermRecord<'a> {
    pub tree: usize,
    pub slopes: &'a [i64],
    pub term: i64,
}

/// `(Delta + p)^e` with `Delta` the maximum degree and `e` the edge count.
pub fn slope_bound(g: &MetricGraph, p: u64) -> BigInt {
    BigInt::from(g.graph().max_degree() as u64 + p).pow(g.edge_count() as u32)
}

/// All spanning trees as sorted edge index lists, in lexicographic order of
/// their inclusion pattern (edges with lower index are tried first). Loops
/// never belong to a tree.
pub fn spanning_trees(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    tree_search(n, &edges, 0, &mut chosen, &mut out);
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of the graph using `chosen` plus edges from `from` on.
fn connected_with(n: usize, edges: &[(usize, usize)], chosen: &[usize], from: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut comps = n;
    for &e in chosen.iter().chain(&(from..edges.len()).collect::<Vec<_>>()) {
        let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

fn closes_cycle(n: usize, edges: &[(usize, usize)], chosen: &[usize], e: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    for &c in chosen {
        let (a, b) = (find(&mut parent, edges[c].0), find(&mut parent, edges[c].1));
        parent[a] = b;
    }
    find(&mut parent, edges[e].0) == find(&mut parent, edges[e].1)
}

fn tree_search(n: usize, edges: &[(usize, usize)], i: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if chosen.len() + 1 == n || n == 0 {
        out.push(chosen.clone());
        return;
    }
    if i == edges.len() {
        return;
    }
    if !closes_cycle(n, edges, chosen, i) {
        chosen.push(i);
        tree_search(n, edges, i + 1, chosen, out);
        chosen.pop();
    }
    if connected_with(n, edges, chosen, i + 1) {
        tree_search(n, edges, i + 1, chosen, out);
    }
}

/// Loopless host with integer lengths and a vertex divisor.
#[derive(Clone, Debug)]
pub(crate) struct Instance {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
    pub chips: Vec<i64>,
}

/// A tree rooted at vertex 0: vertices in BFS order with their parent and
/// the index of the connecting tree edge.
struct RootedTree {
    order: Vec<(usize, usize, usize)>,
    non_tree: Vec<usize>,
}

impl RootedTree {
    fn new(inst: &Instance, tree: &[usize]) -> RootedTree {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.n];
        for (k, &e) in tree.iter().enumerate() {
            let (a, b, _) = inst.edges[e];
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        let mut seen = vec![false; inst.n];
        seen[0] = true;
        let mut order = Vec::with_capacity(inst.n);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(w, k) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    order.push((w, v, k));
                    queue.push_back(w);
                }
            }
        }
        let non_tree = (0..inst.edges.len()).filter(|e| !tree.contains(e)).collect();
        RootedTree { order, non_tree }
    }
}

/// The function determined by a slope vector, in integers.
pub(crate) struct TreeFunction {
    pub values: Vec<i64>,
    /// `D + D_f` on vertices, then one entry (+1) per break point.
    pub chips: Vec<i64>,
    /// `(edge, offset from tail, value)` of every break.
    pub breaks: Vec<(usize, i64, i64)>,
    /// Segments between support points, as index pairs into `chips`.
    pub segments: Vec<(usize, usize)>,
}

fn extend(inst: &Instance, tree: &[usize], rooted: &RootedTree, slopes: &[i64]) -> TreeFunction {
    let mut values = vec![0i64; inst.n];
    for &(v, parent, k) in &rooted.order {
        values[v] = values[parent] + slopes[k] * inst.edges[tree[k]].2;
    }
    let mut chips = inst.chips.clone();
    let mut breaks = Vec::new();
    let mut segments = Vec::with_capacity(inst.edges.len() + rooted.non_tree.len());
    for &k in tree {
        let (a, b, len) = inst.edges[k];
        let rise = (values[b] - values[a]) / len;
        chips[a] += rise;
        chips[b] -= rise;
        segments.push((a, b));
    }
    for &e in &rooted.non_tree {
        let (a, b, len) = inst.edges[e];
        let diff = values[b] - values[a];
        chips[a] += Integer::div_floor(&diff, &len);
        chips[b] += Integer::div_floor(&-diff, &len);
        if Integer::mod_floor(&diff, &len) == 0 {
            segments.push((a, b));
            continue;
        }
        // Slopes s then s + 1 from the low end; the break sits at distance
        // (rise - s * len) from the high end.
        let (low, high) = if diff > 0 { (a, b) } else { (b, a) };
        let rise = diff.abs();
        let s = rise / len;
        let dist = rise - s * len;
        let value = values[high] - (s + 1) * dist;
        let offset = if high == b { len - dist } else { dist };
        let x = inst.n + breaks.len();
        breaks.push((e, offset, value));
        segments.push((low, x));
        segments.push((x, high));
    }
    chips.extend(std::iter::repeat_n(1, breaks.len()));
    TreeFunction { values, chips, breaks, segments }
}

/// The function fixed by a spanning tree and integer slopes on its edges,
/// with `f(root) = 0`. `slopes[k]` is the slope along `tree[k]` read away
/// from the root. Non-tree edges are linear when the end values allow it,
/// otherwise they get one break of order +1 with slopes `s` and `s + 1`
/// from the low end.
pub fn extend_tree_function(g: &MetricGraph, tree: &[usize], slopes: &[i64], root: usize) -> Result<PlFunction> {
    let n = g.vertex_count();
    if root >= n || slopes.len() != tree.len() || tree.len() + 1 != n {
        return Err(Error::Invalid("tree data does not match the graph".into()));
    }
    let graph = g.graph();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    values[root] = Some(Rational::from_integer(0.into()));
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for (k, &e) in tree.iter().enumerate() {
            let edge = graph.edge(e);
            if edge.is_loop() || (edge.tail != v && edge.head != v) {
                continue;
            }
            let w = edge.other(v);
            if values[w].is_none() {
                let fv = values[v].clone().expect("visited");
                values[w] = Some(fv + g.length(e) * Rational::from_integer(slopes[k].into()));
                stack.push(w);
            }
        }
    }
    let values: Vec<Rational> = values
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Invalid("edges do not form a spanning tree".into()))?;
    let mut breakpoints = vec![Vec::new(); g.edge_count()];
    for e in (0..g.edge_count()).filter(|e| !tree.contains(e)) {
        let edge = graph.edge(e);
        let len = g.length(e);
        let diff = &values[edge.head] - &values[edge.tail];
        let ratio = &diff / len;
        if ratio.is_integer() {
            continue;
        }
        let rise = num_traits::Signed::abs(&diff);
        let s = (&rise / len).floor();
        let dist = &rise - &s * len;
        let high = if diff > Rational::from_integer(0.into()) { edge.head } else { edge.tail };
        let value = &values[high] - (s + Rational::one()) * &dist;
        let offset = if high == edge.head { len - &dist } else { dist };
        breakpoints[e].push((offset, value));
    }
    PlFunction::new(g, values, breakpoints)
}

/// `min over orderings P of deg+(chips - nu_P)` by dynamic programming over
/// the set of points already placed. Returns the value and a minimizing
/// order (the first in the canonical tie-breaking).
pub(crate) fn min_over_orders(chips: &[i64], segments: &[(usize, usize)], want_order: bool) -> (i64, Vec<usize>) {
    let n = chips.len();
    assert!(n <= MAX_ORDER_POINTS, "too many support points");
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in segments {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let full = (1usize << n) - 1;
    let mut dp = vec![i64::MAX; full + 1];
    let mut choice = if want_order { vec![u8::MAX; full + 1] } else { Vec::new() };
    dp[0] = 0;
    for s in 0..full {
        let base = dp[s];
        if base == i64::MAX {
            continue;
        }
        for x in 0..n {
            if s >> x & 1 == 1 {
                continue;
            }
            let earlier = nbrs[x].iter().filter(|&&y| s >> y & 1 == 1).count() as i64;
            let cost = base + (chips[x] - earlier + 1).max(0);
            let t = s | 1 << x;
            if cost < dp[t] {
                dp[t] = cost;
                if want_order {
                    choice[t] = x as u8;
                }
            }
        }
    }
    let mut order = Vec::new();
    if want_order {
        let mut s = full;
        while s != 0 {
            let x = choice[s] as usize;
            order.push(x);
            s &= !(1 << x);
        }
        order.reverse();
    }
    (dp[full], order)
}

/// Calls `f` on every vector in `[-r, r]^k` whose largest entry in absolute
/// value is exactly `r`, until `f` returns false.
fn visit_shell(k: usize, r: i64, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    if r == 0 {
        return f(&vec![0; k]);
    }
    let mut v = vec![0i64; k];
    for i in 0..k {
        // Entries before `i` stay strictly inside the shell.
        let bound = |j: usize| if j < i { r - 1 } else { r };
        for pinned in [-r, r] {
            for (j, x) in v.iter_mut().enumerate() {
                *x = -bound(j);
            }
            v[i] = pinned;
            loop {
                if !f(&v) {
                    return false;
                }
                let mut j = 0;
                while j < k && (j == i || v[j] == bound(j)) {
                    if j != i {
                        v[j] = -bound(j);
                    }
                    j += 1;
                }
                if j == k {
                    break;
                }
                v[j] += 1;
            }
        }
    }
    true
}

/// Preprocessed host: loopless, support on vertices, integer lengths.
pub(crate) struct Prepared {
    pub host: MetricGraph,
    pub map: Refinement,
    pub instance: Instance,
}

pub(crate) fn prepare(g: &MetricGraph, d: &Divisor) -> Result<Prepared> {
    let split = eliminate_loops(g);
    let d1 = split.refinement.forward_divisor(d)?;
    let interior: Vec<Point> = d1.support().filter(|p| !p.is_vertex()).cloned().collect();
    let (promoted, r2) = crate::topology::insert_points(&split.graph, &interior)?;
    let scale = Rational::from_integer(lcm_denominators(promoted.lengths()));
    let (host, r3) = scale_lengths(&promoted, &scale)?;
    let map = split.refinement.then(&r2).then(&r3);
    let chips = map.forward_divisor(d)?.vertex_values(host.vertex_count())?;
    let edges = host
        .graph()
        .edges()
        .iter()
        .zip(host.lengths())
        .map(|(e, len)| {
            let len = len.to_integer().to_i64().ok_or_else(|| Error::Invalid("edge length too large".into()))?;
            Ok((e.tail, e.head, len))
        })
        .collect::<Result<Vec<_>>>()?;
    let instance = Instance { n: host.vertex_count(), edges, chips };
    Ok(Prepared { host, map, instance })
}

/// Runs the enumeration; `observe` sees every evaluated `(T, F)` term.
pub fn rank_by_enumeration(
    g: &MetricGraph,
    d: &Divisor,
    budget: &EnumerationBudget,
    observe: &mut dyn FnMut(&TermRecord),
) -> Result<RankResult> {
    d.check_host(g)?;
    let base = Point::Vertex(default_base(g.graph()));
    if d.degree() < 0 {
        return Ok(RankResult::trivial(-1, Divisor::zero(g)));
    }
    if d.is_zero() {
        return Ok(RankResult::trivial(0, Divisor::from_chips(g, [(base, 1)])?));
    }
    let prep = prepare(g, d)?;
    let inst = &prep.instance;
    if inst.edges.is_empty() {
        let r = inst.chips[0].max(-1);
        return Ok(RankResult::trivial(r, Divisor::from_chips(g, [(Point::Vertex(0), r + 1)])?));
    }

    let n = inst.n;
    let m = inst.edges.len();
    let max_chips = inst.chips.iter().map(|c| c.abs()).max().unwrap_or(0);
    let p = 2 * (n as i64 * max_chips + m as i64);
    let exact_bound = slope_bound(&prep.host, p as u64);
    let bound = budget.slope_bound.map(BigInt::from).unwrap_or_else(|| exact_bound.clone());
    let u = bound.to_i64().unwrap_or(i64::MAX / 4);
    let trees = spanning_trees(prep.host.graph());
    let width = BigInt::from(2u8) * &bound + BigInt::one();
    let candidates = BigInt::from(trees.len()) * width.pow((n - 1) as u32);

    // Vertices plus at most one break per non-tree edge.
    if m + 1 > MAX_ORDER_POINTS {
        return Err(Error::Invalid(format!("enumeration limited to {MAX_ORDER_POINTS} support points")));
    }

    // Any term <= best forces deg+(D_f) <= best + 1 + slack, and deg+(D_f)
    // bounds every slope of f.
    let degree: Vec<i64> = (0..n).map(|v| prep.host.degree(v) as i64).collect();
    let slack: i64 =
        (0..n).map(|v| (degree[v] - 1 - inst.chips[v]).max(0)).sum::<i64>() + (m + 1 - n) as i64;

    let mut best: Option<(i64, usize, Vec<i64>)> = None;
    let mut evaluated = 0u64;
    let mut stopped_by_cap = false;
    let cap_of = |best: &Option<(i64, usize, Vec<i64>)>| match (budget.prune, best) {
        (true, Some((b, _, _))) => u.min(b + 1 + slack),
        _ => u,
    };
    // Slope vectors are visited shell by shell in the max norm, so pruning
    // can stop a tree as soon as the norm exceeds the current cap.
    'trees: for (t, tree) in trees.iter().enumerate() {
        let rooted = RootedTree::new(inst, tree);
        let mut r = 0;
        while r <= cap_of(&best) {
            let mut stop = false;
            visit_shell(n - 1, r, &mut |slopes| {
                if r > cap_of(&best) {
                    return false;
                }
                if budget.term_cap.is_some_and(|c| evaluated >= c) {
                    stop = true;
                    return false;
                }
                let tf = extend(inst, tree, &rooted, slopes);
                let term = min_over_orders(&tf.chips, &tf.segments, false).0 - 1;
                evaluated += 1;
                observe(&TermRecord { tree: t, slopes, term });
                if best.as_ref().is_none_or(|(b, _, _)| term < *b) {
                    best = Some((term, t, slopes.to_vec()));
                }
                true
            });
            if stop {
                stopped_by_cap = true;
                break 'trees;
            }
            r += 1;
        }
    }

    let exact = !stopped_by_cap && bound >= exact_bound;
    let stats = EnumerationStats {
        n,
        m,
        max_chips,
        max_degree: prep.host.graph().max_degree(),
        p,
        exact_bound,
        slope_bound: bound,
        trees: trees.len(),
        candidates,
        evaluated,
        stopped_by_cap,
        exact,
    };
    let Some((term, t, slopes)) = best else {
        return Err(Error::BudgetExceeded(0));
    };
    let certificate = certificate(g, d, &prep, &trees[t], &slopes)?;
    debug_assert!(certificate.term(g)? == term);
    let witness = {
        let nu = nu_divisor(g, &certificate.permutation)?;
        (&certificate.divisor - &nu).positive_part()
    };
    Ok(RankResult { rank: term, witness, certificate: Some(certificate), exact, stats: Some(stats) })
}

fn certificate(g: &MetricGraph, d: &Divisor, prep: &Prepared, tree: &[usize], slopes: &[i64]) -> Result<RankCertificate> {
    let inst = &prep.instance;
    let rooted = RootedTree::new(inst, tree);
    let tf = extend(inst, tree, &rooted, slopes);
    let (_, order) = min_over_orders(&tf.chips, &tf.segments, true);

    let mut bps = vec![Vec::new(); inst.edges.len()];
    for &(e, offset, value) in &tf.breaks {
        bps[e].push((Rational::from_integer(offset.into()), Rational::from_integer(value.into())));
    }
    let values = tf.values.iter().map(|&x| Rational::from_integer(x.into())).collect();
    let function = PlFunction::new(&prep.host, values, bps)?.pull_back(&prep.map, g)?;

    let points = order
        .iter()
        .map(|&x| {
            let q = if x < inst.n {
                Point::Vertex(x)
            } else {
                let (e, offset, _) = tf.breaks[x - inst.n];
                Point::interior(e, Rational::from_integer(offset.into()))
            };
            prep.map.inverse(&q)
        })
        .collect::<Result<Vec<_>>>()?;
    let permutation = Permutation::new(g, points)?;
    let divisor = d + &function.divisor();
    Ok(RankCertificate { divisor, permutation, function })
}
