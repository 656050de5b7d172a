//! The line-oriented `.tg` document format and JSON renderings.
//!
//! ```text
//! metricgraph G
//! vertex v0
//! vertex v1
//! edge e1 v0 v1 3/2
//! divisor D on G
//! chip v1 2
//! chip e1@1/2 -1
//! perm P on G: v0 v1
//! ```
//!
//! `edge ID U V inf` declares an infinite edge whose end `V` must be a
//! vertex used by no other edge. Points are vertex ids, `EDGE@OFFSET` with
//! the offset measured from the edge's first endpoint, or `RAY@OFFSET` on an
//! infinite edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Map, Value};

use crate::divisor::Divisor;
use crate::error::Error;
use crate::permutation::Permutation;
use crate::plfunc::PlFunction;
use crate::rank::{RankCertificate, RankResult};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::topology::{AnyHost, Edge, Graph, Host, MetricGraph, Point, Ray, TropicalCurve};

/// JSON schema version written as `"format"`.
pub const JSON_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Host(String),
    Divisor(String),
    Permutation(String),
}

#[derive(Clone, Debug)]
pub struct NamedDivisor {
    pub host: String,
    pub divisor: Divisor,
}

#[derive(Clone, Debug)]
pub struct NamedPermutation {
    pub host: String,
    pub permutation: Permutation,
}

/// Parsed document. `items` keeps declaration order for serialization.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub items: Vec<Item>,
    pub hosts: BTreeMap<String, AnyHost>,
    pub divisors: BTreeMap<String, NamedDivisor>,
    pub permutations: BTreeMap<String, NamedPermutation>,
}

impl Document {
    pub fn host(&self, name: &str) -> Option<&AnyHost> {
        self.hosts.get(name)
    }

    pub fn divisor(&self, name: &str) -> Option<(&AnyHost, &Divisor)> {
        let d = self.divisors.get(name)?;
        Some((self.hosts.get(&d.host)?, &d.divisor))
    }

    pub fn permutation(&self, name: &str) -> Option<(&AnyHost, &Permutation)> {
        let p = self.permutations.get(name)?;
        Some((self.hosts.get(&p.host)?, &p.permutation))
    }

    fn name_taken(&self, name: &str) -> bool {
        self.hosts.contains_key(name) || self.divisors.contains_key(name) || self.permutations.contains_key(name)
    }
}

/// A token with its 1-based column.
#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    for (ci, &(bi, c)) in chars.iter().enumerate() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                let (sb, _) = chars[s];
                out.push(Token { text: &line[sb..bi], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(ci);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[chars[s].0..], column: s + 1 });
    }
    out
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Graph under construction.
struct GraphDraft {
    name: String,
    line: usize,
    column: usize,
    vertices: Vec<(String, usize, usize)>,
    edges: Vec<EdgeDraft>,
}

struct EdgeDraft {
    id: String,
    u: String,
    v: String,
    length: Option<Rational>,
    line: usize,
    column: usize,
}

struct DivisorDraft {
    name: String,
    host: String,
    chips: Vec<(Point, i64)>,
}

enum Open {
    Nothing,
    Graph(GraphDraft),
    Divisor(DivisorDraft),
}

struct Parser {
    doc: Document,
    open: Open,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser { doc: Document::default(), open: Open::Nothing };
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        p.line(line, &tokens)?;
    }
    p.close(last_line + 1)?;
    Ok(p.doc)
}

impl Parser {
    fn line(&mut self, line: usize, t: &[Token]) -> Result<(), ParseError> {
        let kw = t[0];
        match kw.text {
            "metricgraph" => {
                self.close(line)?;
                expect_len(line, t, 2, "metricgraph NAME")?;
                self.check_new_name(line, t[1])?;
                self.open = Open::Graph(GraphDraft {
                    name: t[1].text.to_string(),
                    line,
                    column: t[1].column,
                    vertices: Vec::new(),
                    edges: Vec::new(),
                });
            }
            "vertex" => {
                expect_len(line, t, 2, "vertex ID")?;
                let Open::Graph(g) = &mut self.open else {
                    return Err(err(line, kw.column, "`vertex` outside a metricgraph block"));
                };
                check_id(line, t[1])?;
                g.vertices.push((t[1].text.to_string(), line, t[1].column));
            }
            "edge" => {
                expect_len(line, t, 5, "edge ID U V LENGTH")?;
                let Open::Graph(g) = &mut self.open else {
                    return Err(err(line, kw.column, "`edge` outside a metricgraph block"));
                };
                for tok in &t[1..4] {
                    check_id(line, *tok)?;
                }
                let length = if t[4].text == "inf" {
                    None
                } else {
                    match parse_rational(t[4].text) {
                        Some(l) => Some(l),
                        None => return Err(err(line, t[4].column, format!("non-rational length `{}`", t[4].text))),
                    }
                };
                g.edges.push(EdgeDraft {
                    id: t[1].text.to_string(),
                    u: t[2].text.to_string(),
                    v: t[3].text.to_string(),
                    length,
                    line,
                    column: t[1].column,
                });
            }
            "divisor" => {
                self.close(line)?;
                if t.len() != 4 || t[2].text != "on" {
                    return Err(err(line, kw.column, "expected `divisor NAME on GRAPH`"));
                }
                self.check_new_name(line, t[1])?;
                if !self.doc.hosts.contains_key(t[3].text) {
                    return Err(err(line, t[3].column, format!("unknown host `{}`", t[3].text)));
                }
                self.open = Open::Divisor(DivisorDraft {
                    name: t[1].text.to_string(),
                    host: t[3].text.to_string(),
                    chips: Vec::new(),
                });
            }
            "chip" => {
                expect_len(line, t, 3, "chip POINT INT")?;
                let Open::Divisor(d) = &mut self.open else {
                    return Err(err(line, kw.column, "`chip` outside a divisor block"));
                };
                let host = &self.doc.hosts[&d.host];
                let point = parse_point(host, t[1].text).map_err(|m| err(line, t[1].column, m))?;
                let n: i64 = t[2]
                    .text
                    .parse()
                    .map_err(|_| err(line, t[2].column, format!("expected an integer, got `{}`", t[2].text)))?;
                d.chips.push((point, n));
            }
            "perm" => {
                self.close(line)?;
                if t.len() < 4 || t[2].text != "on" {
                    return Err(err(line, kw.column, "expected `perm NAME on GRAPH: POINT ...`"));
                }
                self.check_new_name(line, t[1])?;
                let Some(host_name) = t[3].text.strip_suffix(':') else {
                    return Err(err(line, t[3].column, "expected `:` after the graph name"));
                };
                let Some(host) = self.doc.hosts.get(host_name) else {
                    return Err(err(line, t[3].column, format!("unknown host `{host_name}`")));
                };
                let AnyHost::Metric(g) = host else {
                    return Err(err(line, t[3].column, "permutations need a host without infinite edges"));
                };
                let mut points = Vec::new();
                for tok in &t[4..] {
                    points.push(parse_point(host, tok.text).map_err(|m| err(line, tok.column, m))?);
                }
                let permutation = Permutation::new(g, points).map_err(|e| err(line, kw.column, e.to_string()))?;
                let name = t[1].text.to_string();
                self.doc.items.push(Item::Permutation(name.clone()));
                self.doc.permutations.insert(name, NamedPermutation { host: host_name.to_string(), permutation });
            }
            other => return Err(err(line, kw.column, format!("unknown keyword `{other}`"))),
        }
        Ok(())
    }

    fn check_new_name(&self, line: usize, t: Token) -> Result<(), ParseError> {
        check_id(line, t)?;
        let pending = match &self.open {
            Open::Graph(g) => g.name == t.text,
            Open::Divisor(d) => d.name == t.text,
            Open::Nothing => false,
        };
        if pending || self.doc.name_taken(t.text) {
            return Err(err(line, t.column, format!("duplicate id `{}`", t.text)));
        }
        Ok(())
    }

    fn close(&mut self, line: usize) -> Result<(), ParseError> {
        match std::mem::replace(&mut self.open, Open::Nothing) {
            Open::Nothing => {}
            Open::Graph(g) => {
                let name = g.name.clone();
                let host = build_host(g)?;
                self.doc.items.push(Item::Host(name.clone()));
                self.doc.hosts.insert(name, host);
            }
            Open::Divisor(d) => {
                let host = &self.doc.hosts[&d.host];
                let divisor = Divisor::from_chips(host, d.chips).map_err(|e| err(line, 1, e.to_string()))?;
                self.doc.items.push(Item::Divisor(d.name.clone()));
                self.doc.divisors.insert(d.name, NamedDivisor { host: d.host, divisor });
            }
        }
        Ok(())
    }
}

fn expect_len(line: usize, t: &[Token], n: usize, shape: &str) -> Result<(), ParseError> {
    if t.len() != n {
        let column = t.get(n).map_or(t[0].column, |x| x.column);
        return Err(err(line, column, format!("expected `{shape}`")));
    }
    Ok(())
}

fn check_id(line: usize, t: Token) -> Result<(), ParseError> {
    if valid_id(t.text) {
        Ok(())
    } else {
        Err(err(line, t.column, format!("invalid id `{}`", t.text)))
    }
}

fn build_host(g: GraphDraft) -> Result<AnyHost, ParseError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (name, line, column) in &g.vertices {
        if index.insert(name.as_str(), index.len()).is_some() {
            return Err(err(*line, *column, format!("duplicate id `{name}`")));
        }
    }
    let lookup = |e: &EdgeDraft, name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| err(e.line, e.column, format!("unknown vertex `{name}`")))
    };
    // Ends of infinite edges leave the finite vertex set.
    let mut is_end = vec![false; g.vertices.len()];
    let mut incidences = vec![0usize; g.vertices.len()];
    for e in &g.edges {
        let (u, v) = (lookup(e, &e.u)?, lookup(e, &e.v)?);
        incidences[u] += 1;
        incidences[v] += 1;
        if e.length.is_none() {
            if is_end[v] || u == v {
                return Err(err(e.line, e.column, format!("unbounded end `{}` must have degree 1", e.v)));
            }
            is_end[v] = true;
        }
    }
    for e in &g.edges {
        let (u, v) = (lookup(e, &e.u)?, lookup(e, &e.v)?);
        if is_end[u] || (is_end[v] && (incidences[v] != 1 || e.length.is_some())) {
            let end = if is_end[u] { &e.u } else { &e.v };
            return Err(err(e.line, e.column, format!("unbounded end `{end}` must have degree 1")));
        }
    }
    let mut finite_index = vec![usize::MAX; g.vertices.len()];
    let mut names = Vec::new();
    for (i, (name, _, _)) in g.vertices.iter().enumerate() {
        if !is_end[i] {
            finite_index[i] = names.len();
            names.push(name.clone());
        }
    }
    if names.is_empty() {
        return Err(err(g.line, g.column, "graph has no vertices"));
    }
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut rays = Vec::new();
    for e in &g.edges {
        let (u, v) = (lookup(e, &e.u)?, lookup(e, &e.v)?);
        match &e.length {
            Some(l) => {
                edges.push(Edge { name: e.id.clone(), tail: finite_index[u], head: finite_index[v] });
                lengths.push(l.clone());
            }
            None => rays.push(Ray { name: e.id.clone(), attach: finite_index[u], end_name: e.v.clone() }),
        }
    }
    let locate = |e: &Error| -> (usize, usize) {
        let name = match e {
            Error::DuplicateId(n) | Error::UnknownVertex(n) | Error::UnboundedEndDegree(n) => Some(n.as_str()),
            Error::NonPositiveLength { edge, .. } => Some(edge.as_str()),
            _ => None,
        };
        name.and_then(|n| g.edges.iter().find(|d| d.id == n).map(|d| (d.line, d.column)))
            .or_else(|| name.and_then(|n| g.vertices.iter().find(|v| v.0 == n).map(|v| (v.1, v.2))))
            .unwrap_or((g.line, g.column))
    };
    let wrap = |e: Error| {
        let (line, column) = locate(&e);
        let message = match e {
            Error::Disconnected => "disconnected graph".to_string(),
            other => other.to_string(),
        };
        err(line, column, message)
    };
    let graph = Graph::new(names, edges).map_err(wrap)?;
    let metric = MetricGraph::new(graph, lengths).map_err(wrap)?;
    if rays.is_empty() {
        Ok(AnyHost::Metric(metric))
    } else {
        Ok(AnyHost::Tropical(TropicalCurve::new(metric, rays).map_err(wrap)?))
    }
}

/// Parses a point name on `host`: a vertex id, an end id, or `ID@OFFSET`.
pub fn parse_point(host: &AnyHost, text: &str) -> Result<Point, String> {
    let g = host.metric();
    let rays: &[Ray] = match host {
        AnyHost::Tropical(c) => c.rays(),
        AnyHost::Metric(_) => &[],
    };
    if let Some((id, offset)) = text.split_once('@') {
        let offset = parse_rational(offset).ok_or_else(|| format!("non-rational offset in `{text}`"))?;
        if let Some(e) = g.graph().edge_index(id) {
            let p = Point::interior(e, offset);
            return if g.contains(&p) { Ok(p) } else { Err(format!("offset out of range in `{text}`")) };
        }
        if let Some(r) = rays.iter().position(|r| r.name == id) {
            let p = Point::Ray { ray: r, offset };
            return if host.contains(&p) { Ok(p) } else { Err(format!("offset out of range in `{text}`")) };
        }
        return Err(format!("unknown edge `{id}`"));
    }
    if let Some(v) = g.graph().vertex_index(text) {
        return Ok(Point::Vertex(v));
    }
    if let Some(r) = rays.iter().position(|r| r.end_name == text) {
        return Ok(Point::End(r));
    }
    Err(format!("unknown point `{text}`"))
}

fn write_host(out: &mut String, name: &str, host: &AnyHost) {
    let g = host.metric();
    out.push_str(&format!("metricgraph {name}\n"));
    for v in g.graph().vertex_names() {
        out.push_str(&format!("vertex {v}\n"));
    }
    let rays: &[Ray] = match host {
        AnyHost::Tropical(c) => c.rays(),
        AnyHost::Metric(_) => &[],
    };
    for r in rays {
        out.push_str(&format!("vertex {}\n", r.end_name));
    }
    for (e, l) in g.graph().edges().iter().zip(g.lengths()) {
        let (u, v) = (g.graph().vertex_name(e.tail), g.graph().vertex_name(e.head));
        out.push_str(&format!("edge {} {u} {v} {}\n", e.name, format_rational(l)));
    }
    for r in rays {
        out.push_str(&format!("edge {} {} {} inf\n", r.name, g.graph().vertex_name(r.attach), r.end_name));
    }
}

/// Canonical text: declaration order, one blank line between blocks,
/// chips merged in point order, offsets in lowest terms.
pub fn serialize(doc: &Document) -> String {
    let mut blocks = Vec::new();
    for item in &doc.items {
        let mut out = String::new();
        match item {
            Item::Host(name) => write_host(&mut out, name, &doc.hosts[name]),
            Item::Divisor(name) => {
                let d = &doc.divisors[name];
                out.push_str(&format!("divisor {name} on {}\n", d.host));
                out.push_str(&serialize_divisor(&doc.hosts[&d.host], &d.divisor));
            }
            Item::Permutation(name) => {
                let p = &doc.permutations[name];
                let host = &doc.hosts[&p.host];
                let points: Vec<String> = p.permutation.points().iter().map(|q| host.point_name(q)).collect();
                out.push_str(&format!("perm {name} on {}: {}\n", p.host, points.join(" ")));
            }
        }
        blocks.push(out);
    }
    blocks.join("\n")
}

/// `chip POINT N` lines; nothing for the zero divisor.
pub fn serialize_divisor(host: &impl Host, d: &Divisor) -> String {
    d.iter().map(|(p, n)| format!("chip {} {n}\n", host.point_name(p))).collect()
}

pub fn divisor_json(host: &impl Host, d: &Divisor) -> Value {
    let map: Map<String, Value> = d.iter().map(|(p, &n)| (host.point_name(p), json!(n))).collect();
    Value::Object(map)
}

pub fn permutation_json(host: &impl Host, p: &Permutation) -> Value {
    Value::Array(p.points().iter().map(|q| Value::String(host.point_name(q))).collect())
}

/// Vertex values and interior breakpoints of a function.
pub fn function_json(g: &MetricGraph, f: &PlFunction) -> Value {
    let map: Map<String, Value> = f.describe(g).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    Value::Object(map)
}

pub fn certificate_json(g: &MetricGraph, c: &RankCertificate) -> Value {
    json!({
        "divisor": divisor_json(g, &c.divisor),
        "permutation": permutation_json(g, &c.permutation),
        "function": function_json(g, &c.function),
    })
}

/// `g` is where the witness lives: the metric graph itself, or the finite
/// part of a tropical curve.
pub fn rank_json(g: &MetricGraph, r: &RankResult) -> Value {
    let mut out = json!({
        "format": JSON_FORMAT,
        "rank": r.rank,
        "exact": r.exact,
        "witness": divisor_json(g, &r.witness),
    });
    if let Some(c) = &r.certificate {
        out["certificate"] = certificate_json(g, c);
    }
    if let Some(s) = &r.stats {
        out["enumeration"] = json!({
            "n": s.n,
            "m": s.m,
            "max_chips": s.max_chips,
            "max_degree": s.max_degree,
            "p": s.p,
            "exact_bound": s.exact_bound.to_string(),
            "slope_bound": s.slope_bound.to_string(),
            "trees": s.trees,
            "candidates": s.candidates.to_string(),
            "evaluated": s.evaluated,
            "stopped_by_cap": s.stopped_by_cap,
        });
    }
    out
}

/// Deterministic pretty JSON (keys are sorted by `serde_json`'s map).
pub fn to_json_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const BANANA: &str = "\
metricgraph B
vertex v0
vertex v1
edge e1 v0 v1 1
edge e2 v0 v1 1
edge e3 v0 v1 1

divisor D on B
chip v1 3
";

    #[test]
    fn parses_banana() {
        let doc = parse(BANANA).unwrap();
        let (host, d) = doc.divisor("D").unwrap();
        assert_eq!(host.genus(), 2);
        assert_eq!(d.degree(), 3);
        assert_eq!(serialize(&doc), BANANA);
    }

    #[test]
    fn rational_lengths_and_offsets() {
        let text = "metricgraph G\nvertex v0\nvertex v1\nedge e1 v0 v1 3/2\ndivisor D on G\nchip e1@2/4 1\nchip v0 -1\nchip e1@1/2 1\n";
        let doc = parse(text).unwrap();
        let (host, d) = doc.divisor("D").unwrap();
        assert_eq!(host.metric().length(0), &ratio(3, 2));
        assert_eq!(d.get(&Point::interior(0, ratio(1, 2))), 2);
        let canonical = serialize(&doc);
        assert!(canonical.contains("chip e1@1/2 2\n"));
        assert_eq!(serialize(&parse(&canonical).unwrap()), canonical);
    }

    #[test]
    fn offset_out_of_range() {
        let text = "metricgraph G\nvertex v0\nvertex v1\nedge e1 v0 v1 3/2\ndivisor D on G\nchip e1@5/2 1\n";
        let e = parse(text).unwrap_err();
        assert_eq!((e.line, e.column), (6, 6));
        assert!(e.message.contains("offset out of range"));
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("metricgraph G\nvertex a\nvertex b\n", 1, "disconnected graph"),
            ("metricgraph G\nvertex a\nvertex a\n", 3, "duplicate id"),
            ("metricgraph G\nvertex a\nedge e a a 1.5\n", 3, "non-rational length"),
            ("divisor D on H\n", 1, "unknown host"),
            ("metricgraph G\nvertex a\nedge e a b 1\n", 3, "unknown vertex"),
            ("metricgraph G\nvertex a\nedge e a a 0\n", 3, "non-positive length"),
            ("metricgraph G\nvertex a\nvertex b\nedge r a b inf\nedge s a b inf\n", 5, "unbounded end"),
            ("chip v0 1\n", 1, "outside a divisor"),
            ("metricgraph G\nvertex a\nmetricgraph G\n", 3, "duplicate id"),
        ];
        for (text, line, needle) in cases {
            let e = parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text}: {e}");
            assert!(e.message.contains(needle), "{text}: {e}");
            assert!(e.column >= 1);
        }
    }

    #[test]
    fn tropical_round_trip() {
        let text = "\
metricgraph T
vertex a
vertex b
vertex u
edge e1 a b 2
edge r b u inf

divisor D on T
chip r@7/2 -1
chip u 1
";
        let doc = parse(text).unwrap();
        let AnyHost::Tropical(c) = doc.host("T").unwrap() else { panic!("expected a tropical curve") };
        assert_eq!(c.rays().len(), 1);
        assert_eq!(doc.divisor("D").unwrap().1.degree(), 0);
        assert_eq!(serialize(&doc), text);
    }

    #[test]
    fn permutations_parse_and_validate() {
        let text = format!("{BANANA}\nperm P on B: v0 v1\n");
        let doc = parse(&text).unwrap();
        assert_eq!(doc.permutation("P").unwrap().1.len(), 2);
        assert_eq!(serialize(&doc), text);
        let bad = format!("{BANANA}\nperm P on B: v0\n");
        assert!(parse(&bad).unwrap_err().message.contains("misses"));
    }

    #[test]
    fn comments_and_zero_divisor() {
        let text = "# a path\nmetricgraph G   # name\nvertex v0\nvertex v1\nedge e1 v0 v1 1\ndivisor Z on G\nchip v0 2\nchip v0 -2\n";
        let doc = parse(text).unwrap();
        assert!(doc.divisor("Z").unwrap().1.is_zero());
        let out = serialize(&doc);
        assert!(out.ends_with("divisor Z on G\n"));
    }

    #[test]
    fn json_is_sorted_and_versioned() {
        let doc = parse(BANANA).unwrap();
        let (host, d) = doc.divisor("D").unwrap();
        let v = json!({"format": JSON_FORMAT, "divisor": divisor_json(host, d), "a": 1});
        let s = to_json_string(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"divisor\"").unwrap());
        assert!(s.find("\"divisor\"").unwrap() < s.find("\"format\"").unwrap());
    }
}
