use tropdiv::io;
use tropdiv::rank::{self, check_rr_conditions, riemann_roch_residual, EnumerationBudget, Method, RankOptions};
use tropdiv::rational::{int, ratio};
use tropdiv::reduction::{equivalent, reduce_metric};
use tropdiv::{AnyHost, Divisor, MetricGraph, Point};

const DOC: &str = "\
metricgraph G
vertex a
vertex b
vertex c
edge e1 a b 1
edge e2 b c 1/2
edge e3 c a 3/2
edge e4 a b 2

divisor D on G
chip a 1
chip e3@1/2 1

metricgraph T
vertex x
vertex y
vertex z
edge f1 x y 1
edge f2 x y 1
edge r y z inf

divisor E on T
chip r@4 2
";

#[test]
fn parse_rank_and_round_trip() {
    let doc = io::parse(DOC).unwrap();
    assert_eq!(io::serialize(&doc), DOC);
    let (host, d) = doc.divisor("D").unwrap();
    assert_eq!(host.genus(), 2);
    let sub = rank::rank_any(host, d, &RankOptions::default()).unwrap();
    let en = rank::rank_any(
        host,
        d,
        &RankOptions { method: Method::Enumeration, budget: EnumerationBudget::exact(), riemann_roch_shortcut: false },
    )
    .unwrap();
    assert_eq!(sub.rank, en.rank);
    assert!(en.exact);
    let AnyHost::Metric(g) = host else { panic!("metric host expected") };
    let cert = en.certificate.unwrap();
    assert_eq!(cert.term(g).unwrap(), en.rank);
    assert!(equivalent(g, d, &cert.divisor).unwrap().equivalent);
    assert_eq!(riemann_roch_residual(host, d).unwrap(), 0);
}

#[test]
fn tropical_curve_ranks_follow_the_retraction() {
    let doc = io::parse(DOC).unwrap();
    let (host, e) = doc.divisor("E").unwrap();
    // Two chips on the ray retract to 2(y) on a genus-one banana.
    assert_eq!(rank::rank_any(host, e, &RankOptions::default()).unwrap().rank, 1);
    assert_eq!(riemann_roch_residual(host, e).unwrap(), 0);
}

#[test]
fn reduction_certificate_and_rr_report() {
    let g = MetricGraph::from_edges(2, &[(0, 1, int(2)), (0, 1, int(3)), (0, 1, ratio(5, 2))]).unwrap();
    let d = Divisor::from_chips(&g, [(Point::Vertex(1), 2), (Point::interior(2, ratio(1, 2)), -1)]).unwrap();
    let r = reduce_metric(&g, &d, &Point::Vertex(0)).unwrap();
    assert_eq!(&d + &r.certificate.divisor(), r.reduced);
    let report = check_rr_conditions(&g, &d).unwrap();
    assert!(report.rr1);
    assert_eq!(report.rr2, Some(true));
}
