//! Command dispatch for the `tropdiv` binary. [`run`] never exits the
//! process, so it can be driven from tests.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tropdiv::corpus;
use tropdiv::io::{self, Document, JSON_FORMAT};
use tropdiv::permutation::nu_divisor;
use tropdiv::rank::{self, EnumerationBudget, Method, RankOptions};
use tropdiv::reduction::{equivalent, reduce_metric};
use tropdiv::{AnyHost, Divisor, MetricGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tropdiv", version, about = "Divisors, ranks and Riemann-Roch on metric graphs and tropical curves")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus, size and canonical divisor of each host.
    Info { file: String, hosts: Vec<String> },
    /// Reduced divisor equivalent to a divisor, with respect to a base point.
    Reduce {
        #[arg(long)]
        base: String,
        file: String,
        divisor: String,
    },
    /// Rank of a divisor.
    Rank {
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Bound |slope| by N in the enumeration (implies enumeration).
        #[arg(long)]
        slope_bound: Option<u64>,
        file: String,
        divisor: String,
    },
    /// Whether two divisors are linearly equivalent.
    Equiv { file: String, first: String, second: String },
    /// The divisor nu_P of a permutation.
    Nu {
        #[arg(long)]
        perm: String,
        file: String,
    },
    /// Riemann-Roch checks for the divisors of a file (all when none named).
    Rrcheck { file: String, divisors: Vec<String> },
    /// Built-in consistency checks on small graphs.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Subdivision,
    Enumeration,
}

/// Exit code and the text for stdout and stderr.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn invalid(message: impl std::fmt::Display) -> Outcome {
        Outcome { code: EXIT_INVALID, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Step<T> = std::result::Result<T, Failure>;

/// Runs one command line; `args[0]` is the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_INVALID, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let json = cli.json;
    let result = match cli.command {
        Command::Info { file, hosts } => load(&file).and_then(|doc| info(&doc, &hosts, json)),
        Command::Reduce { base, file, divisor } => load(&file).and_then(|doc| reduce(&doc, &divisor, &base, json)),
        Command::Rank { method, slope_bound, file, divisor } => {
            load(&file).and_then(|doc| rank_cmd(&doc, &divisor, method, slope_bound, json))
        }
        Command::Equiv { file, first, second } => load(&file).and_then(|doc| equiv(&doc, &first, &second, json)),
        Command::Nu { perm, file } => load(&file).and_then(|doc| nu(&doc, &perm, json)),
        Command::Rrcheck { file, divisors } => load(&file).and_then(|doc| rrcheck(&doc, &divisors, json)),
        Command::Selftest => Ok(selftest(json)),
    };
    result.unwrap_or_else(|Failure(message)| Outcome::invalid(message))
}

fn load(path: &str) -> Step<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))?;
    io::parse(&text).map_err(|e| Failure(format!("{path}: {e}")))
}

fn emit(json: bool, value: Value, text: String) -> String {
    if json {
        io::to_json_string(&value) + "\n"
    } else {
        text
    }
}

fn divisor<'a>(doc: &'a Document, name: &str) -> Step<(&'a AnyHost, &'a Divisor)> {
    doc.divisor(name).ok_or_else(|| Failure(format!("unknown divisor `{name}`")))
}

fn metric_host<'a>(host: &'a AnyHost, what: &str) -> Step<&'a MetricGraph> {
    match host {
        AnyHost::Metric(g) => Ok(g),
        AnyHost::Tropical(_) => Err(Failure(format!("{what} needs a host without infinite edges"))),
    }
}

fn info(doc: &Document, names: &[String], json: bool) -> Step<Outcome> {
    let names: Vec<&str> = if names.is_empty() {
        doc.items
            .iter()
            .filter_map(|item| match item {
                io::Item::Host(name) => Some(name.as_str()),
                _ => None,
            })
            .collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut text = String::new();
    let mut hosts = serde_json::Map::new();
    for name in names {
        let host = doc.host(name).ok_or_else(|| Failure(format!("unknown host `{name}`")))?;
        let g = host.metric();
        let rays = match host {
            AnyHost::Metric(_) => 0,
            AnyHost::Tropical(c) => c.rays().len(),
        };
        let canonical = host.canonical_divisor();
        text.push_str(&format!(
            "host {name}\ngenus {}\nvertices {}\nedges {}\n",
            host.genus(),
            g.vertex_count(),
            g.edge_count()
        ));
        if rays > 0 {
            text.push_str(&format!("rays {rays}\n"));
        }
        text.push_str(&format!("canonical {}\n", canonical.display(host)));
        hosts.insert(
            name.to_string(),
            json!({
                "genus": host.genus(),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "rays": rays,
                "canonical": io::divisor_json(host, &canonical),
            }),
        );
    }
    Ok(Outcome::ok(emit(json, json!({ "format": JSON_FORMAT, "hosts": hosts }), text)))
}

fn reduce(doc: &Document, name: &str, base: &str, json: bool) -> Step<Outcome> {
    let (host, d) = divisor(doc, name)?;
    let g = metric_host(host, "reduce")?;
    let v0 = io::parse_point(host, base).map_err(Failure)?;
    let r = reduce_metric(g, d, &v0)?;
    let value = json!({
        "format": JSON_FORMAT,
        "reduced": io::divisor_json(g, &r.reduced),
        "function": io::function_json(g, &r.certificate),
    });
    Ok(Outcome::ok(emit(json, value, format!("reduced {}\n", r.reduced.display(g)))))
}

fn rank_cmd(doc: &Document, name: &str, method: MethodArg, slope_bound: Option<u64>, json: bool) -> Step<Outcome> {
    let (host, d) = divisor(doc, name)?;
    let method = match (method, slope_bound) {
        (MethodArg::Subdivision, Some(_)) => {
            return Err(Failure("--slope-bound applies to the enumeration method only".into()))
        }
        (MethodArg::Subdivision, None) => Method::Subdivision,
        (MethodArg::Auto, None) => Method::Auto,
        (MethodArg::Enumeration, _) | (MethodArg::Auto, Some(_)) => Method::Enumeration,
    };
    let budget = slope_bound.map_or_else(EnumerationBudget::exact, EnumerationBudget::truncated);
    let opts = RankOptions { method, budget, riemann_roch_shortcut: false };
    let r = rank::rank_any(host, d, &opts)?;
    let mut text = format!("rank {}\n", r.rank);
    if !r.exact {
        text.push_str("exact false\n");
    }
    Ok(Outcome::ok(emit(json, io::rank_json(host.metric(), &r), text)))
}

fn equiv(doc: &Document, first: &str, second: &str, json: bool) -> Step<Outcome> {
    let (h1, d1) = divisor(doc, first)?;
    let (_, d2) = divisor(doc, second)?;
    let g = metric_host(h1, "equiv")?;
    let e = equivalent(g, d1, d2)?;
    let mut value = json!({ "format": JSON_FORMAT, "equivalent": e.equivalent });
    if let Some(f) = &e.witness {
        value["function"] = io::function_json(g, f);
    }
    Ok(Outcome::ok(emit(json, value, format!("equivalent {}\n", e.equivalent))))
}

fn nu(doc: &Document, name: &str, json: bool) -> Step<Outcome> {
    let (host, p) = doc.permutation(name).ok_or_else(|| Failure(format!("unknown permutation `{name}`")))?;
    let g = metric_host(host, "nu")?;
    let d = nu_divisor(g, p)?;
    let value = json!({ "format": JSON_FORMAT, "nu": io::divisor_json(g, &d), "degree": d.degree() });
    Ok(Outcome::ok(emit(json, value, format!("nu {}\n", d.display(g)))))
}

fn rrcheck(doc: &Document, names: &[String], json: bool) -> Step<Outcome> {
    let names: Vec<&str> = if names.is_empty() {
        doc.items
            .iter()
            .filter_map(|item| match item {
                io::Item::Divisor(name) => Some(name.as_str()),
                _ => None,
            })
            .collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut ok = true;
    let mut text = String::new();
    let mut reports = serde_json::Map::new();
    for name in names {
        let (host, d) = divisor(doc, name)?;
        let residual = rank::riemann_roch_residual(host, d)?;
        let mut line = format!("{name} residual {residual}");
        let mut report = json!({ "residual": residual });
        ok &= residual == 0;
        if let AnyHost::Metric(g) = host {
            let rr = rank::check_rr_conditions(g, d)?;
            ok &= rr.rr1 && rr.rr2 != Some(false);
            line.push_str(&format!(" epsilon {} rr1 {}", rr.epsilon, verdict(rr.rr1)));
            if let Some(rr2) = rr.rr2 {
                line.push_str(&format!(" rr2 {}", verdict(rr2)));
            }
            report["epsilon"] = json!(rr.epsilon);
            report["rr1"] = json!(rr.rr1);
            report["rr2"] = json!(rr.rr2);
            if let Some(p) = &rr.permutation {
                report["permutation"] = io::permutation_json(g, p);
            }
        }
        text.push_str(&line);
        text.push('\n');
        reports.insert(name.to_string(), report);
    }
    text.push_str(if ok { "ok\n" } else { "violated\n" });
    let value = json!({ "format": JSON_FORMAT, "ok": ok, "divisors": reports });
    let code = if ok { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome { code, stdout: emit(json, value, text), stderr: String::new() })
}

fn verdict(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

/// Riemann-Roch, the rank bound `r <= deg` and agreement of the two rank
/// methods on all small loopless graphs.
fn selftest(json: bool) -> Outcome {
    let mut checks = 0u64;
    let mut failures = Vec::new();
    let subdivision = RankOptions::default();
    let enumeration = RankOptions { method: Method::Enumeration, ..RankOptions::default() };
    let mut rng = corpus::rng(1);
    for g in corpus::multigraphs(3, 3, false) {
        let mg = corpus::unit_metric(&g);
        let host = AnyHost::Metric(mg.clone());
        for _ in 0..4 {
            let d = corpus::random_vertex_divisor(&mg, g.vertex_count(), -1, 2, &mut rng);
            let label = format!("{} on {} vertices, {} edges", d.display(&mg), g.vertex_count(), g.edge_count());
            checks += 1;
            match (rank::rank_metric(&mg, &d, &subdivision), rank::rank_metric(&mg, &d, &enumeration)) {
                (Ok(a), Ok(b)) if a.rank == b.rank && a.rank <= d.degree().max(-1) => {}
                (a, b) => failures.push(format!(
                    "rank methods disagree for {label}: {:?} vs {:?}",
                    a.map(|r| r.rank),
                    b.map(|r| r.rank)
                )),
            }
            checks += 1;
            match rank::riemann_roch_residual(&host, &d) {
                Ok(0) => {}
                other => failures.push(format!("Riemann-Roch residual {other:?} for {label}")),
            }
        }
    }
    let ok = failures.is_empty();
    let mut text: String = failures.iter().map(|f| format!("{f}\n")).collect();
    text.push_str(&format!("selftest {} checks, {} failures\n", checks, failures.len()));
    let value = json!({ "format": JSON_FORMAT, "checks": checks, "failures": failures, "ok": ok });
    Outcome { code: if ok { EXIT_OK } else { EXIT_VIOLATION }, stdout: emit(json, value, text), stderr: String::new() }
}
