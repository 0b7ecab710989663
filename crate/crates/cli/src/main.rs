mod construct;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bicover::boundtab::{complete_report, graph_report, thm11_lower, BoundReport, Side};
use bicover::coverkit::{capacity, parse_covering, serialize_covering, verify, CoverError, Covering, Target};
use bicover::graphlib::{alpha_per_vertex, parse_graph, Graph};
use bicover::oracle::{exact_cap, OracleError, SearchBudget, EXACT_CAP_MAX_N};
use bicover::proofcheck::{
    check_convexity, check_eq1, check_event_disjointness, check_independent_event_sets, check_overlap_lemma,
    check_tail_sum, CheckReport, Mode,
};
use bicover::{boundtab::half_floor, Limits, SCHEMA_VERSION};
use clap::{Args, Parser, Subcommand, ValueEnum};
use construct::{build, Method};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "bicover", version, about = "Bipartite coverings of graphs and complete multigraphs")]
struct Cli {
    /// Worker threads for parallel routines (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a covering and write it with a sidecar report.
    Construct(ConstructArgs),
    /// Check a covering file against K_n^λ or a graph.
    Verify(VerifyArgs),
    /// Print lower and upper capacity bounds.
    Bounds(BoundsArgs),
    /// Exact minimum capacity on a tiny K_n^λ.
    Exact(ExactArgs),
    /// Run the probabilistic diagnostics on a covering file.
    Proofcheck(ProofcheckArgs),
    /// Bounds, best construction and exact value over a grid of (n, λ).
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Serialize)]
struct ConstructArgs {
    /// Number of vertices (taken from --graph when omitted).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    lambda: usize,
    #[arg(long, value_enum)]
    #[serde(serialize_with = "ser_method")]
    method: Method,
    /// Graph JSON file (required by --method coloring).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Covering JSON path; the report goes next to it as `<stem>.report.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    path: PathBuf,
    #[arg(long, conflicts_with = "graph")]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Json,
    Table,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[arg(long, conflicts_with = "graph", requires = "lambda")]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    /// Fixed c for the λn/c bound (default: the largest admissible c).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Largest graph for which exact per-vertex α is attempted.
    #[arg(long, default_value_t = Limits::default().exact_alpha_max_n)]
    alpha_max_n: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
}

#[derive(Args, Debug, Serialize)]
struct ExactArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: usize,
    #[arg(long, default_value_t = SearchBudget::default().max_capacity)]
    max_capacity: usize,
    #[arg(long, default_value_t = SearchBudget::default().max_blocks)]
    max_blocks: usize,
    #[arg(long, default_value_t = SearchBudget::default().node_limit)]
    node_limit: u64,
}

#[derive(Args, Debug, Serialize)]
struct ProofcheckArgs {
    path: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    /// Run the graph diagnostics against this graph instead of K_n^λ.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Sweep all 2^m vectors (default when m is within the limit).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Sample this many vectors instead of sweeping.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = Limits::default().exhaustive_max_blocks)]
    exhaustive_max_blocks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    lambda_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    format: SweepFormat,
    /// Exact search is attempted only up to this n.
    #[arg(long, default_value_t = 5)]
    exact_max_n: usize,
    #[arg(long, default_value_t = 2_000_000)]
    exact_node_limit: u64,
}

fn ser_method<S: serde::Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

/// Exit status 1: the input was well formed but the answer is negative.
/// Exit status 2: bad flags, unreadable or malformed input.
enum Failure {
    Semantic(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Semantic(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Exact(a) => run_exact(a),
        Command::Proofcheck(a) => run_proofcheck(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Semantic(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn header(command: &str, config: &impl Serialize) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(config).expect("flags serialize"));
    m
}

fn print_json(doc: serde_json::Map<String, Value>) {
    println!("{}", serde_json::to_string_pretty(&Value::Object(doc)).expect("json output"));
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse_graph(&read(path)?)
        .with_context(|| format!("parsing graph {}", path.display()))
        .map_err(Failure::Usage)
}

fn load_covering(path: &Path) -> Result<Covering, Failure> {
    parse_covering(&read(path)?)
        .with_context(|| format!("parsing covering {}", path.display()))
        .map_err(Failure::Usage)
}

fn report_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "covering".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.report.json"))
}

fn run_construct(a: &ConstructArgs) -> Outcome {
    let graph = a.graph.as_deref().map(load_graph).transpose()?;
    if a.method == Method::Coloring && graph.is_none() {
        return Err(usage(anyhow!("--method coloring needs --graph")));
    }
    let n = match (a.n, &graph) {
        (Some(n), Some(g)) if n != g.n() => {
            return Err(usage(anyhow!("--n {n} does not match the graph's {} vertices", g.n())))
        }
        (Some(n), _) => n,
        (None, Some(g)) => g.n(),
        (None, None) => return Err(usage(anyhow!("--n is required without --graph"))),
    };
    let limits = Limits::default();
    let built = build(a.method, n, a.lambda, graph.as_ref(), &limits)?;
    let target = match &graph {
        Some(g) => Target::Graph {
            graph: g,
            lambda: a.lambda,
        },
        None => Target::Complete { n, lambda: a.lambda },
    };
    let coverage = verify(&built.covering, &target).map_err(anyhow::Error::from)?;
    let mut doc = header("construct", a);
    doc.insert("method".into(), json!(a.method.name()));
    doc.insert("params".into(), built.params);
    doc.insert("guaranteed_lambda".into(), json!(built.guaranteed_lambda));
    doc.insert("blocks".into(), json!(built.covering.len()));
    doc.insert("capacity".into(), json!(capacity(&built.covering)));
    doc.insert("valid".into(), json!(coverage.valid));
    doc.insert("min_multiplicity".into(), json!(coverage.min_multiplicity));
    match &a.out {
        Some(out) => {
            std::fs::write(out, serialize_covering(&built.covering))
                .with_context(|| format!("writing {}", out.display()))?;
            let side = report_path(out);
            doc.insert("covering_path".into(), json!(out));
            let text = serde_json::to_string_pretty(&Value::Object(doc.clone())).expect("json output");
            std::fs::write(&side, text).with_context(|| format!("writing {}", side.display()))?;
            doc.insert("report_path".into(), json!(side));
        }
        None => {
            doc.insert("covering".into(), bicover::coverkit::covering_to_json(&built.covering));
        }
    }
    print_json(doc);
    Ok(coverage.valid)
}

fn run_verify(a: &VerifyArgs) -> Outcome {
    let cov = load_covering(&a.path)?;
    let graph = a.graph.as_deref().map(load_graph).transpose()?;
    let lambda = a.lambda.unwrap_or(1);
    let target = match &graph {
        Some(g) => Target::Graph { graph: g, lambda },
        None => {
            let lambda = a
                .lambda
                .ok_or_else(|| usage(anyhow!("--lambda is required without --graph")))?;
            Target::Complete {
                n: a.n.unwrap_or(cov.n()),
                lambda,
            }
        }
    };
    let report = match verify(&cov, &target) {
        Ok(r) => r,
        Err(e @ CoverError::GroundSetMismatch { .. }) => return Err(usage(e)),
        Err(e) => return Err(Failure::Semantic(e.into())),
    };
    let mut doc = header("verify", a);
    doc.insert("report".into(), serde_json::to_value(&report).expect("report serializes"));
    print_json(doc);
    Ok(report.valid)
}

fn bounds_table(report: &BoundReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} {:<6} {:>16}  flags", "bound", "side", "value");
    for e in &report.entries {
        let side = match e.side {
            Side::Lower => "lower",
            Side::Upper => "upper",
        };
        let value = e.value.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(out, "{:<18} {:<6} {:>16}  {}", e.name, side, value, e.flags.join("; "));
    }
    out
}

fn run_bounds(a: &BoundsArgs) -> Outcome {
    let report = match (&a.graph, a.n, a.lambda) {
        (Some(path), _, _) => {
            let g = load_graph(path)?;
            let limits = Limits {
                exact_alpha_max_n: a.alpha_max_n,
                ..Limits::default()
            };
            let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            graph_report(&g, &id, &limits)
        }
        (None, Some(n), Some(lambda)) => {
            if n < 2 || lambda == 0 {
                return Err(usage(anyhow!("bounds need n >= 2 and lambda >= 1")));
            }
            complete_report(n, lambda, a.c)
        }
        _ => return Err(usage(anyhow!("give either --n and --lambda, or --graph"))),
    };
    match a.format {
        TableFormat::Json => {
            let mut doc = header("bounds", a);
            doc.insert("report".into(), serde_json::to_value(&report).expect("report serializes"));
            print_json(doc);
        }
        TableFormat::Table => {
            let config = serde_json::to_string(a).expect("flags serialize");
            println!("# schema_version={SCHEMA_VERSION} command=bounds config={config}");
            print!("{}", bounds_table(&report));
        }
    }
    Ok(true)
}

fn run_exact(a: &ExactArgs) -> Outcome {
    let budget = SearchBudget {
        max_capacity: a.max_capacity,
        max_blocks: a.max_blocks,
        node_limit: a.node_limit,
    };
    let mut doc = header("exact", a);
    match exact_cap(a.n, a.lambda, &budget) {
        Ok(r) => {
            doc.insert("value".into(), json!(r.value));
            doc.insert("status".into(), json!("optimal"));
            doc.insert("lower".into(), json!(r.value));
            doc.insert("upper".into(), json!(r.value));
            doc.insert("refuted".into(), json!(r.refuted));
            doc.insert("nodes".into(), json!(r.nodes));
            doc.insert("witness".into(), bicover::coverkit::covering_to_json(&r.witness));
        }
        Err(OracleError::BudgetExhausted { lower, upper }) => {
            doc.insert("value".into(), Value::Null);
            doc.insert("status".into(), json!("bracket"));
            doc.insert("lower".into(), json!(lower));
            doc.insert("upper".into(), json!(upper));
            doc.insert("witness".into(), Value::Null);
        }
        Err(e @ OracleError::InvalidInstance(_)) => return Err(usage(e)),
        Err(e) => return Err(Failure::Semantic(e.into())),
    }
    print_json(doc);
    Ok(true)
}

fn run_proofcheck(a: &ProofcheckArgs) -> Outcome {
    let cov = load_covering(&a.path)?;
    if let Some(n) = a.n {
        if n != cov.n() {
            return Err(usage(anyhow!("--n {n} does not match the covering's n = {}", cov.n())));
        }
    }
    let limits = Limits {
        exhaustive_max_blocks: a.exhaustive_max_blocks,
        ..Limits::default()
    };
    let mode = match a.samples {
        Some(trials) => Mode::Sampled { seed: a.seed, trials },
        None if a.exhaustive || cov.len() <= limits.exhaustive_max_blocks => Mode::Exhaustive,
        None => Mode::Sampled {
            seed: a.seed,
            trials: 100_000,
        },
    };
    let mut reports: Vec<CheckReport> = Vec::new();
    let semantic = |e: bicover::proofcheck::CheckError| Failure::Semantic(e.into());
    if let Some(path) = &a.graph {
        let g = load_graph(path)?;
        if g.n() != cov.n() {
            return Err(usage(anyhow!("graph has {} vertices, covering has {}", g.n(), cov.n())));
        }
        let alphas = alpha_per_vertex(&g, &limits).map_err(|e| Failure::Semantic(e.into()))?;
        reports.push(check_overlap_lemma(&cov, &g, &alphas, mode, &limits).map_err(semantic)?);
        reports.push(check_independent_event_sets(&cov, &g, mode, &limits).map_err(semantic)?);
    } else {
        let lambda = a
            .lambda
            .ok_or_else(|| usage(anyhow!("--lambda is required without --graph")))?;
        reports.push(check_tail_sum(&cov, lambda).map_err(semantic)?);
        reports.push(check_event_disjointness(&cov, lambda, mode, &limits).map_err(semantic)?);
        let r = half_floor(lambda);
        if r >= 1 {
            reports.push(check_eq1(&cov, lambda).map_err(semantic)?);
            let lo = (2 * r + 1) as f64;
            let hi = if lo < 50.0 { 50.0 } else { lo + 50.0 };
            reports.push(check_convexity(r, lo, hi, 1000).map_err(semantic)?);
        }
    }
    let ok = reports.iter().all(|r| r.ok);
    let mut doc = header("proofcheck", a);
    doc.insert("blocks".into(), json!(cov.len()));
    doc.insert("ok".into(), json!(ok));
    doc.insert("checks".into(), serde_json::to_value(&reports).expect("reports serialize"));
    print_json(doc);
    Ok(ok)
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    lambda: usize,
    lb_edgecount: f64,
    lb_thm11: f64,
    ub_item1: Option<f64>,
    ub_item2: Option<f64>,
    ub_item3: Option<f64>,
    ub_item4: Option<f64>,
    best_construction: Option<String>,
    best_capacity: Option<usize>,
    exact: Option<usize>,
}

fn sweep_row(n: usize, lambda: usize, a: &SweepArgs) -> SweepRow {
    let limits = Limits::default();
    let report = complete_report(n, lambda, None);
    let mut best: Option<(String, usize)> = None;
    for method in Method::COMPLETE {
        let Ok(built) = build(method, n, lambda, None, &limits) else {
            continue;
        };
        let valid = verify(&built.covering, &Target::Complete { n, lambda }).is_ok_and(|r| r.valid);
        let cap = capacity(&built.covering);
        if valid && best.as_ref().is_none_or(|(_, c)| cap < *c) {
            best = Some((method.name().to_string(), cap));
        }
    }
    let exact = (n <= a.exact_max_n.min(EXACT_CAP_MAX_N))
        .then(|| {
            let budget = SearchBudget {
                node_limit: a.exact_node_limit,
                ..SearchBudget::default()
            };
            exact_cap(n, lambda, &budget).ok().map(|r| r.value)
        })
        .flatten();
    SweepRow {
        n,
        lambda,
        lb_edgecount: report.value("edge_count").unwrap_or(f64::NAN),
        lb_thm11: thm11_lower(n, lambda),
        ub_item1: report.value("upper_item1"),
        ub_item2: report.value("upper_item2"),
        ub_item3: report.value("upper_item3"),
        ub_item4: report.value("upper_item4"),
        best_construction: best.as_ref().map(|(m, _)| m.clone()),
        best_capacity: best.map(|(_, c)| c),
        exact,
    }
}

fn csv_cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn run_sweep(a: &SweepArgs) -> Outcome {
    if let Some(&n) = a.n_list.iter().find(|&&n| n < 2) {
        return Err(usage(anyhow!("every n must be at least 2, got {n}")));
    }
    if a.lambda_list.contains(&0) {
        return Err(usage(anyhow!("every lambda must be at least 1")));
    }
    let grid: Vec<(usize, usize)> = a
        .n_list
        .iter()
        .flat_map(|&n| a.lambda_list.iter().map(move |&l| (n, l)))
        .collect();
    let rows: Vec<SweepRow> = grid.iter().map(|&(n, l)| sweep_row(n, l, a)).collect();
    match a.format {
        SweepFormat::Json => {
            let mut doc = header("sweep", a);
            doc.insert("rows".into(), serde_json::to_value(&rows).expect("rows serialize"));
            print_json(doc);
        }
        SweepFormat::Csv => {
            let config = serde_json::to_string(a).expect("flags serialize");
            println!("# schema_version={SCHEMA_VERSION} command=sweep config={config}");
            println!("n,lambda,lb_edgecount,lb_thm11,ub_item1,ub_item2,ub_item3,ub_item4,best_construction,best_capacity,exact");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.lambda,
                    r.lb_edgecount,
                    r.lb_thm11,
                    csv_cell(r.ub_item1),
                    csv_cell(r.ub_item2),
                    csv_cell(r.ub_item3),
                    csv_cell(r.ub_item4),
                    csv_cell(r.best_construction.as_deref()),
                    csv_cell(r.best_capacity),
                    csv_cell(r.exact),
                );
            }
        }
    }
    Ok(true)
}
