//! `dualtree`: build query indexes, run range-minimum and minimum-length
//! interval queries, verify the tree identities, and benchmark the engines.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 query error.

mod blob;
mod input;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use dualtree::codec::{bp_encode, dfuds_encode, format_tree_text, parse_tree_text};
use dualtree::duality::{dual, dual_of_reverse, hat};
use dualtree::gen;
use dualtree::minheap::build_minheap;
use dualtree::mliq::{
    build_intervals, mliq_bruteforce, mliq_naive, mliq_weighted, Containment, IntervalSet,
};
use dualtree::rmq::{OpCounters, RmqEngineKind};
use dualtree::verify::{self, Claim, Suite, VerifyConfig};
use dualtree::Error;

use blob::Index;
use input::Format;

#[derive(Debug)]
pub enum CliError {
    VerifyFailed,
    Input(String),
    Query(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Input(_) => 2,
            CliError::Query(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerifyFailed => f.write_str("verification failed"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Query(m) => write!(f, "query error: {m}"),
        }
    }
}

fn query_error(e: Error) -> CliError {
    CliError::Query(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Human,
    Tsv,
    JsonLines,
}

#[derive(Parser)]
#[command(
    name = "dualtree",
    version,
    about = "Ordinal-tree duality toolkit: RMQ and MLIQ indexes, identity checks, benchmarks"
)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = OutputMode::Human, global = true)]
    output: OutputMode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from an array or interval file.
    Build(BuildArgs),
    /// Answer one query against an index file.
    Query(QueryArgs),
    /// Run the randomized verification suites or a differential claim.
    Verify(VerifyArgs),
    /// Time the query engines on a seeded workload (TSV).
    Bench(BenchArgs),
    /// Apply a tree transformation to a tree file (BP line plus optional labels).
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    Array,
    Intervals,
}

#[derive(Args)]
struct BuildArgs {
    /// Array file (integers) or interval file ("a b" per line).
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputKind::Array)]
    kind: InputKind,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Where to write the index.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Index file written by `build`.
    index: PathBuf,
    /// Also print primitive-operation counts.
    #[arg(long, global = true)]
    stats: bool,
    #[command(subcommand)]
    query: QueryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Fh,
    Fn,
    Pda,
    Naive,
}

impl From<EngineArg> for RmqEngineKind {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Fh => RmqEngineKind::FhDfuds,
            EngineArg::Fn => RmqEngineKind::FnBp,
            EngineArg::Pda => RmqEngineKind::PdaEngine,
            EngineArg::Naive => RmqEngineKind::Naive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Naive,
    Weighted,
    Brute,
}

impl SolverArg {
    const ALL: [SolverArg; 3] = [SolverArg::Naive, SolverArg::Weighted, SolverArg::Brute];

    fn name(self) -> &'static str {
        match self {
            SolverArg::Naive => "naive",
            SolverArg::Weighted => "weighted",
            SolverArg::Brute => "brute",
        }
    }

    fn solve(
        self,
        s: &IntervalSet,
        a: u64,
        b: u64,
        conv: Containment,
        ops: &mut OpCounters,
    ) -> dualtree::Result<Option<usize>> {
        match self {
            SolverArg::Naive => mliq_naive(s, a, b, conv, ops),
            SolverArg::Weighted => mliq_weighted(s, a, b, conv, ops),
            SolverArg::Brute => mliq_bruteforce(s, a, b, conv),
        }
    }
}

#[derive(Subcommand)]
enum QueryKind {
    /// Leftmost minimum position of A[i..=j].
    Rmq {
        #[arg(value_enum)]
        engine: EngineArg,
        i: usize,
        j: usize,
    },
    /// Shortest interval containing [a, b].
    Mliq {
        #[arg(value_enum)]
        solver: SolverArg,
        a: u64,
        b: u64,
        /// Require a_i < a and b < b_i instead of a_i <= a and b <= b_i.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Identities,
    Rmq,
    Pda,
    Mliq,
    Join,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Seed for every generator.
    #[arg(long, env = "DUALTREE_SEED", default_value_t = 0)]
    seed: u64,
    /// Random structures per suite (trees, arrays, interval families, join cases).
    #[arg(long)]
    trees: Option<usize>,
    /// Queries per structure.
    #[arg(long)]
    queries: Option<usize>,
    /// Largest random structure.
    #[arg(long)]
    max_size: Option<usize>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Run a differential claim instead of the suites: prop1h or dfuds-mirror.
    #[arg(long)]
    claim: Option<String>,
    /// Largest tree enumerated by --claim.
    #[arg(long, default_value_t = 4)]
    max_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchKind {
    Rmq,
    Mliq,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    kind: BenchKind,
    /// Index file; without it a random input of --size elements is generated.
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    size: usize,
    #[arg(long, default_value_t = 100_000)]
    queries: usize,
    #[arg(long, env = "DUALTREE_SEED", default_value_t = 0)]
    seed: u64,
    /// One engine (fh, fn, pda, naive; or naive, weighted, brute), or all.
    #[arg(long, default_value = "all")]
    engine: String,
    #[arg(long)]
    strict: bool,
    /// Leave out the timing column, making the output reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformOp {
    Dual,
    Reverse,
    Hat,
    DualOfReverse,
    Bp,
    Dfuds,
}

#[derive(Args)]
struct TransformArgs {
    tree: PathBuf,
    #[arg(value_enum)]
    op: TransformOp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Build(args) => cmd_build(&args, cli.output, &mut out),
        Command::Query(args) => cmd_query(&args, cli.output, &mut out),
        Command::Verify(args) => cmd_verify(&args, cli.output, &mut out),
        Command::Bench(args) => cmd_bench(&args, cli.output, &mut out),
        Command::Transform(args) => cmd_transform(&args, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::VerifyFailed) {
                eprintln!("dualtree: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(out: &mut impl Write, line: impl fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Input(format!("writing output: {e}")))
}

fn cmd_build(args: &BuildArgs, mode: OutputMode, out: &mut impl Write) -> Result<(), CliError> {
    let index = match args.kind {
        InputKind::Array => {
            let values = input::read_array(&args.input, args.format)?;
            Index::Array(build_minheap(&values).map_err(|e| CliError::Input(e.to_string()))?)
        }
        InputKind::Intervals => Index::Intervals(input::read_intervals(&args.input, args.format)?),
    };
    let bytes = blob::encode(&index);
    fs::write(&args.out, &bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    let dfuds = index.dfuds();
    let mut fields: Vec<(&str, String)> = vec![
        ("kind", index.kind_name().to_string()),
        ("n", index.len().to_string()),
        ("dfuds_bits", dfuds.len().to_string()),
        ("structure_bits", dfuds.size_in_bits().to_string()),
        ("blob_bytes", bytes.len().to_string()),
    ];
    if let Index::Intervals(s) = &index {
        let space = s.space();
        fields.push(("endpoint_bitmap_bits", space.endpoint_bitmaps.to_string()));
        fields.push(("weighted_paren_bits", space.weighted_parens.to_string()));
    }
    match mode {
        OutputMode::Human => {
            for (k, v) in &fields {
                emit(out, format!("{k}: {v}"))?;
            }
        }
        OutputMode::Tsv => {
            for (k, v) in &fields {
                emit(out, format!("{k}\t{v}"))?;
            }
        }
        OutputMode::JsonLines => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            emit(out, serde_json::Value::Object(map))?;
        }
    }
    Ok(())
}

fn load_index(path: &PathBuf) -> Result<Index, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    blob::decode(&bytes)
}

fn ops_fields(ops: &OpCounters) -> [(&'static str, u64); 7] {
    [
        ("rank", ops.rank),
        ("select", ops.select),
        ("rmq", ops.rmq_excess),
        ("open", ops.open),
        ("close", ops.close),
        ("bpselect", ops.bpselect),
        ("pda", ops.pda),
    ]
}

fn cmd_query(args: &QueryArgs, mode: OutputMode, out: &mut impl Write) -> Result<(), CliError> {
    let index = load_index(&args.index)?;
    let mut ops = OpCounters::default();
    let answer = match (&args.query, &index) {
        (QueryKind::Rmq { engine, i, j }, Index::Array(h)) => {
            if i > j {
                return Err(CliError::Query(format!(
                    "usage: rmq needs i <= j, got {i} > {j}"
                )));
            }
            let kind: RmqEngineKind = (*engine).into();
            Some(kind.query(h, *i, *j, &mut ops).map_err(query_error)?)
        }
        (
            QueryKind::Mliq {
                solver,
                a,
                b,
                strict,
            },
            Index::Intervals(s),
        ) => {
            if a > b {
                return Err(CliError::Query(format!(
                    "usage: mliq needs a <= b, got {a} > {b}"
                )));
            }
            let conv = if *strict {
                Containment::Strict
            } else {
                Containment::Closed
            };
            solver
                .solve(s, *a, *b, conv, &mut ops)
                .map_err(query_error)?
        }
        (QueryKind::Rmq { .. }, _) => {
            return Err(CliError::Query("rmq needs an array index".into()))
        }
        (QueryKind::Mliq { .. }, _) => {
            return Err(CliError::Query("mliq needs an interval index".into()))
        }
    };
    let shown = answer.map_or("None".to_string(), |x| x.to_string());
    match mode {
        OutputMode::Human => {
            emit(out, &shown)?;
            if args.stats {
                for (k, v) in ops_fields(&ops) {
                    emit(out, format!("{k} {v}"))?;
                }
            }
        }
        OutputMode::Tsv => {
            emit(out, format!("answer\t{shown}"))?;
            if args.stats {
                for (k, v) in ops_fields(&ops) {
                    emit(out, format!("{k}\t{v}"))?;
                }
            }
        }
        OutputMode::JsonLines => {
            let mut obj = json!({ "answer": answer });
            if args.stats {
                obj["ops"] = json!(ops_fields(&ops)
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect::<serde_json::Map<_, _>>());
            }
            emit(out, obj)?;
        }
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, mode: OutputMode, out: &mut impl Write) -> Result<(), CliError> {
    if let Some(name) = &args.claim {
        let claim = Claim::parse(name).ok_or_else(|| {
            CliError::Input(format!(
                "unknown claim {name:?}; expected prop1h or dfuds-mirror"
            ))
        })?;
        let report = verify::check_claim(claim, args.max_nodes, 5)
            .map_err(|e| CliError::Input(e.to_string()))?;
        return print_claim(&report, mode, out);
    }
    let mut cfg = VerifyConfig::new(args.seed);
    if let Some(t) = args.trees {
        cfg = cfg.with_structures(t);
    }
    if let Some(q) = args.queries {
        cfg = cfg.with_queries(q);
    }
    if let Some(m) = args.max_size {
        cfg = cfg.with_max_size(m);
    }
    if let Some(t) = args.threads {
        cfg.threads = t.max(1);
    }
    let report = match args.suite {
        SuiteArg::All => verify::run_all(&cfg),
        SuiteArg::Identities => verify::run(Suite::Identities, &cfg),
        SuiteArg::Rmq => verify::run(Suite::Rmq, &cfg),
        SuiteArg::Pda => verify::run(Suite::Pda, &cfg),
        SuiteArg::Mliq => verify::run(Suite::Mliq, &cfg),
        SuiteArg::Join => verify::run(Suite::Join, &cfg),
    };
    let failing = report.checks.iter().filter(|c| c.failed > 0).count();
    match mode {
        OutputMode::Human => {
            emit(out, format!("seed {}", cfg.seed))?;
            for c in &report.checks {
                let verdict = if c.failed == 0 { "ok" } else { "FAIL" };
                emit(
                    out,
                    format!(
                        "{:<10} {:<42} {:>9}/{:<9} {verdict}",
                        c.suite,
                        c.name,
                        c.passed,
                        c.passed + c.failed
                    ),
                )?;
                if let Some(ex) = &c.example {
                    emit(out, format!("    first failure: {ex}"))?;
                }
            }
            let verdict = if failing == 0 { "PASS" } else { "FAIL" };
            emit(
                out,
                format!(
                    "{verdict}: {} checks, {failing} failing",
                    report.checks.len()
                ),
            )?;
        }
        OutputMode::Tsv => {
            emit(out, "suite\tcheck\tpassed\tfailed\texample")?;
            for c in &report.checks {
                emit(
                    out,
                    format!(
                        "{}\t{}\t{}\t{}\t{}",
                        c.suite,
                        c.name,
                        c.passed,
                        c.failed,
                        c.example.as_deref().unwrap_or("")
                    ),
                )?;
            }
        }
        OutputMode::JsonLines => {
            emit(out, json!({ "config": report.config }))?;
            for c in &report.checks {
                emit(out, serde_json::to_string(c).expect("serializable"))?;
            }
            emit(
                out,
                json!({ "checks": report.checks.len(), "failing": failing }),
            )?;
        }
    }
    if failing == 0 {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn print_claim(
    report: &verify::ClaimReport,
    mode: OutputMode,
    out: &mut impl Write,
) -> Result<(), CliError> {
    match mode {
        OutputMode::Human => {
            emit(
                out,
                format!(
                    "claim {}: {} trees with at most {} nodes, holds on {}, {} counterexample(s) shown",
                    report.claim,
                    report.trees_checked,
                    report.max_nodes,
                    report.holds_on,
                    report.counterexamples.len()
                ),
            )?;
            for (k, c) in report.counterexamples.iter().enumerate() {
                emit(out, format!("counterexample {}: {}", k + 1, c.tree))?;
                emit(out, format!("    left:  {}", c.left))?;
                emit(out, format!("    right: {}", c.right))?;
            }
        }
        OutputMode::Tsv => {
            emit(out, "claim\ttree\tleft\tright")?;
            for c in &report.counterexamples {
                emit(
                    out,
                    format!("{}\t{}\t{}\t{}", report.claim, c.tree, c.left, c.right),
                )?;
            }
        }
        OutputMode::JsonLines => {
            emit(out, serde_json::to_string(report).expect("serializable"))?;
        }
    }
    Ok(())
}

struct BenchRow {
    engine: &'static str,
    queries: usize,
    checksum: u64,
    ops: OpCounters,
    seconds: f64,
}

fn checksum_step(acc: u64, k: usize, answer: Option<usize>) -> u64 {
    let v = answer.map_or(0, |x| x as u64 + 1);
    acc.wrapping_mul(1_000_003).wrapping_add(v ^ k as u64)
}

fn cmd_bench(args: &BenchArgs, mode: OutputMode, out: &mut impl Write) -> Result<(), CliError> {
    let loaded = args.index.as_ref().map(load_index).transpose()?;
    let mut rng = gen::rng(args.seed);
    let rows = match args.kind {
        BenchKind::Rmq => {
            let h = match loaded {
                Some(Index::Array(h)) => h,
                Some(_) => return Err(CliError::Input("rmq bench needs an array index".into())),
                None => {
                    let values = gen::random_array(&mut rng, args.size.max(1), false);
                    build_minheap(&values).map_err(|e| CliError::Input(e.to_string()))?
                }
            };
            let engines: Vec<RmqEngineKind> = if args.engine == "all" {
                RmqEngineKind::ALL.to_vec()
            } else {
                vec![args
                    .engine
                    .parse()
                    .map_err(|e: Error| CliError::Input(e.to_string()))?]
            };
            let n = h.len();
            let workload: Vec<(usize, usize)> = (0..args.queries)
                .map(|_| {
                    let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
                    (i.min(j), i.max(j))
                })
                .collect();
            let mut rows = Vec::new();
            for kind in engines {
                let mut ops = OpCounters::default();
                let mut checksum = 0;
                let start = Instant::now();
                for (k, &(i, j)) in workload.iter().enumerate() {
                    let ans = kind.query(&h, i, j, &mut ops).map_err(query_error)?;
                    checksum = checksum_step(checksum, k, Some(ans));
                }
                rows.push(BenchRow {
                    engine: kind.name(),
                    queries: workload.len(),
                    checksum,
                    ops,
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
            rows
        }
        BenchKind::Mliq => {
            let s = match loaded {
                Some(Index::Intervals(s)) => s,
                Some(_) => {
                    return Err(CliError::Input("mliq bench needs an interval index".into()))
                }
                None => {
                    let pairs = gen::random_intervals(&mut rng, args.size.max(1));
                    build_intervals(&pairs).map_err(|e| CliError::Input(e.to_string()))?
                }
            };
            let solvers: Vec<SolverArg> = if args.engine == "all" {
                SolverArg::ALL.to_vec()
            } else {
                vec![SolverArg::from_str(&args.engine, true)
                    .map_err(|_| CliError::Input(format!("unknown solver {:?}", args.engine)))?]
            };
            let conv = if args.strict {
                Containment::Strict
            } else {
                Containment::Closed
            };
            let top = s.b_sentinel() + 1;
            let workload: Vec<(u64, u64)> = (0..args.queries)
                .map(|_| {
                    let a = rng.gen_range(0..=top);
                    (a, (a + rng.gen_range(0..40)).min(top))
                })
                .collect();
            let mut rows = Vec::new();
            for solver in solvers {
                let mut ops = OpCounters::default();
                let mut checksum = 0;
                let start = Instant::now();
                for (k, &(a, b)) in workload.iter().enumerate() {
                    let ans = solver
                        .solve(&s, a, b, conv, &mut ops)
                        .map_err(query_error)?;
                    checksum = checksum_step(checksum, k, ans);
                }
                rows.push(BenchRow {
                    engine: solver.name(),
                    queries: workload.len(),
                    checksum,
                    ops,
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
            rows
        }
    };
    print_bench(&rows, args.no_timing, mode, out)
}

fn print_bench(
    rows: &[BenchRow],
    no_timing: bool,
    mode: OutputMode,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let mean = |x: u64, q: usize| if q == 0 { 0.0 } else { x as f64 / q as f64 };
    let qps = |r: &BenchRow| {
        if no_timing || r.queries == 0 {
            None
        } else {
            Some(r.queries as f64 / r.seconds.max(1e-9))
        }
    };
    if mode == OutputMode::JsonLines {
        for r in rows {
            let means: serde_json::Map<String, serde_json::Value> = ops_fields(&r.ops)
                .iter()
                .map(|(k, v)| (format!("mean_{k}"), json!(mean(*v, r.queries))))
                .collect();
            emit(
                out,
                json!({
                    "engine": r.engine,
                    "queries": r.queries,
                    "answers_checksum": format!("{:016x}", r.checksum),
                    "mean_ops": means,
                    "queries_per_sec": qps(r),
                }),
            )?;
        }
        return Ok(());
    }
    let mut header = vec!["engine", "queries", "answers_checksum"];
    let op_names: Vec<String> = ops_fields(&OpCounters::default())
        .iter()
        .map(|(k, _)| format!("mean_{k}"))
        .collect();
    header.extend(op_names.iter().map(String::as_str));
    header.push("queries_per_sec");
    emit(out, header.join("\t"))?;
    for r in rows {
        let mut cells = vec![
            r.engine.to_string(),
            r.queries.to_string(),
            format!("{:016x}", r.checksum),
        ];
        cells.extend(
            ops_fields(&r.ops)
                .iter()
                .map(|(_, v)| format!("{:.3}", mean(*v, r.queries))),
        );
        cells.push(qps(r).map_or("-".to_string(), |x| format!("{x:.0}")));
        emit(out, cells.join("\t"))?;
    }
    Ok(())
}

fn cmd_transform(args: &TransformArgs, out: &mut impl Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.tree)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.tree.display())))?;
    let t = parse_tree_text(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let rendered = match args.op {
        TransformOp::Dual => format_tree_text(&dual(&t)),
        TransformOp::Reverse => format_tree_text(&t.reversed()),
        TransformOp::Hat => format_tree_text(&hat(&t)),
        TransformOp::DualOfReverse => format_tree_text(&dual_of_reverse(&t)),
        TransformOp::Bp => format!("{}\n", bp_encode(&t).0),
        TransformOp::Dfuds => format!("{}\n", dfuds_encode(&t).0),
    };
    write!(out, "{rendered}").map_err(|e| CliError::Input(format!("writing output: {e}")))
}
