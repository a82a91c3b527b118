//! `pairwl` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pairwl::generate::GeneratorSpec;
use pairwl::harness::{
    builtin_fixtures, fixture_manifest, magic_square_search, power_check, Corpus, Expected,
    Fixture, PowerOptions, SquarePool,
};
use pairwl::linkpred::{benchmark, BenchmarkConfig};
use pairwl::wl::{indistinguishable_with, refine_with, Masking, TestKind, DEFAULT_DENSE_GATE};
use pairwl::{load_edgelist, parse_labels, parse_pair, Error, Graph, Pair};

#[derive(Parser, Debug)]
#[command(name = "pairwl", version, about = "Link-level Weisfeiler-Lehman refinement tests")]
struct Cli {
    /// Seed for every random choice (splits, sampling, generators).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on refinement rounds (default: enough to stabilize).
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    output: Output,
    /// Print only the essential result.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for the harness and featurization.
    #[arg(long, global = true, env = "WL2_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refine one graph to a stable coloring.
    Refine(RefineArgs),
    /// Decide whether a test separates two links.
    Distinguish(DistinguishArgs),
    /// Compare all tests over a corpus of links.
    PowerCheck(PowerArgs),
    /// Write the fixture graphs and their expected verdicts.
    Fixtures(FixtureArgs),
    /// Link-prediction benchmark on one graph.
    Predict(PredictArgs),
}

fn kind_arg(s: &str) -> Result<TestKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = TestKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown test {s:?} (expected one of {})", names.join(", "))
    })
}

fn pair_arg(s: &str) -> Result<Pair, String> {
    let (p, q) = parse_pair(s).map_err(|e| e.to_string())?;
    if p == q {
        return Err(format!("{s:?} is a self-pair"));
    }
    Ok((p, q))
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long = "test", value_parser = kind_arg)]
    kind: TestKind,
    /// Target pair "p,q"; its edge is hidden unless --unmasked.
    #[arg(long, value_parser = pair_arg)]
    mask: Option<Pair>,
    /// Node labels, one per line.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    unmasked: bool,
}

#[derive(Args, Debug)]
struct DistinguishArgs {
    #[arg(long)]
    graph_a: PathBuf,
    #[arg(long, value_parser = pair_arg)]
    link_a: Pair,
    #[arg(long)]
    graph_b: PathBuf,
    #[arg(long, value_parser = pair_arg)]
    link_b: Pair,
    #[arg(long = "test", value_parser = kind_arg)]
    kind: TestKind,
    /// Let the tests see whether the target links exist.
    #[arg(long)]
    unmasked: bool,
}

#[derive(Args, Debug)]
struct PowerArgs {
    /// `fixtures`, `default` (fixtures plus 200 random graphs) or
    /// `er:count=..,nmin=..,nmax=..,seed=..`, joined with `+`.
    #[arg(long, default_value = "default")]
    corpus: String,
    /// Comma-separated tests (default: all six).
    #[arg(long, value_parser = kind_arg, value_delimiter = ',')]
    tests: Vec<TestKind>,
    /// Largest graph checked against the exhaustive isomorphism oracle
    /// (0 disables the check).
    #[arg(long, default_value_t = 7)]
    oracle_max_n: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    #[arg(long)]
    out: PathBuf,
    /// Re-run every fixture against the engine and fail on a mismatch.
    #[arg(long)]
    check: bool,
    /// Squares searched for the folklore/0-1 labeling witness:
    /// `partitions`, `latin`, or `explicit:S;S;...`.
    #[arg(long, default_value = "partitions")]
    pool: String,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    graph: Option<PathBuf>,
    /// Synthetic graph, e.g. `ring:n=200,k=4,beta=0.1` or `er:n=200,p=0.03`.
    #[arg(long)]
    generate: Option<String>,
    #[arg(long = "test", value_parser = kind_arg)]
    kind: TestKind,
    /// Histogram width of the color features.
    #[arg(long, default_value_t = 8)]
    width: usize,
    /// Add common neighbors, preferential attachment and resource
    /// allocation to the features.
    #[arg(long)]
    heuristics: bool,
    /// Largest `n²` the dense pair tests may allocate.
    #[arg(long, default_value_t = DEFAULT_DENSE_GATE)]
    dense_gate: usize,
    /// Report featurization wall time (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

/// A runtime failure, reported on one line with exit code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

struct Ctx {
    output: Output,
    quiet: bool,
    max_iters: Option<usize>,
    seed: u64,
}

impl Ctx {
    fn emit(&self, value: &Value, table: impl FnOnce() -> String) {
        match self.output {
            Output::Json => println!("{}", serde_json::to_string_pretty(value).expect("json values serialize")),
            Output::Table => print!("{}", table()),
        }
    }

    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path, labels: Option<&Path>) -> Result<Graph, Error> {
    let labels = labels.map(|l| read(l).and_then(|t| parse_labels(&t))).transpose()?;
    load_edgelist(&read(path)?, labels.as_deref())
}

fn masking(unmasked: bool) -> Masking {
    if unmasked {
        Masking::Unmasked
    } else {
        Masking::Masked
    }
}

fn refine(ctx: &Ctx, a: &RefineArgs) -> Result<(), Failure> {
    let g = load_graph(&a.graph, a.labels.as_deref())?;
    let r = refine_with(a.kind, &g, a.mask, masking(a.unmasked), ctx.max_iters)?;
    ctx.emit(&r.to_json(), || {
        let mut s = format!("test: {}\nnodes: {}\nedges: {}\n", a.kind, g.n(), g.edge_count());
        match r.stable_at {
            Some(t) => s += &format!("stable_at: {t}\n"),
            None => s += &format!("stable_at: not reached in {} rounds\n", r.history.len() - 1),
        }
        for (t, c) in r.class_counts().iter().enumerate() {
            s += &format!("round {t}: {c} classes\n");
        }
        if let Some(size) = r.target_class_size() {
            s += &format!("target class size: {size}\n");
        }
        s
    });
    Ok(())
}

fn distinguish(ctx: &Ctx, a: &DistinguishArgs) -> Result<(), Failure> {
    let ga = load_graph(&a.graph_a, None)?;
    let gb = load_graph(&a.graph_b, None)?;
    let v = indistinguishable_with(a.kind, a.link_a, &ga, a.link_b, &gb, masking(a.unmasked), ctx.max_iters)?;
    let line = match (v.distinguished_at, v.stable_at) {
        (Some(t), _) => format!("distinguished at iteration {t}"),
        (None, Some(t)) => format!("indistinguishable (stable at {t})"),
        (None, None) => "indistinguishable (round cap reached before stabilizing)".to_string(),
    };
    let value = json!({
        "test": a.kind,
        "link_a": [a.link_a.0, a.link_a.1],
        "link_b": [a.link_b.0, a.link_b.1],
        "masked": !a.unmasked,
        "distinguished": v.distinguished_at.is_some(),
        "distinguished_at": v.distinguished_at,
        "stable_at": v.stable_at,
    });
    ctx.emit(&value, || format!("{line}\n"));
    Ok(())
}

fn power(ctx: &Ctx, a: &PowerArgs) -> Result<(), Failure> {
    let corpus = Corpus::parse(&a.corpus)?;
    let kinds = if a.tests.is_empty() { TestKind::ALL.to_vec() } else { a.tests.clone() };
    ctx.note(&format!(
        "comparing {} tests over {} links in {} graphs",
        kinds.len(),
        corpus.instances.len(),
        corpus.graphs.len()
    ));
    let opts = PowerOptions {
        max_iters: ctx.max_iters,
        masking: Masking::Masked,
        oracle_max_n: (a.oracle_max_n > 0).then_some(a.oracle_max_n),
        parallel: true,
    };
    let report = power_check(&corpus, &kinds, &opts)?;
    let value = report.to_json();
    if let Some(out) = &a.out {
        write(out, &(serde_json::to_string_pretty(&value).expect("json values serialize") + "\n"))?;
    }
    ctx.emit(&value, || {
        let mut s = format!(
            "corpus: {} ({} links, {} comparisons)\n",
            report.corpus.spec,
            report.corpus.instances.len(),
            report.comparisons()
        );
        s += "implications (A->B: every pair A separates, B separates):\n";
        for ((x, y), imp) in &report.implications {
            let mark = if imp.holds { "holds" } else { "fails" };
            s += &format!("  {:<24} {mark}  violations {}\n", format!("{x}->{y}"), imp.violations);
        }
        s += "witnesses:\n";
        for w in &report.witnesses {
            let ia = report.corpus.describe(w.instance_a);
            let ib = report.corpus.describe(w.instance_b);
            s += &format!(
                "  {:<24} {}{} vs {}{} at iteration {}\n",
                w.relation, ia["graph"].as_str().unwrap_or("?"), ia["target"], ib["graph"].as_str().unwrap_or("?"),
                ib["target"], w.iteration
            );
        }
        if let Some(o) = report.oracle_soundness {
            s += &format!("oracle soundness: {} isomorphic pairs, {} violations\n", o.checked, o.violations);
        }
        s
    });
    Ok(())
}

fn fixtures(ctx: &Ctx, a: &FixtureArgs) -> Result<(), Failure> {
    let pool = SquarePool::parse(&a.pool)?;
    fs::create_dir_all(&a.out).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    let list = builtin_fixtures();
    let mut written = Vec::new();
    for f in &list {
        for (name, g) in [(&f.graph_a_name, &f.graph_a), (&f.graph_b_name, &f.graph_b)] {
            let file = Fixture::graph_file(name);
            if !written.contains(&file) {
                write(&a.out.join(&file), &g.to_edgelist())?;
                written.push(file);
            }
        }
    }
    let magic = magic_square_search(&pool)?;
    if let Some((ga, gb)) = magic.graphs() {
        for (name, g) in [("F5a", ga), ("F5b", gb)] {
            let file = Fixture::graph_file(name);
            write(&a.out.join(&file), &g.to_edgelist())?;
            written.push(file);
        }
    }
    let manifest = fixture_manifest(&list, &magic);
    write(
        &a.out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("json values serialize") + "\n"),
    )?;
    let mut mismatches = Vec::new();
    if a.check {
        for f in &list {
            for &(kind, expected) in &f.expected {
                let ga = load_graph(&a.out.join(Fixture::graph_file(&f.graph_a_name)), None)?;
                let gb = load_graph(&a.out.join(Fixture::graph_file(&f.graph_b_name)), None)?;
                let v = indistinguishable_with(kind, f.link_a, &ga, f.link_b, &gb, Masking::Masked, ctx.max_iters)?;
                let got = if v.distinguished_at.is_some() { Expected::Distinguished } else { Expected::Indistinguishable };
                if got != expected {
                    mismatches.push(format!("{} {kind}", f.name));
                }
            }
        }
    }
    let value = json!({
        "out": a.out.display().to_string(),
        "files": written,
        "fixtures": list.len(),
        "magic_square": manifest["magic_square"]["status"],
        "checked": a.check,
        "mismatches": mismatches,
    });
    ctx.emit(&value, || {
        let mut s = format!("wrote {} graphs and manifest.json to {}\n", written.len(), a.out.display());
        s += &format!(
            "magic square search: {} ({} squares, {} regular)\n",
            manifest["magic_square"]["status"].as_str().unwrap_or("?"),
            magic.examined,
            magic.regular
        );
        if a.check {
            s += &format!("check: {} mismatches\n", mismatches.len());
        }
        s
    });
    if !mismatches.is_empty() {
        return Err(Failure(format!("fixture verdicts differ from manifest: {}", mismatches.join(", "))));
    }
    Ok(())
}

fn predict(ctx: &Ctx, a: &PredictArgs) -> Result<(), Failure> {
    let (dataset, g) = match (&a.graph, &a.generate) {
        (Some(path), _) => (path.display().to_string(), load_graph(path, None)?),
        (None, Some(spec)) => {
            let spec = GeneratorSpec::parse(spec)?;
            (spec.to_string(), spec.generate(ctx.seed))
        }
        (None, None) => unreachable!("clap requires one of --graph/--generate"),
    };
    let mut config = BenchmarkConfig::new(a.kind, ctx.seed);
    config.features.width = a.width;
    config.features.heuristics = a.heuristics;
    config.features.dense_gate = a.dense_gate;
    if let Some(m) = ctx.max_iters {
        config.features.max_iters = m;
    }
    let report = benchmark(&dataset, &g, &config)?;
    if report.isolated_nodes > 0 {
        ctx.note(&format!("{} nodes are isolated in the training graph", report.isolated_nodes));
    }
    ctx.emit(&report.to_json(a.timing), || {
        let mut s = format!(
            "dataset: {}\ntest: {}\nn: {}  m: {}\nval_auc: {:.4}\ntest_auc: {:.4}\n",
            report.dataset, report.kind, report.n, report.m, report.val_auc, report.test_auc
        );
        if a.timing {
            s += &format!("featurize_seconds: {:.3}\n", report.featurize_seconds);
        }
        s
    });
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Ctx { output: cli.output, quiet: cli.quiet, max_iters: cli.max_iters, seed: cli.seed };
    let result = match &cli.command {
        Command::Refine(a) => refine(&ctx, a),
        Command::Distinguish(a) => distinguish(&ctx, a),
        Command::PowerCheck(a) => power(&ctx, a),
        Command::Fixtures(a) => fixtures(&ctx, a),
        Command::Predict(a) => predict(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(reason)) => {
            eprintln!("error: {reason}");
            ExitCode::from(2)
        }
    }
}
