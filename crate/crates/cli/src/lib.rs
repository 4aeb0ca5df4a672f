//! Command-line driver for `groupmagic`.
//!
//! [`run`] parses arguments, dispatches to the library and returns the exit
//! code; all output goes through the supplied writers so tests can capture
//! it. Exit codes are the machine contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, magic, found |
//! | 1 | none, not magic, proven nonexistent |
//! | 2 | usage or precondition error |
//! | 3 | internal verification mismatch |
//! | 4 | search budget exhausted, nothing claimed |

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use groupmagic::abelian::{enumerate_groups, AbelianGroup};
use groupmagic::constructions::{
    label_c4_any_group, label_composition, label_kpq_c4, ConstructionOutcome, Method,
};
use groupmagic::graphs::{complete_bipartite, cycle, lexicographic_product, Graph};
use groupmagic::labelings::{verify_classic, verify_group, Labeling, LabelingFile, Verdict};
use groupmagic::oracle::{
    scan_kmn_c4, search_classic_dm, search_group_dm, windmill_certificate, Budget, SearchOptions,
    SearchOutcome, SearchReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Seed used by `random` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] groupmagic::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: io::Error },
    #[error("output failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(groupmagic::Error::Internal(_)) => EXIT_INTERNAL,
            CliError::Output(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "groupmagic",
    version,
    about = "Group distance magic labelings of graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every abelian group of the given order, one per line.
    Groups {
        #[arg(long)]
        order: u64,
    },
    /// Write the lexicographic product of two graphs as an edge list.
    Product {
        #[arg(long)]
        outer: PathBuf,
        /// `c4` or an edge-list file.
        #[arg(long)]
        inner: String,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a verified labeling of a product graph.
    Construct(ConstructArgs),
    /// Check whether a labeling is distance magic.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
        /// Expect labels 1..=n instead of group elements.
        #[arg(long)]
        classic: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive search for a labeling of a small graph.
    Search(SearchArgs),
    /// Print the infeasibility certificate for the windmill `D_4^t[C4]`.
    Windmill {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide `K_{m,n}[C4]` for all `1 <= m < n <= max`.
    ScanKmn {
        #[arg(long)]
        max: usize,
        /// Time limit per pair, e.g. `10s`.
        #[arg(long, value_parser = parse_duration)]
        budget: Option<Duration>,
    },
    /// Write a seeded `G(n, p)` random graph as an edge list.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_probability)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Klein,
    Cyclic,
    Kpq,
    Compose,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Base graph `G`; the labeling is for `G[C4]` (or `G[H]` with compose).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Target group, e.g. `Z4xZ2xZ5`. Optional with compose, where it is
    /// checked against the result.
    #[arg(long)]
    group: Option<AbelianGroup>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// kpq: size of the even part.
    #[arg(long)]
    p: Option<usize>,
    /// kpq: size of the odd part.
    #[arg(long)]
    q: Option<usize>,
    /// compose: inner graph `H`.
    #[arg(long)]
    inner: Option<PathBuf>,
    /// compose: distance magic labeling of `H`.
    #[arg(long)]
    base: Option<PathBuf>,
    /// compose: prime `p` with `|V(G)| = p^alpha`.
    #[arg(long)]
    prime: Option<u64>,
    /// Labeling file; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the product graph as an edge list.
    #[arg(long)]
    product_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["group", "classic"])))]
pub struct SearchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    group: Option<AbelianGroup>,
    #[arg(long)]
    classic: bool,
    /// Wall-clock limit, e.g. `30s` or `2m`.
    #[arg(long, value_parser = parse_duration)]
    budget: Option<Duration>,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Return the lexicographically least labeling.
    #[arg(long)]
    deterministic: bool,
    /// Write a found labeling here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_duration(s: &str) -> Result<Duration, String> {
    humantime::parse_duration(s).map_err(|e| e.to_string())
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not in [0, 1]"))
    }
}

/// Structured verdict printed with `--json`.
#[derive(Debug, Default, Serialize)]
pub struct VerdictRecord {
    pub status: String,
    pub mu: Option<serde_json::Value>,
    pub witness: Option<Vec<usize>>,
    pub theorem: Option<String>,
    pub nodes: Option<u64>,
    /// Seconds.
    pub elapsed: f64,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Groups { order } => {
            for g in enumerate_groups(order)? {
                writeln!(out, "{g}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Product {
            outer,
            inner,
            out: dest,
        } => {
            let outer = read_graph(&outer)?;
            let inner = if inner.eq_ignore_ascii_case("c4") {
                cycle(4)?
            } else {
                read_graph(Path::new(&inner))?
            };
            emit(
                out,
                dest.as_deref(),
                &lexicographic_product(&outer, &inner).to_edge_list(),
            )?;
            Ok(EXIT_OK)
        }
        Command::Construct(args) => construct(args, out),
        Command::Verify {
            graph,
            labeling,
            classic,
            json,
        } => verify(&graph, &labeling, classic, json, out),
        Command::Search(args) => search(args, out),
        Command::Windmill { t, json } => {
            let cert = windmill_certificate(t)?;
            if json {
                writeln!(out, "{}", cert.to_json())?;
            } else {
                write!(out, "{cert}")?;
            }
            Ok(EXIT_NONE)
        }
        Command::ScanKmn { max, budget } => {
            let budget = Budget {
                max_nodes: None,
                max_time: budget,
            };
            for entry in scan_kmn_c4(max, budget)? {
                writeln!(out, "{}", entry.line())?;
            }
            Ok(EXIT_OK)
        }
        Command::Random { n, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            write!(out, "{}", Graph::new(n, edges)?.to_edge_list())?;
            Ok(EXIT_OK)
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    Ok(Graph::parse_edge_list(&read_text(path)?)?)
}

fn read_labeling(path: &Path) -> CliResult<Labeling> {
    Ok(LabelingFile::from_json(&read_text(path)?)?.decode()?)
}

/// Writes `text` to `dest`, or to `out` when there is no destination.
fn emit(out: &mut dyn Write, dest: Option<&Path>, text: &str) -> CliResult<()> {
    match dest {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn require<T>(value: Option<T>, flag: &str, method: MethodArg) -> CliResult<T> {
    value.ok_or_else(|| {
        let method = method.to_possible_value().expect("no skipped variants");
        CliError::Usage(format!("--method {} needs --{flag}", method.get_name()))
    })
}

fn construct(args: ConstructArgs, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let m = args.method;
    let outcome: ConstructionOutcome = match m {
        MethodArg::Auto | MethodArg::Klein | MethodArg::Cyclic => {
            let g = read_graph(&require(args.graph, "graph", m)?)?;
            let group = require(args.group, "group", m)?;
            let method = match m {
                MethodArg::Klein => Method::Klein,
                MethodArg::Cyclic => Method::Cyclic,
                _ => Method::Auto,
            };
            label_c4_any_group(&g, &group, method)?
        }
        MethodArg::Kpq => {
            let (p, q) = (require(args.p, "p", m)?, require(args.q, "q", m)?);
            let group = require(args.group, "group", m)?;
            if let Some(path) = &args.graph {
                if read_graph(path)? != complete_bipartite(p, q)? {
                    return Err(CliError::Usage(format!(
                        "{} is not K_{{{p},{q}}} with the even part first",
                        path.display()
                    )));
                }
            }
            label_kpq_c4(p, q, &group)?
        }
        MethodArg::Compose => {
            let g = read_graph(&require(args.graph, "graph", m)?)?;
            let h = read_graph(&require(args.inner, "inner", m)?)?;
            let base = match read_labeling(&require(args.base, "base", m)?)? {
                Labeling::Group(l) => l,
                Labeling::Classic(_) => {
                    return Err(CliError::Usage(
                        "--base must be a group labeling (with groupSpec)".into(),
                    ))
                }
            };
            let prime = require(args.prime, "prime", m)?;
            let outcome = label_composition(&g, &h, &base, prime)?;
            if let Some(group) = &args.group {
                if group != outcome.labeling.group() {
                    return Err(CliError::Usage(format!(
                        "composition yields group {}, not {group}",
                        outcome.labeling.group()
                    )));
                }
            }
            outcome
        }
    };
    emit(
        out,
        args.out.as_deref(),
        &(outcome.labeling.to_file().to_json() + "\n"),
    )?;
    if let Some(path) = &args.product_out {
        emit(out, Some(path), &outcome.graph.to_edge_list())?;
    }
    if args.json {
        let record = VerdictRecord {
            status: "magic".into(),
            mu: Some(serde_json::to_value(&outcome.predicted_mu).expect("elements serialize")),
            theorem: Some(outcome.theorem.tag().into()),
            elapsed: start.elapsed().as_secs_f64(),
            ..Default::default()
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("records serialize")
        )?;
    } else {
        writeln!(
            out,
            "MAGIC mu={} theorem={}",
            outcome.predicted_mu, outcome.theorem
        )?;
    }
    Ok(EXIT_OK)
}

fn verdict_record<W: Serialize>(verdict: &Verdict<W>, elapsed: Duration) -> VerdictRecord {
    VerdictRecord {
        status: verdict.status().into(),
        mu: verdict
            .magic_constant()
            .map(|mu| serde_json::to_value(mu).expect("constants serialize")),
        witness: verdict.witness(),
        elapsed: elapsed.as_secs_f64(),
        ..Default::default()
    }
}

fn print_verdict<W: Serialize + std::fmt::Display>(
    out: &mut dyn Write,
    verdict: &Verdict<W>,
    json: bool,
    elapsed: Duration,
) -> CliResult<i32> {
    if json {
        let record = verdict_record(verdict, elapsed);
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("records serialize")
        )?;
    } else {
        writeln!(out, "{verdict}")?;
    }
    Ok(if verdict.is_magic() {
        EXIT_OK
    } else {
        EXIT_NONE
    })
}

fn verify(
    graph: &Path,
    labeling: &Path,
    classic: bool,
    json: bool,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let start = Instant::now();
    let g = read_graph(graph)?;
    match (read_labeling(labeling)?, classic) {
        (Labeling::Classic(l), true) => {
            print_verdict(out, &verify_classic(&g, &l)?, json, start.elapsed())
        }
        (Labeling::Group(l), false) => {
            print_verdict(out, &verify_group(&g, &l)?, json, start.elapsed())
        }
        (Labeling::Group(_), true) => Err(CliError::Usage(
            "labeling has a groupSpec; drop --classic".into(),
        )),
        (Labeling::Classic(_), false) => Err(CliError::Usage(
            "labeling has no groupSpec; pass --classic".into(),
        )),
    }
}

fn search(args: SearchArgs, out: &mut dyn Write) -> CliResult<i32> {
    let g = read_graph(&args.graph)?;
    let options = SearchOptions {
        budget: Budget {
            max_nodes: args.max_nodes,
            max_time: args.budget,
        },
        parallel: true,
        deterministic: args.deterministic,
    };
    match &args.group {
        Some(group) => {
            let report = search_group_dm(&g, group, options)?;
            let file = report.labeling().map(|l| l.to_file());
            finish_search(out, &args, &report, file)
        }
        None => {
            let report = search_classic_dm(&g, options)?;
            let file = report.labeling().map(|l| l.to_file());
            finish_search(out, &args, &report, file)
        }
    }
}

fn finish_search<L, W: Serialize + std::fmt::Display>(
    out: &mut dyn Write,
    args: &SearchArgs,
    report: &SearchReport<L, W>,
    file: Option<LabelingFile>,
) -> CliResult<i32> {
    if let (Some(path), Some(file)) = (&args.out, file) {
        emit(out, Some(path), &(file.to_json() + "\n"))?;
    }
    if args.json {
        let record = VerdictRecord {
            status: report.status().to_ascii_lowercase(),
            mu: report
                .mu()
                .map(|mu| serde_json::to_value(mu).expect("constants serialize")),
            nodes: Some(report.nodes_explored),
            elapsed: report.elapsed.as_secs_f64(),
            ..Default::default()
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("records serialize")
        )?;
    } else {
        writeln!(out, "{report}")?;
        if let Some(detail) = &report.detail {
            writeln!(out, "# {detail}")?;
        }
    }
    Ok(match report.outcome {
        SearchOutcome::Found { .. } => EXIT_OK,
        SearchOutcome::ExhaustedNone => EXIT_NONE,
        SearchOutcome::BudgetExceeded => EXIT_BUDGET,
    })
}
