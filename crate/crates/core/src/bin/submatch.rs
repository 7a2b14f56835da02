use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use submatch::harness::{
    bench, embedding_lines, load_queries, run_query, sweep, verify_stream, QueryOutcome, DEFAULT_TIMEOUT_MS,
};
use submatch::querygen::{generate_query_set, write_query_set, QuerySetSpec, DEFAULT_COUNT, DEFAULT_SIZES};
use submatch::search::{DEFAULT_ETA, DEFAULT_K};
use submatch::{oracle, Error, LabeledGraph, SearchBudget};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_REJECTED: u8 = 4;

#[derive(Parser)]
#[command(name = "submatch", version, about = "Labeled subgraph isomorphism search and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Maximum embeddings per query (0 = unlimited)
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// Maximum recursive calls per candidate region (0 = unlimited)
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: u64,
    /// Per-query wall-clock limit in milliseconds (0 = none)
    #[arg(long = "timeout-ms", default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget::unlimited()
            .with_k(self.k)
            .with_eta(self.eta)
            .with_timeout(timeout(self.timeout_ms))
    }
}

fn timeout(ms: u64) -> Option<Duration> {
    (ms > 0).then(|| Duration::from_millis(ms))
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Count,
    Embeddings,
}

#[derive(Subcommand)]
enum Command {
    /// Find embeddings of one query graph
    Match {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Emit::Count)]
        emit: Emit,
        /// Worker threads for searching candidate regions
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Report all timings as 0
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every query of a directory and report per-query outcomes
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Queries run concurrently
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total embeddings and time of a query set for several recursion budgets
    Sweep {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Ascending budgets; 0 = unlimited, last
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        etas: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long = "timeout-ms", default_value_t = DEFAULT_TIMEOUT_MS)]
        timeout_ms: u64,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate query sets by randomized BFS over a data graph
    Gen {
        #[arg(long)]
        data: PathBuf,
        /// Query size; without it one subdirectory per default size is written
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check embeddings produced by `match --emit embeddings`
    Verify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Embedding stream; `-` reads stdin
        #[arg(long, default_value = "-")]
        embeddings: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force enumeration for small instances
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io { path: path.clone(), source: e }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn query_id(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Match { data, query, budget, emit: mode, parallel, no_timing, out } => {
            let gd = LabeledGraph::read(&data)?;
            let gq = LabeledGraph::read_query(&query)?;
            let result = run_query(&gq, &gd, &budget.budget(), parallel)?;
            let mut outcome = QueryOutcome::new(query_id(&query), &result);
            if no_timing {
                outcome.elapsed_ms = 0;
            }
            let mut text = match mode {
                Emit::Count => String::new(),
                Emit::Embeddings => embedding_lines(&result.embeddings)?,
            };
            text.push_str(&serde_json::to_string(&outcome)?);
            text.push('\n');
            emit(&out, &text)?;
            Ok(if result.timed_out { EXIT_TIMEOUT } else { 0 })
        }
        Command::Bench { data, queries, budget, parallel, no_timing, out } => {
            let gd = LabeledGraph::read(&data)?;
            let mut report = bench(&gd, &queries, &budget.budget(), parallel)?;
            if no_timing {
                report = report.without_timings();
            }
            emit(&out, &report.to_json_lines()?)?;
            for f in &report.summary.failed {
                eprintln!("skipped {}: {}", f.file, f.error);
            }
            Ok(if report.summary.failed.is_empty() { 0 } else { EXIT_REJECTED })
        }
        Command::Sweep { data, queries, etas, k, timeout_ms, parallel, no_timing, out } => {
            let gd = LabeledGraph::read(&data)?;
            let (loaded, failed) = load_queries(&queries)?;
            let points = sweep(&gd, &loaded, &etas, k, timeout(timeout_ms), parallel)?;
            let mut text = String::new();
            for mut p in points {
                if no_timing {
                    p.total_elapsed_ms = 0;
                }
                text.push_str(&serde_json::to_string(&p)?);
                text.push('\n');
            }
            emit(&out, &text)?;
            for f in &failed {
                eprintln!("skipped {}: {}", f.file, f.error);
            }
            Ok(if failed.is_empty() { 0 } else { EXIT_REJECTED })
        }
        Command::Gen { data, n, count, seed, out } => {
            let gd = LabeledGraph::read(&data)?;
            let source = data.display().to_string();
            let sets: Vec<(usize, PathBuf)> = match n {
                Some(n) => vec![(n, out.clone())],
                None => DEFAULT_SIZES.iter().map(|&n| (n, out.join(format!("q{n}")))).collect(),
            };
            for (n, dir) in sets {
                let spec = QuerySetSpec { size_n: n, count, seed, source: source.clone() };
                let (queries, manifest) = generate_query_set(&gd, &spec)?;
                write_query_set(&dir, &queries, &manifest)?;
                eprintln!("wrote {} queries of size {n} to {}", queries.len(), dir.display());
            }
            Ok(0)
        }
        Command::Verify { data, query, embeddings, out } => {
            let gd = LabeledGraph::read(&data)?;
            let gq = LabeledGraph::read_query(&query)?;
            let mut text = String::new();
            if embeddings.as_os_str() == "-" {
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| Error::Io { path: "<stdin>".into(), source: e })?;
            } else {
                text = std::fs::read_to_string(&embeddings).map_err(|e| Error::Io { path: embeddings.clone(), source: e })?;
            }
            let report = verify_stream(&gq, &gd, &text)?;
            emit(&out, &format!("{report}\n"))?;
            Ok(if report.passed() { 0 } else { EXIT_REJECTED })
        }
        Command::Oracle { data, query, limit, out } => {
            let gd = LabeledGraph::read(&data)?;
            let gq = LabeledGraph::read_query(&query)?;
            let all = oracle::enumerate_all(&gq, &gd, limit)?;
            let mut text = embedding_lines(&all)?;
            text.push_str(&serde_json::json!({ "embedding_count": all.len() }).to_string());
            text.push('\n');
            emit(&out, &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Json(_) | Error::Disconnected => EXIT_PARSE,
                _ => EXIT_FAILURE,
            })
        }
    }
}
