//! Batch drivers behind the command line: per-query outcomes, benchmark
//! reports over a directory of queries, budget sweeps, and re-verification
//! of emitted embeddings. Everything is reported as JSON lines.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::oracle::{verify_all, Violation};
use crate::querygen::{Manifest, MANIFEST_FILE};
use crate::search::{subiso, subiso_parallel, Embedding, SearchBudget, SearchResult};

/// Ten minutes.
pub const DEFAULT_TIMEOUT_MS: u64 = 600_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query_id: String,
    pub embedding_count: usize,
    pub elapsed_ms: u64,
    pub timed_out: bool,
    /// Zero embeddings and the timeout was hit.
    pub straggler: bool,
    pub eta_exhausted_regions: usize,
    pub regions_explored: usize,
}

impl QueryOutcome {
    pub fn new(query_id: impl Into<String>, result: &SearchResult) -> Self {
        QueryOutcome {
            query_id: query_id.into(),
            embedding_count: result.embeddings.len(),
            elapsed_ms: result.elapsed_ms,
            timed_out: result.timed_out,
            straggler: result.embeddings.is_empty() && result.timed_out,
            eta_exhausted_regions: result.eta_exhausted_regions,
            regions_explored: result.regions_explored,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedQuery {
    pub file: String,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub queries: usize,
    pub total_embeddings: usize,
    pub total_time_ms: u64,
    pub straggler_ids: Vec<String>,
    pub failed: Vec<FailedQuery>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchReport {
    pub outcomes: Vec<QueryOutcome>,
    pub summary: BenchSummary,
}

impl BenchReport {
    fn assemble(outcomes: Vec<QueryOutcome>, failed: Vec<FailedQuery>) -> Self {
        let summary = BenchSummary {
            queries: outcomes.len(),
            total_embeddings: outcomes.iter().map(|o| o.embedding_count).sum(),
            total_time_ms: outcomes.iter().map(|o| o.elapsed_ms).sum(),
            straggler_ids: outcomes.iter().filter(|o| o.straggler).map(|o| o.query_id.clone()).collect(),
            failed,
        };
        BenchReport { outcomes, summary }
    }

    /// One line per query followed by the summary line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for o in &self.outcomes {
            out.push_str(&serde_json::to_string(o)?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary)?);
        out.push('\n');
        Ok(out)
    }

    /// Zeroes every timing field, for byte-for-byte comparisons.
    pub fn without_timings(mut self) -> Self {
        for o in &mut self.outcomes {
            o.elapsed_ms = 0;
        }
        self.summary.total_time_ms = 0;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// 0 stands for unlimited.
    pub eta: u64,
    pub total_embeddings: usize,
    pub total_elapsed_ms: u64,
}

/// Runs one query. `threads > 1` searches regions concurrently.
pub fn run_query(gq: &LabeledGraph, gd: &LabeledGraph, budget: &SearchBudget, threads: usize) -> Result<SearchResult> {
    if threads > 1 {
        subiso_parallel(gq, gd, budget, threads)
    } else {
        subiso(gq, gd, budget)
    }
}

/// Query files of `dir`: the manifest's entries when a manifest exists,
/// otherwise every non-hidden file in name order.
pub fn list_query_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let manifest = dir.join(MANIFEST_FILE);
    if manifest.is_file() {
        let m = Manifest::read(&manifest)?;
        return Ok(m.entries.iter().map(|e| dir.join(&e.file)).collect());
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || !entry.path().is_file() {
            continue;
        }
        files.push(entry.path());
    }
    files.sort();
    Ok(files)
}

fn query_id(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Query id (file name) and graph.
pub type NamedQuery = (String, LabeledGraph);

/// Loads every query of `dir`; unreadable or malformed files are returned
/// separately instead of aborting the batch.
pub fn load_queries(dir: impl AsRef<Path>) -> Result<(Vec<NamedQuery>, Vec<FailedQuery>)> {
    let mut queries = Vec::new();
    let mut failed = Vec::new();
    for path in list_query_files(dir)? {
        match LabeledGraph::read_query(&path) {
            Ok(g) => queries.push((query_id(&path), g)),
            Err(e) => failed.push(FailedQuery { file: query_id(&path), error: e.to_string() }),
        }
    }
    Ok((queries, failed))
}

/// Runs every query against `gd`. With `parallel > 1` queries run
/// concurrently; the report keeps input order either way.
pub fn bench_queries(
    gd: &LabeledGraph,
    queries: &[(String, LabeledGraph)],
    budget: &SearchBudget,
    parallel: usize,
) -> Result<Vec<QueryOutcome>> {
    let one = |(id, gq): &(String, LabeledGraph)| subiso(gq, gd, budget).map(|r| QueryOutcome::new(id.clone(), &r));
    if parallel <= 1 {
        return queries.iter().map(one).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| queries.par_iter().map(one).collect())
}

pub fn bench(gd: &LabeledGraph, dir: impl AsRef<Path>, budget: &SearchBudget, parallel: usize) -> Result<BenchReport> {
    let (queries, failed) = load_queries(dir)?;
    let outcomes = bench_queries(gd, &queries, budget, parallel)?;
    Ok(BenchReport::assemble(outcomes, failed))
}

/// Checks that a sweep's budgets are ascending, with 0 (unlimited) only
/// in last position.
pub fn validate_eta_list(etas: &[u64]) -> Result<()> {
    if etas.is_empty() {
        return Err(Error::usage("eta list is empty"));
    }
    let key = |e: u64| if e == 0 { u64::MAX } else { e };
    if etas.windows(2).any(|w| key(w[0]) >= key(w[1])) {
        return Err(Error::usage("eta list must be strictly ascending (0 = unlimited goes last)"));
    }
    Ok(())
}

/// Totals per budget. A decrease in embeddings as the budget grows is
/// reported as a defect.
pub fn sweep(
    gd: &LabeledGraph,
    queries: &[(String, LabeledGraph)],
    etas: &[u64],
    k: usize,
    timeout: Option<Duration>,
    parallel: usize,
) -> Result<Vec<SweepPoint>> {
    validate_eta_list(etas)?;
    let mut points: Vec<SweepPoint> = Vec::with_capacity(etas.len());
    for &eta in etas {
        let budget = SearchBudget::unlimited().with_eta(eta).with_k(k).with_timeout(timeout);
        let outcomes = bench_queries(gd, queries, &budget, parallel)?;
        let point = SweepPoint {
            eta,
            total_embeddings: outcomes.iter().map(|o| o.embedding_count).sum(),
            total_elapsed_ms: outcomes.iter().map(|o| o.elapsed_ms).sum(),
        };
        if let Some(prev) = points.last() {
            if point.total_embeddings < prev.total_embeddings {
                return Err(Error::Defect(format!(
                    "embeddings dropped from {} at eta {} to {} at eta {}",
                    prev.total_embeddings, prev.eta, point.total_embeddings, point.eta
                )));
            }
        }
        points.push(point);
    }
    Ok(points)
}

/// Embedding lines of an output stream, each tagged with its 1-based line
/// number. Object lines (outcome records) and blank lines are skipped.
pub fn parse_embedding_stream(text: &str) -> Result<Vec<(usize, Embedding)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('{') {
            continue;
        }
        let e: Embedding = serde_json::from_str(line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.push((i + 1, e));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    /// Line number and violations of each rejected embedding.
    pub failures: Vec<(usize, Vec<Violation>)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (line, violations) in &self.failures {
            for v in violations {
                writeln!(f, "line {line}: {v}")?;
            }
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict}: {} embeddings checked, {} rejected", self.checked, self.failures.len())
    }
}

pub fn verify_stream(gq: &LabeledGraph, gd: &LabeledGraph, text: &str) -> Result<VerifyReport> {
    let parsed = parse_embedding_stream(text)?;
    let bad = verify_all(gq, gd, parsed.iter().map(|(_, e)| e));
    Ok(VerifyReport {
        checked: parsed.len(),
        failures: bad.into_iter().map(|(i, v)| (parsed[i].0, v)).collect(),
    })
}

/// Engine output format: one JSON array per embedding.
pub fn embedding_lines(embeddings: &[Embedding]) -> Result<String> {
    let mut out = String::new();
    for e in embeddings {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}
