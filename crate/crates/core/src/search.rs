//! Region-by-region backtracking enumeration with a per-region cap on
//! recursive calls, a global cap on emitted embeddings and an optional
//! wall-clock deadline.

use std::collections::HashSet;
use std::num::{NonZeroU64, NonZeroUsize};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, VertexId};
use crate::pivot::{select_pivot, PivotSelection};
use crate::region::{explore_region, CandidateRegion, RegionOutcome};

pub const DEFAULT_ETA: u64 = 1000;
pub const DEFAULT_K: usize = 1000;

/// Ordered `(query vertex, data vertex)` pairs.
///
/// Serialized as a JSON array of two-element arrays.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pairs: Vec<(VertexId, VertexId)>,
}

impl Embedding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(VertexId, VertexId)>) -> Self {
        Embedding { pairs }
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, u: VertexId, v: VertexId) {
        self.pairs.push((u, v));
    }

    pub fn pop(&mut self) -> Option<(VertexId, VertexId)> {
        self.pairs.pop()
    }

    pub fn image_of(&self, u: VertexId) -> Option<VertexId> {
        self.pairs.iter().find(|(q, _)| *q == u).map(|(_, v)| *v)
    }

    pub fn data_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pairs.iter().map(|(_, v)| *v)
    }

    /// The images listed by query vertex id; `None` if some query vertex
    /// in `0..query_size` is unmapped.
    pub fn as_mapping(&self, query_size: usize) -> Option<Vec<VertexId>> {
        let mut out = vec![None; query_size];
        for &(u, v) in &self.pairs {
            *out.get_mut(u)? = Some(v);
        }
        out.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Recursive calls allowed per candidate region; `None` is unlimited.
    pub eta: Option<NonZeroU64>,
    /// Embeddings emitted per query; `None` is unlimited.
    pub k: Option<NonZeroUsize>,
    pub timeout: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            eta: NonZeroU64::new(DEFAULT_ETA),
            k: NonZeroUsize::new(DEFAULT_K),
            timeout: None,
        }
    }
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget { eta: None, k: None, timeout: None }
    }

    /// 0 means unlimited.
    pub fn with_eta(mut self, eta: u64) -> Self {
        self.eta = NonZeroU64::new(eta);
        self
    }

    /// 0 means unlimited.
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = NonZeroUsize::new(k);
        self
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotSummary {
    pub pivot: VertexId,
    pub eccentricity: usize,
    pub candidate_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchResult {
    pub embeddings: Vec<Embedding>,
    /// Pivot images whose region was examined, including rejected ones.
    pub regions_explored: usize,
    pub regions_rejected: usize,
    pub eta_exhausted_regions: usize,
    pub recursive_calls_total: u64,
    pub elapsed_ms: u64,
    pub timed_out: bool,
    pub pivot: Option<PivotSummary>,
    /// Sum of region sizes over every examined region.
    pub region_size_total: usize,
    /// Distinct data vertices covered by the examined regions.
    pub vertices_accessed: usize,
}

/// True iff mapping `u` to `v` keeps every query edge between `u` and an
/// already matched vertex. Extra data edges are allowed.
pub fn is_joinable(u: VertexId, v: VertexId, m: &Embedding, gq: &LabeledGraph, gd: &LabeledGraph) -> bool {
    m.pairs
        .iter()
        .all(|&(qu, dv)| !gq.has_edge(u, qu) || gd.has_edge(v, dv))
}

/// Outcome of searching one candidate region.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegionSearch {
    pub embeddings: Vec<Embedding>,
    pub calls: u64,
    pub eta_exhausted: bool,
    pub timed_out: bool,
    pub k_reached: bool,
}

struct Limits {
    eta: Option<u64>,
    k: Option<usize>,
    deadline: Option<Instant>,
}

enum Flow {
    Continue,
    Stop,
}

struct Searcher<'a> {
    gq: &'a LabeledGraph,
    gd: &'a LabeledGraph,
    region: &'a CandidateRegion,
    // positions in `region.ordered_candidates`, pivot excluded
    steps: Vec<usize>,
    m: Embedding,
    assignment: Vec<Option<VertexId>>,
    used: &'a mut [bool],
    limits: &'a Limits,
    out: RegionSearch,
}

impl Searcher<'_> {
    fn recurse(&mut self) -> Flow {
        if let Some(eta) = self.limits.eta {
            if self.out.calls >= eta {
                self.out.eta_exhausted = true;
                return Flow::Stop;
            }
        }
        self.out.calls += 1;
        if let Some(deadline) = self.limits.deadline {
            if Instant::now() >= deadline {
                self.out.timed_out = true;
                return Flow::Stop;
            }
        }

        if self.m.len() == self.gq.vertex_count() {
            self.record();
            if self.limits.k.is_some_and(|k| self.out.embeddings.len() >= k) {
                self.out.k_reached = true;
                return Flow::Stop;
            }
            return Flow::Continue;
        }

        let region = self.region;
        let next = &region.ordered_candidates[self.steps[self.m.len() - 1]];
        let u = next.query_vertex;
        for &v in &next.matches {
            if self.used[v] || !is_joinable(u, v, &self.m, self.gq, self.gd) {
                continue;
            }
            self.m.push(u, v);
            self.used[v] = true;
            self.assignment[u] = Some(v);
            let flow = self.recurse();
            self.assignment[u] = None;
            self.used[v] = false;
            self.m.pop();
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    // emitted in matching order, pivot at its sorted position
    fn record(&mut self) {
        let pairs = self
            .region
            .ordered_candidates
            .iter()
            .map(|c| (c.query_vertex, self.assignment[c.query_vertex].unwrap_or(usize::MAX)))
            .collect();
        self.out.embeddings.push(Embedding::from_pairs(pairs));
    }
}

fn search_region(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    region: &CandidateRegion,
    used: &mut [bool],
    limits: &Limits,
) -> RegionSearch {
    let steps = region
        .ordered_candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.query_vertex != region.pivot)
        .map(|(i, _)| i)
        .collect();
    let mut assignment = vec![None; gq.vertex_count()];
    assignment[region.pivot] = Some(region.pivot_image);
    let mut m = Embedding::new();
    m.push(region.pivot, region.pivot_image);
    used[region.pivot_image] = true;

    let mut searcher = Searcher {
        gq,
        gd,
        region,
        steps,
        m,
        assignment,
        used,
        limits,
        out: RegionSearch::default(),
    };
    searcher.recurse();
    let out = searcher.out;
    used[region.pivot_image] = false;
    out
}

/// Enumerates embeddings inside one region, extending `m`, which must hold
/// exactly the pivot pair.
pub fn subgraph_search(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    region: &CandidateRegion,
    m: &Embedding,
    budget: &SearchBudget,
) -> Result<RegionSearch> {
    if m.pairs() != [(region.pivot, region.pivot_image)] {
        return Err(Error::usage("partial embedding must contain exactly the pivot pair"));
    }
    let limits = Limits {
        eta: budget.eta.map(NonZeroU64::get),
        k: budget.k.map(NonZeroUsize::get),
        deadline: budget.timeout.map(|t| Instant::now() + t),
    };
    let mut used = vec![false; gd.vertex_count()];
    Ok(search_region(gq, gd, region, &mut used, &limits))
}

/// Runs the whole pipeline: pivot selection, then one region per pivot
/// candidate in ascending data-vertex order until the budget runs out.
pub fn subiso(gq: &LabeledGraph, gd: &LabeledGraph, budget: &SearchBudget) -> Result<SearchResult> {
    run(gq, gd, budget, None)
}

/// Like [`subiso`], but searches regions on `threads` worker threads.
///
/// Each region is capped at `k` on its own and the per-region results are
/// concatenated in pivot-image order before truncating to `k`, so without a
/// deadline the emitted sequence is identical to the sequential one. The
/// counters describe the work actually done, which may exceed what the
/// sequential search would have needed.
pub fn subiso_parallel(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    budget: &SearchBudget,
    threads: usize,
) -> Result<SearchResult> {
    run(gq, gd, budget, Some(threads.max(1)))
}

fn run(gq: &LabeledGraph, gd: &LabeledGraph, budget: &SearchBudget, threads: Option<usize>) -> Result<SearchResult> {
    let start = Instant::now();
    let limits = Limits {
        eta: budget.eta.map(NonZeroU64::get),
        k: budget.k.map(NonZeroUsize::get),
        deadline: budget.timeout.map(|t| start + t),
    };
    let mut result = SearchResult::default();

    match select_pivot(gq, gd)? {
        PivotSelection::NoEmbeddingPossible => {}
        PivotSelection::DegenerateSingleVertex => {
            let label = gq.label(0);
            result.embeddings = (0..gd.vertex_count())
                .filter(|&v| gd.label(v) == label)
                .take(limits.k.unwrap_or(usize::MAX))
                .map(|v| Embedding::from_pairs(vec![(0, v)]))
                .collect();
        }
        PivotSelection::Pivot(choice) => {
            result.pivot = Some(PivotSummary {
                pivot: choice.pivot,
                eccentricity: choice.pivot_eccentricity,
                candidate_count: choice.candidates.len(),
            });
            let images = &choice.candidates.matches;
            match threads {
                None => search_sequential(gq, gd, choice.pivot, choice.pivot_eccentricity, images, &limits, &mut result)?,
                Some(n) => search_parallel(gq, gd, choice.pivot, choice.pivot_eccentricity, images, &limits, n, &mut result)?,
            }
        }
    }

    result.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(result)
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

fn search_sequential(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    pivot: VertexId,
    eps: usize,
    images: &[VertexId],
    limits: &Limits,
    result: &mut SearchResult,
) -> Result<()> {
    let mut used = vec![false; gd.vertex_count()];
    let mut accessed = HashSet::new();
    for &v in images {
        if limits.k.is_some_and(|k| result.embeddings.len() >= k) {
            break;
        }
        if past(limits.deadline) {
            result.timed_out = true;
            break;
        }
        let outcome = explore_region(gq, gd, pivot, eps, v)?;
        result.regions_explored += 1;
        let region = match outcome {
            RegionOutcome::Rejected { region_size, .. } => {
                result.regions_rejected += 1;
                result.region_size_total += region_size;
                accessed.extend(gd.epsilon_neighborhood(v, eps)?);
                continue;
            }
            RegionOutcome::Region(region) => region,
        };
        result.region_size_total += region.region_vertices.len();
        accessed.extend(region.region_vertices.iter().copied());

        let region_limits = Limits {
            eta: limits.eta,
            k: limits.k.map(|k| k - result.embeddings.len()),
            deadline: limits.deadline,
        };
        let found = search_region(gq, gd, &region, &mut used, &region_limits);
        result.recursive_calls_total += found.calls;
        result.eta_exhausted_regions += usize::from(found.eta_exhausted);
        result.embeddings.extend(found.embeddings);
        if found.timed_out {
            result.timed_out = true;
            break;
        }
    }
    result.vertices_accessed = accessed.len();
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn search_parallel(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    pivot: VertexId,
    eps: usize,
    images: &[VertexId],
    limits: &Limits,
    threads: usize,
    result: &mut SearchResult,
) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker threads: {e}")))?;

    // None: the deadline had passed before the region was reached
    type Item = Option<(RegionOutcome, Option<RegionSearch>)>;
    let per_region: Vec<Result<Item>> = pool.install(|| {
        images
            .par_iter()
            .map_init(
                || vec![false; gd.vertex_count()],
                |used, &v| {
                    if past(limits.deadline) {
                        return Ok(None);
                    }
                    let outcome = explore_region(gq, gd, pivot, eps, v)?;
                    let found = match &outcome {
                        RegionOutcome::Region(region) => Some(search_region(gq, gd, region, used, limits)),
                        RegionOutcome::Rejected { .. } => None,
                    };
                    Ok(Some((outcome, found)))
                },
            )
            .collect()
    });

    let mut accessed = HashSet::new();
    for (&v, item) in images.iter().zip(per_region) {
        let Some((outcome, found)) = item? else {
            result.timed_out = true;
            continue;
        };
        result.regions_explored += 1;
        match &outcome {
            RegionOutcome::Rejected { region_size, .. } => {
                result.regions_rejected += 1;
                result.region_size_total += region_size;
                accessed.extend(gd.epsilon_neighborhood(v, eps)?);
            }
            RegionOutcome::Region(region) => {
                result.region_size_total += region.region_vertices.len();
                accessed.extend(region.region_vertices.iter().copied());
            }
        }
        if let Some(found) = found {
            result.recursive_calls_total += found.calls;
            result.eta_exhausted_regions += usize::from(found.eta_exhausted);
            result.timed_out |= found.timed_out;
            result.embeddings.extend(found.embeddings);
        }
    }
    if let Some(k) = limits.k {
        result.embeddings.truncate(k);
    }
    result.vertices_accessed = accessed.len();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_graphs() -> (LabeledGraph, LabeledGraph) {
        (
            LabeledGraph::parse(include_str!("../tests/data/example_query.graph")).unwrap(),
            LabeledGraph::parse(include_str!("../tests/data/example_data.graph")).unwrap(),
        )
    }

    fn expected_example() -> Vec<Embedding> {
        [6, 10]
            .iter()
            .map(|&last| Embedding::from_pairs(vec![(2, 2), (0, 0), (1, 1), (3, 4), (4, 5), (5, last)]))
            .collect()
    }

    #[test]
    fn joinable_with_empty_embedding() {
        let (gq, gd) = example_graphs();
        assert!(is_joinable(0, 7, &Embedding::new(), &gq, &gd));
    }

    #[test]
    fn joinable_completes_first_embedding() {
        let (gq, gd) = example_graphs();
        let m = Embedding::from_pairs(vec![(2, 2), (0, 0), (1, 1), (3, 4), (4, 5)]);
        assert!(is_joinable(5, 6, &m, &gq, &gd));
        assert!(is_joinable(5, 10, &m, &gq, &gd));
        // v3 is not adjacent to v5
        assert!(!is_joinable(5, 3, &m, &gq, &gd));
    }

    #[test]
    fn example_region_search_finds_both_embeddings() {
        let (gq, gd) = example_graphs();
        let RegionOutcome::Region(region) = explore_region(&gq, &gd, 3, 2, 4).unwrap() else {
            panic!("rejected");
        };
        let m = Embedding::from_pairs(vec![(3, 4)]);
        let found = subgraph_search(&gq, &gd, &region, &m, &SearchBudget::default()).unwrap();
        assert_eq!(found.embeddings, expected_example());
        assert!(!found.eta_exhausted);

        let bad = Embedding::from_pairs(vec![(3, 5)]);
        assert!(subgraph_search(&gq, &gd, &region, &bad, &SearchBudget::default()).is_err());
    }

    #[test]
    fn example_subiso() {
        let (gq, gd) = example_graphs();
        let result = subiso(&gq, &gd, &SearchBudget::default()).unwrap();
        assert_eq!(result.embeddings, expected_example());
        assert_eq!(result.regions_explored, 1);
        assert_eq!(result.regions_rejected, 0);
        assert_eq!(result.pivot.as_ref().map(|p| p.pivot), Some(3));
        assert_eq!(result.vertices_accessed, 9);
        assert!(!result.timed_out);
    }

    #[test]
    fn eta_one_does_only_the_root_call() {
        let (gq, gd) = example_graphs();
        let result = subiso(&gq, &gd, &SearchBudget::unlimited().with_eta(1)).unwrap();
        assert_eq!(result.recursive_calls_total, 1);
        assert_eq!(result.eta_exhausted_regions, 1);
        assert!(result.embeddings.is_empty());
    }

    #[test]
    fn k_caps_output() {
        let (gq, gd) = example_graphs();
        let result = subiso(&gq, &gd, &SearchBudget::unlimited().with_k(1)).unwrap();
        assert_eq!(result.embeddings, expected_example()[..1]);
    }

    #[test]
    fn single_vertex_query_uses_labels() {
        let gq = LabeledGraph::new(vec![1], &[]).unwrap();
        let gd = LabeledGraph::new(vec![1, 0, 1, 1], &[(0, 1)]).unwrap();
        let result = subiso(&gq, &gd, &SearchBudget::unlimited()).unwrap();
        let images: Vec<_> = result.embeddings.iter().map(|e| e.pairs()[0].1).collect();
        assert_eq!(images, vec![0, 2, 3]);
        let capped = subiso(&gq, &gd, &SearchBudget::unlimited().with_k(2)).unwrap();
        assert_eq!(capped.embeddings.len(), 2);
    }

    #[test]
    fn zero_timeout_stops_before_any_region() {
        let (gq, gd) = example_graphs();
        let budget = SearchBudget::unlimited().with_timeout(Some(Duration::ZERO));
        let result = subiso(&gq, &gd, &budget).unwrap();
        assert!(result.timed_out);
        assert!(result.embeddings.is_empty());
    }

    #[test]
    fn parallel_matches_sequential_on_example_graphs() {
        let (gq, gd) = example_graphs();
        let seq = subiso(&gq, &gd, &SearchBudget::default()).unwrap();
        let par = subiso_parallel(&gq, &gd, &SearchBudget::default(), 4).unwrap();
        assert_eq!(seq.embeddings, par.embeddings);
    }

    #[test]
    fn embedding_json_shape() {
        let e = Embedding::from_pairs(vec![(2, 2), (0, 0)]);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[[2,2],[0,0]]");
        assert_eq!(e.as_mapping(3), None);
        assert_eq!(e.as_mapping(2), None);
        let full = Embedding::from_pairs(vec![(1, 5), (0, 3)]);
        assert_eq!(full.as_mapping(2), Some(vec![3, 5]));
    }
}
