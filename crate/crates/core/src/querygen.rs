//! Query workloads: connected labeled subgraphs cut out of a data graph by
//! a randomized breadth-first traversal, plus random graph generators used
//! for synthetic data graphs.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`; query
//! `i` of a set uses stream `i` of the set's seed, so every query can be
//! regenerated on its own and the output does not depend on the platform.

use std::collections::VecDeque;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Label, LabeledGraph, VertexId};

pub const DEFAULT_SIZES: [usize; 4] = [10, 15, 20, 25];
pub const DEFAULT_COUNT: usize = 100;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySetSpec {
    pub size_n: usize,
    pub count: usize,
    pub seed: u64,
    /// Free-form name of the data graph, recorded in the manifest.
    pub source: String,
}

impl QuerySetSpec {
    pub fn new(size_n: usize, seed: u64, source: impl Into<String>) -> Self {
        QuerySetSpec { size_n, count: DEFAULT_COUNT, seed, source: source.into() }
    }

    fn validate(&self) -> Result<()> {
        if self.size_n < 2 {
            return Err(Error::usage("query sets need at least 2 vertices per query"));
        }
        if self.count == 0 {
            return Err(Error::usage("query sets need at least one query"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedQuery {
    pub graph: LabeledGraph,
    pub start_vertex: VertexId,
    /// `traversal[i]` is the data vertex that became query vertex `i`.
    pub traversal: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub start_vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub data_graph: String,
    pub n: usize,
    pub count: usize,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Deterministic generator for query `index` of a set seeded with `seed`.
pub fn query_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn component_sizes(g: &LabeledGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if component[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        let mut stack = vec![s];
        component[s] = id;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.neighbors(v) {
                if component[w] == usize::MAX {
                    component[w] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    component.into_iter().map(|c| sizes[c]).collect()
}

/// Cuts an `n`-vertex connected query out of `gd`.
///
/// The start vertex is drawn uniformly among vertices whose component has
/// at least `n` vertices. The traversal is breadth-first with each
/// vertex's unvisited neighbors enqueued in random order; the first `n`
/// vertices reached become query vertices `0..n` and the query keeps every
/// data edge between them.
pub fn generate_query<R: Rng + ?Sized>(gd: &LabeledGraph, n: usize, rng: &mut R) -> Result<GeneratedQuery> {
    if n == 0 {
        return Err(Error::usage("query size must be at least 1"));
    }
    let reach = component_sizes(gd);
    if !reach.iter().any(|&s| s >= n) {
        return Err(Error::Generation(format!("no connected component has {n} vertices")));
    }
    let start = loop {
        let v = rng.gen_range(0..gd.vertex_count());
        if reach[v] >= n {
            break v;
        }
    };

    let mut visited = vec![false; gd.vertex_count()];
    let mut traversal = vec![start];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    let mut scratch = Vec::new();
    'bfs: while let Some(v) = queue.pop_front() {
        if traversal.len() == n {
            break;
        }
        scratch.clear();
        scratch.extend(gd.neighbors(v).iter().copied().filter(|&w| !visited[w]));
        scratch.shuffle(rng);
        for &w in &scratch {
            visited[w] = true;
            traversal.push(w);
            queue.push_back(w);
            if traversal.len() == n {
                break 'bfs;
            }
        }
    }

    let graph = gd.induced_subgraph(&traversal)?;
    Ok(GeneratedQuery { graph, start_vertex: start, traversal })
}

pub fn generate_query_set(gd: &LabeledGraph, spec: &QuerySetSpec) -> Result<(Vec<GeneratedQuery>, Manifest)> {
    spec.validate()?;
    let width = spec.count.saturating_sub(1).to_string().len().max(3);
    let mut queries = Vec::with_capacity(spec.count);
    let mut entries = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let mut rng = query_rng(spec.seed, i as u64);
        let q = generate_query(gd, spec.size_n, &mut rng)?;
        entries.push(ManifestEntry {
            file: format!("q{}_{:0width$}.graph", spec.size_n, i),
            start_vertex: q.start_vertex,
        });
        queries.push(q);
    }
    let manifest = Manifest {
        seed: spec.seed,
        data_graph: spec.source.clone(),
        n: spec.size_n,
        count: spec.count,
        entries,
    };
    Ok((queries, manifest))
}

/// Writes each query as a graph file plus `manifest.json` into `dir`.
pub fn write_query_set(dir: impl AsRef<Path>, queries: &[GeneratedQuery], manifest: &Manifest) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (q, entry) in queries.iter().zip(&manifest.entries) {
        q.graph.write(dir.join(&entry.file))?;
    }
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(manifest)?;
    json.push('\n');
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

/// Uniform random graph with exactly `edges` distinct edges and labels
/// drawn uniformly from `0..alphabet`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, edges: usize, alphabet: Label, rng: &mut R) -> Result<LabeledGraph> {
    let max_edges = n * n.saturating_sub(1) / 2;
    if edges > max_edges || alphabet == 0 {
        return Err(Error::usage(format!("cannot place {edges} edges on {n} vertices")));
    }
    let labels = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
    let mut set = std::collections::BTreeSet::new();
    while set.len() < edges {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<_> = set.into_iter().collect();
    LabeledGraph::new(labels, &edges)
}

/// Random connected graph: a random spanning tree plus `extra_edges`
/// further distinct edges (capped at the complete graph).
pub fn random_connected_graph<R: Rng + ?Sized>(
    n: usize,
    extra_edges: usize,
    alphabet: Label,
    rng: &mut R,
) -> Result<LabeledGraph> {
    if n == 0 || alphabet == 0 {
        return Err(Error::usage("need at least one vertex and one label"));
    }
    let labels = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
    let mut set = std::collections::BTreeSet::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        set.insert((parent, v));
    }
    let target = (set.len() + extra_edges).min(n * (n - 1) / 2);
    while set.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    let edges: Vec<_> = set.into_iter().collect();
    LabeledGraph::new(labels, &edges)
}
