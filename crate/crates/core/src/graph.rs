//! Immutable labeled undirected graphs.
//!
//! Adjacency is stored in compressed sparse row form with every neighbor
//! list sorted, so edge lookups are a binary search over the shorter of the
//! two lists. Per-vertex invariants used by the filters (degree, maximum
//! neighbor degree, sorted neighbor labels) are computed once at
//! construction.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type Label = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    labels: Vec<Label>,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    // neighbor labels of each vertex, sorted, same layout as `neighbors`
    neighbor_labels: Vec<Label>,
    max_neighbor_degree: Vec<usize>,
}

/// Isomorphism-invariant summary of one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexProfile {
    pub degree: usize,
    pub max_neighbor_degree: usize,
    /// Sorted multiset of the labels of the immediate neighbors.
    pub neighbor_label_multiset: Vec<Label>,
}

impl LabeledGraph {
    /// Builds a graph from per-vertex labels and an undirected edge list.
    ///
    /// Each edge must appear once; self-loops, duplicates (in either
    /// orientation) and out-of-range endpoints are rejected.
    pub fn new(labels: Vec<Label>, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let n = labels.len();
        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::usage(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::usage(format!("self-loop on vertex {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::usage(format!("duplicate edge ({v}, {})", w[0])));
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }

        let degree = |v: VertexId| offsets[v + 1] - offsets[v];
        let mut neighbor_labels = Vec::with_capacity(neighbors.len());
        let mut max_neighbor_degree = Vec::with_capacity(n);
        for v in 0..n {
            let adj = &neighbors[offsets[v]..offsets[v + 1]];
            let start = neighbor_labels.len();
            neighbor_labels.extend(adj.iter().map(|&w| labels[w]));
            neighbor_labels[start..].sort_unstable();
            max_neighbor_degree.push(adj.iter().map(|&w| degree(w)).max().unwrap_or(0));
        }

        Ok(LabeledGraph {
            labels,
            offsets,
            neighbors,
            neighbor_labels,
            max_neighbor_degree,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Panics if `v` is out of range.
    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v]
    }

    /// Sorted neighbor list of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check(v)?;
        Ok(self.deg(v))
    }

    pub fn max_neighbor_degree(&self, v: VertexId) -> Result<usize> {
        self.check(v)?;
        Ok(self.max_nbr_deg(v))
    }

    pub fn neighbor_labels(&self, v: VertexId) -> Result<&[Label]> {
        self.check(v)?;
        Ok(self.nbr_labels(v))
    }

    pub fn profile(&self, v: VertexId) -> Result<VertexProfile> {
        self.check(v)?;
        Ok(VertexProfile {
            degree: self.deg(v),
            max_neighbor_degree: self.max_nbr_deg(v),
            neighbor_label_multiset: self.nbr_labels(v).to_vec(),
        })
    }

    #[inline]
    pub(crate) fn deg(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub(crate) fn max_nbr_deg(&self, v: VertexId) -> usize {
        self.max_neighbor_degree[v]
    }

    #[inline]
    pub(crate) fn nbr_labels(&self, v: VertexId) -> &[Label] {
        &self.neighbor_labels[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge lookup in O(log min(deg a, deg b)). Out-of-range ids yield false.
    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        if a >= self.vertex_count() || b >= self.vertex_count() {
            return false;
        }
        let (short, other) = if self.deg(a) <= self.deg(b) { (a, b) } else { (b, a) };
        self.neighbors(short).binary_search(&other).is_ok()
    }

    /// Every edge once, as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// Hop distance from `source` to every vertex, `None` when unreachable.
    pub fn bfs_distances(&self, source: VertexId) -> Result<Vec<Option<usize>>> {
        self.check(source)?;
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// True for graphs with at least one vertex and a single component.
    pub fn is_connected(&self) -> bool {
        match self.bfs_distances(0) {
            Ok(dist) => dist.iter().all(Option::is_some),
            Err(_) => false,
        }
    }

    /// Greatest hop distance from `u` to any vertex.
    pub fn eccentricity(&self, u: VertexId) -> Result<usize> {
        let dist = self.bfs_distances(u)?;
        dist.iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
            .ok_or(Error::Disconnected)
    }

    /// All vertices within `eps` hops of `v`, including `v`, in ascending
    /// order. The search is depth-bounded, so its cost depends on the size
    /// of the ball rather than the whole graph.
    pub fn epsilon_neighborhood(&self, v: VertexId, eps: usize) -> Result<Vec<VertexId>> {
        self.check(v)?;
        let mut seen: HashSet<VertexId> = HashSet::new();
        let mut frontier = vec![v];
        seen.insert(v);
        for _ in 0..eps {
            let mut next = Vec::new();
            for &x in &frontier {
                for &w in self.neighbors(x) {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let mut ball: Vec<VertexId> = seen.into_iter().collect();
        ball.sort_unstable();
        Ok(ball)
    }

    /// The subgraph induced by `vertices`, renumbered so that
    /// `vertices[i]` becomes vertex `i`.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Result<LabeledGraph> {
        let mut index = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            self.check(v)?;
            if index.insert(v, i).is_some() {
                return Err(Error::usage(format!("vertex {v} listed twice")));
            }
        }
        let labels = vertices.iter().map(|&v| self.labels[v]).collect();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = index.get(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        LabeledGraph::new(labels, &edges)
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "vertex {v} out of range (graph has {} vertices)",
                self.vertex_count()
            )))
        }
    }

    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// t <num_vertices> <num_edges>
    /// v <id> <label> <degree>     (ids 0..n-1, ascending)
    /// e <src> <dst>               (each undirected edge once)
    /// ```
    ///
    /// Blank lines are ignored. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());

        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let fields = record(line_no, header, 't', 2)?;
        let (n, m) = (fields[0], fields[1]);

        let mut labels = Vec::with_capacity(n);
        let mut declared_degree = Vec::with_capacity(n);
        let mut vertex_lines = Vec::with_capacity(n);
        for id in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("expected {n} vertex records, found {id}")))?;
            let f = record(line_no, line, 'v', 3)?;
            if f[0] != id {
                return Err(Error::parse(line_no, format!("expected vertex id {id}, found {}", f[0])));
            }
            let label = Label::try_from(f[1])
                .map_err(|_| Error::parse(line_no, format!("label {} too large", f[1])))?;
            labels.push(label);
            declared_degree.push(f[2]);
            vertex_lines.push(line_no);
        }

        let mut edges = Vec::with_capacity(m);
        let mut seen = HashSet::with_capacity(m);
        let mut last_line = vertex_lines.last().copied().unwrap_or(line_no);
        for count in 0..m {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(last_line, format!("expected {m} edge records, found {count}")))?;
            let f = record(line_no, line, 'e', 2)?;
            let (a, b) = (f[0], f[1]);
            if a >= n || b >= n {
                return Err(Error::parse(line_no, format!("edge endpoint out of range 0..{n}")));
            }
            if a == b {
                return Err(Error::parse(line_no, "self-loop"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::parse(line_no, format!("duplicate edge ({a}, {b})")));
            }
            edges.push((a, b));
            last_line = line_no;
        }

        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(line_no, "unexpected record after the declared edges"));
        }

        let graph = LabeledGraph::new(labels, &edges)?;
        for v in 0..n {
            if graph.deg(v) != declared_degree[v] {
                return Err(Error::parse(
                    vertex_lines[v],
                    format!(
                        "vertex {v} declares degree {} but has {} edges",
                        declared_degree[v],
                        graph.deg(v)
                    ),
                ));
            }
        }
        Ok(graph)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Reads a graph that will be used as a query: it must be connected.
    pub fn read_query(path: impl AsRef<Path>) -> Result<Self> {
        let graph = Self::read(path)?;
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "t {} {}", self.vertex_count(), self.edge_count());
        for v in 0..self.vertex_count() {
            let _ = writeln!(out, "v {v} {} {}", self.labels[v], self.deg(v));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "e {a} {b}");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn record(line_no: usize, line: &str, tag: char, arity: usize) -> Result<Vec<usize>> {
    let mut parts = line.split_whitespace();
    let found = parts.next().unwrap_or("");
    if found.len() != 1 || !found.starts_with(tag) {
        return Err(Error::parse(line_no, format!("expected a '{tag}' record, found {found:?}")));
    }
    let fields = parts
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("invalid non-negative integer {p:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if fields.len() != arity {
        return Err(Error::parse(
            line_no,
            format!("'{tag}' record takes {arity} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

/// Multiset containment over sorted label lists.
pub(crate) fn is_sub_multiset(needle: &[Label], haystack: &[Label]) -> bool {
    if needle.len() > haystack.len() {
        return false;
    }
    let mut rest = haystack.iter();
    'outer: for x in needle {
        for y in rest.by_ref() {
            match y.cmp(x) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}
