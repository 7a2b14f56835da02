//! Brute-force ground truth and an independent embedding verifier.
//!
//! Nothing here reuses the engine's filters or its edge lookup: edges are
//! checked against a hash set built from the data graph's edge list.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, VertexId};
use crate::search::Embedding;

pub const MAX_QUERY_VERTICES: usize = 8;
pub const MAX_DATA_VERTICES: usize = 64;

struct EdgeSet(HashSet<(VertexId, VertexId)>);

impl EdgeSet {
    fn of(g: &LabeledGraph) -> Self {
        let mut set = HashSet::new();
        for (a, b) in g.edges() {
            set.insert((a, b));
            set.insert((b, a));
        }
        EdgeSet(set)
    }

    fn contains(&self, a: VertexId, b: VertexId) -> bool {
        self.0.contains(&(a, b))
    }
}

/// Every embedding of `gq` in `gd`, as pairs in query-id order, in
/// lexicographic order of the image tuple. Stops after `limit` if given.
pub fn enumerate_all(gq: &LabeledGraph, gd: &LabeledGraph, limit: Option<usize>) -> Result<Vec<Embedding>> {
    if gq.vertex_count() > MAX_QUERY_VERTICES || gd.vertex_count() > MAX_DATA_VERTICES {
        return Err(Error::usage(format!(
            "oracle is limited to {MAX_QUERY_VERTICES} query and {MAX_DATA_VERTICES} data vertices, got {} and {}",
            gq.vertex_count(),
            gd.vertex_count()
        )));
    }
    let query_edges: Vec<(VertexId, VertexId)> = gq.edges().collect();
    let data_edges = EdgeSet::of(gd);
    let mut out = Vec::new();
    let mut image = Vec::with_capacity(gq.vertex_count());
    extend(gq, gd, &query_edges, &data_edges, &mut image, limit, &mut out);
    Ok(out)
}

fn extend(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    query_edges: &[(VertexId, VertexId)],
    data_edges: &EdgeSet,
    image: &mut Vec<VertexId>,
    limit: Option<usize>,
    out: &mut Vec<Embedding>,
) {
    if limit.is_some_and(|l| out.len() >= l) {
        return;
    }
    let u = image.len();
    if u == gq.vertex_count() {
        out.push(Embedding::from_pairs(image.iter().copied().enumerate().collect()));
        return;
    }
    for v in 0..gd.vertex_count() {
        if gd.label(v) != gq.label(u) || image.contains(&v) {
            continue;
        }
        // edges from u back to already placed vertices
        let ok = query_edges
            .iter()
            .filter_map(|&(a, b)| match (a == u, b == u) {
                (true, _) if b < u => Some(b),
                (_, true) if a < u => Some(a),
                _ => None,
            })
            .all(|w| data_edges.contains(v, image[w]));
        if ok {
            image.push(v);
            extend(gq, gd, query_edges, data_edges, image, limit, out);
            image.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownQueryVertex(VertexId),
    UnknownDataVertex(VertexId),
    DuplicateQueryVertex(VertexId),
    /// Two query vertices share one image.
    NotInjective { data_vertex: VertexId },
    Unmapped(VertexId),
    LabelMismatch { query_vertex: VertexId, data_vertex: VertexId },
    MissingEdge { query_edge: (VertexId, VertexId), data_pair: (VertexId, VertexId) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownQueryVertex(u) => write!(f, "query vertex {u} does not exist"),
            Violation::UnknownDataVertex(v) => write!(f, "data vertex {v} does not exist"),
            Violation::DuplicateQueryVertex(u) => write!(f, "query vertex {u} is mapped more than once"),
            Violation::NotInjective { data_vertex } => {
                write!(f, "injectivity: data vertex {data_vertex} is the image of several query vertices")
            }
            Violation::Unmapped(u) => write!(f, "query vertex {u} has no image"),
            Violation::LabelMismatch { query_vertex, data_vertex } => write!(
                f,
                "label: query vertex {query_vertex} and data vertex {data_vertex} carry different labels"
            ),
            Violation::MissingEdge { query_edge, data_pair } => write!(
                f,
                "edge: query edge ({}, {}) maps to non-edge ({}, {})",
                query_edge.0, query_edge.1, data_pair.0, data_pair.1
            ),
        }
    }
}

/// Re-checks one embedding from first principles. An empty result means
/// the embedding is a valid, complete subgraph isomorphism.
pub fn verify_embedding(gq: &LabeledGraph, gd: &LabeledGraph, m: &Embedding) -> Vec<Violation> {
    let data_edges = EdgeSet::of(gd);
    verify_with(gq, gd, &data_edges, m)
}

/// Verifies many embeddings against the same graphs; returns the index
/// and violations of each failing one.
pub fn verify_all<'a>(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    embeddings: impl IntoIterator<Item = &'a Embedding>,
) -> Vec<(usize, Vec<Violation>)> {
    let data_edges = EdgeSet::of(gd);
    embeddings
        .into_iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let v = verify_with(gq, gd, &data_edges, m);
            (!v.is_empty()).then_some((i, v))
        })
        .collect()
}

fn verify_with(gq: &LabeledGraph, gd: &LabeledGraph, data_edges: &EdgeSet, m: &Embedding) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut image: Vec<Option<VertexId>> = vec![None; gq.vertex_count()];
    let mut seen_data = HashSet::new();
    for &(u, v) in m.pairs() {
        if u >= gq.vertex_count() {
            violations.push(Violation::UnknownQueryVertex(u));
            continue;
        }
        if v >= gd.vertex_count() {
            violations.push(Violation::UnknownDataVertex(v));
            continue;
        }
        if image[u].is_some() {
            violations.push(Violation::DuplicateQueryVertex(u));
            continue;
        }
        if !seen_data.insert(v) {
            violations.push(Violation::NotInjective { data_vertex: v });
        }
        if gq.label(u) != gd.label(v) {
            violations.push(Violation::LabelMismatch { query_vertex: u, data_vertex: v });
        }
        image[u] = Some(v);
    }
    for (u, img) in image.iter().enumerate() {
        if img.is_none() {
            violations.push(Violation::Unmapped(u));
        }
    }
    for (a, b) in gq.edges() {
        if let (Some(x), Some(y)) = (image[a], image[b]) {
            if !data_edges.contains(x, y) {
                violations.push(Violation::MissingEdge { query_edge: (a, b), data_pair: (x, y) });
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(labels: [u32; 3]) -> LabeledGraph {
        LabeledGraph::new(labels.to_vec(), &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn single_vertex_counts_labels() {
        let gq = LabeledGraph::new(vec![0], &[]).unwrap();
        let gd = LabeledGraph::new(vec![0, 0, 0], &[]).unwrap();
        assert_eq!(enumerate_all(&gq, &gd, None).unwrap().len(), 3);
    }

    #[test]
    fn triangle_automorphisms() {
        // all labels equal: all 3! permutations
        let t = triangle([0, 0, 0]);
        let all = enumerate_all(&t, &t, None).unwrap();
        let images: Vec<Vec<usize>> = all.iter().map(|e| e.as_mapping(3).unwrap()).collect();
        assert_eq!(
            images,
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]
        );

        // two labels equal: identity and the swap of the equal pair
        let t = triangle([0, 1, 1]);
        let images: Vec<Vec<usize>> =
            enumerate_all(&t, &t, None).unwrap().iter().map(|e| e.as_mapping(3).unwrap()).collect();
        assert_eq!(images, vec![vec![0, 1, 2], vec![0, 2, 1]]);

        // distinct labels: identity only
        let t = triangle([0, 1, 2]);
        assert_eq!(enumerate_all(&t, &t, None).unwrap().len(), 1);
    }

    #[test]
    fn example_has_two_embeddings() {
        let gq = LabeledGraph::parse(include_str!("../tests/data/example_query.graph")).unwrap();
        let gd = LabeledGraph::parse(include_str!("../tests/data/example_data.graph")).unwrap();
        let all = enumerate_all(&gq, &gd, None).unwrap();
        let images: Vec<Vec<usize>> = all.iter().map(|e| e.as_mapping(6).unwrap()).collect();
        assert_eq!(images, vec![vec![0, 1, 2, 4, 5, 6], vec![0, 1, 2, 4, 5, 10]]);
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let big = LabeledGraph::new(vec![0; 65], &[]).unwrap();
        let q = LabeledGraph::new(vec![0], &[]).unwrap();
        assert!(matches!(enumerate_all(&q, &big, None), Err(Error::Usage(_))));
        let q9 = LabeledGraph::new(vec![0; 9], &[]).unwrap();
        assert!(matches!(enumerate_all(&q9, &q, None), Err(Error::Usage(_))));
    }

    #[test]
    fn limit_truncates() {
        let t = triangle([0, 0, 0]);
        assert_eq!(enumerate_all(&t, &t, Some(2)).unwrap().len(), 2);
    }

    #[test]
    fn non_induced_images_are_allowed() {
        // a path maps into a triangle even though the triangle has an extra edge
        let p = LabeledGraph::new(vec![0; 3], &[(0, 1), (1, 2)]).unwrap();
        let t = triangle([0, 0, 0]);
        assert_eq!(enumerate_all(&p, &t, None).unwrap().len(), 6);
    }

    #[test]
    fn verifier_names_each_violation() {
        let gq = LabeledGraph::new(vec![0, 1, 0], &[(0, 1), (1, 2)]).unwrap();
        let gd = LabeledGraph::new(vec![0, 1, 0, 0], &[(0, 1), (1, 2)]).unwrap();
        let good = Embedding::from_pairs(vec![(0, 0), (1, 1), (2, 2)]);
        assert!(verify_embedding(&gq, &gd, &good).is_empty());

        let missing_edge = Embedding::from_pairs(vec![(0, 0), (1, 1), (2, 3)]);
        assert!(matches!(
            verify_embedding(&gq, &gd, &missing_edge)[..],
            [Violation::MissingEdge { query_edge: (1, 2), data_pair: (1, 3) }]
        ));

        let label = Embedding::from_pairs(vec![(0, 1), (1, 0), (2, 2)]);
        assert!(verify_embedding(&gq, &gd, &label)
            .iter()
            .any(|v| matches!(v, Violation::LabelMismatch { .. })));

        let collapse = Embedding::from_pairs(vec![(0, 0), (1, 1), (2, 0)]);
        assert!(verify_embedding(&gq, &gd, &collapse).contains(&Violation::NotInjective { data_vertex: 0 }));

        let partial = Embedding::from_pairs(vec![(0, 0), (1, 1)]);
        assert_eq!(verify_embedding(&gq, &gd, &partial), vec![Violation::Unmapped(2)]);

        let junk = Embedding::from_pairs(vec![(0, 0), (1, 1), (2, 2), (7, 9), (1, 1)]);
        let v = verify_embedding(&gq, &gd, &junk);
        assert!(v.contains(&Violation::UnknownQueryVertex(7)));
        assert!(v.contains(&Violation::DuplicateQueryVertex(1)));
    }
}
