#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submatch::querygen::{generate_query, random_connected_graph, random_graph};
use submatch::{Embedding, LabeledGraph};

pub const EXAMPLE_QUERY: &str = include_str!("../data/example_query.graph");
pub const EXAMPLE_DATA: &str = include_str!("../data/example_data.graph");

pub fn example_graphs() -> (LabeledGraph, LabeledGraph) {
    (LabeledGraph::parse(EXAMPLE_QUERY).unwrap(), LabeledGraph::parse(EXAMPLE_DATA).unwrap())
}

/// A seeded (query, data) pair with |V(Gd)| <= 25, |V(Gq)| <= 6, at most 4
/// labels and a connected query. Even seeds cut the query out of the data
/// graph so that embeddings exist; odd seeds draw it independently.
pub fn random_instance(seed: u64) -> (LabeledGraph, LabeledGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..=25);
    let max_edges = n * (n - 1) / 2;
    let m = rng.gen_range(n..=(3 * n).min(max_edges));
    let alphabet = rng.gen_range(1..=4);
    let gd = random_graph(n, m, alphabet, &mut rng).unwrap();
    let qn = rng.gen_range(1..=6);
    let gq = if seed.is_multiple_of(2) {
        match generate_query(&gd, qn, &mut rng) {
            Ok(q) => q.graph,
            Err(_) => random_connected_graph(qn, rng.gen_range(0..3), alphabet, &mut rng).unwrap(),
        }
    } else {
        random_connected_graph(qn, rng.gen_range(0..3), alphabet, &mut rng).unwrap()
    };
    (gq, gd)
}

/// Embeddings as id-ordered image tuples.
pub fn as_set(gq: &LabeledGraph, embeddings: &[Embedding]) -> BTreeSet<Vec<usize>> {
    embeddings
        .iter()
        .map(|e| e.as_mapping(gq.vertex_count()).expect("complete embedding"))
        .collect()
}
