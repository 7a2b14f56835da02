//! Candidate regions: the ball of radius `eccentricity(pivot)` around one
//! pivot image, with per-query-vertex candidates restricted to that ball
//! and sorted into matching order.

use std::cmp::Ordering;

use crate::graph::{LabeledGraph, VertexId};
use crate::pivot::{passes_invariants, passes_neighbor_labels, CandidateSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRegion {
    pub pivot: VertexId,
    pub pivot_image: VertexId,
    /// Ascending data vertex ids within `eps` hops of the pivot image.
    pub region_vertices: Vec<VertexId>,
    /// One entry per query vertex, in matching order.
    pub ordered_candidates: Vec<CandidateSet>,
}

impl CandidateRegion {
    pub fn contains(&self, v: VertexId) -> bool {
        self.region_vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// The ball has fewer vertices than the query.
    TooSmall { region_size: usize },
    /// Some query vertex has no candidate inside the ball.
    EmptyCandidates { query_vertex: VertexId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionOutcome {
    Region(CandidateRegion),
    Rejected { region_size: usize, reason: RejectReason },
}

pub fn explore_region(
    gq: &LabeledGraph,
    gd: &LabeledGraph,
    pivot: VertexId,
    eps: usize,
    v: VertexId,
) -> crate::Result<RegionOutcome> {
    let ball = gd.epsilon_neighborhood(v, eps)?;
    let region_size = ball.len();
    if region_size < gq.vertex_count() {
        return Ok(RegionOutcome::Rejected {
            region_size,
            reason: RejectReason::TooSmall { region_size },
        });
    }

    let mut candidates = Vec::with_capacity(gq.vertex_count());
    for u in 0..gq.vertex_count() {
        if u == pivot {
            candidates.push(CandidateSet { query_vertex: u, matches: vec![v] });
            continue;
        }
        // invariants are taken from the whole data graph, not the ball
        let matches: Vec<VertexId> = ball
            .iter()
            .copied()
            .filter(|&w| passes_invariants(gq, u, gd, w) && passes_neighbor_labels(gq, u, gd, w))
            .collect();
        if matches.is_empty() {
            return Ok(RegionOutcome::Rejected {
                region_size,
                reason: RejectReason::EmptyCandidates { query_vertex: u },
            });
        }
        candidates.push(CandidateSet { query_vertex: u, matches });
    }

    sort_matching_order(gq, &mut candidates);
    Ok(RegionOutcome::Region(CandidateRegion {
        pivot,
        pivot_image: v,
        region_vertices: ball,
        ordered_candidates: candidates,
    }))
}

/// Compares `|a| / deg(a)` with `|b| / deg(b)` exactly, then by query id.
pub(crate) fn ratio_order(gq: &LabeledGraph, a: &CandidateSet, b: &CandidateSet) -> Ordering {
    let lhs = a.len() as u128 * gq.deg(b.query_vertex) as u128;
    let rhs = b.len() as u128 * gq.deg(a.query_vertex) as u128;
    lhs.cmp(&rhs).then(a.query_vertex.cmp(&b.query_vertex))
}

pub(crate) fn sort_matching_order(gq: &LabeledGraph, candidates: &mut [CandidateSet]) {
    candidates.sort_by(|a, b| ratio_order(gq, a, b));
}

/// Query vertices of `region` in the order the search matches them.
pub fn matching_order(region: &CandidateRegion) -> Vec<VertexId> {
    region.ordered_candidates.iter().map(|c| c.query_vertex).collect()
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

    #[test]
    fn example_region_of_v4() {
        let (gq, gd) = example_graphs();
        let RegionOutcome::Region(region) = explore_region(&gq, &gd, 3, 2, 4).unwrap() else {
            panic!("region rejected");
        };
        let expected: Vec<_> = (0..11).filter(|v| *v != 8 && *v != 9).collect();
        assert_eq!(region.region_vertices, expected);
        assert_eq!(matching_order(&region), vec![2, 0, 1, 3, 4, 5]);
        let by_query = |u: usize| {
            region
                .ordered_candidates
                .iter()
                .find(|c| c.query_vertex == u)
                .unwrap()
                .matches
                .clone()
        };
        assert_eq!(by_query(0), vec![0]);
        assert_eq!(by_query(1), vec![1]);
        assert_eq!(by_query(2), vec![2]);
        assert_eq!(by_query(3), vec![4]);
        assert_eq!(by_query(4), vec![5]);
        assert_eq!(by_query(5), vec![6, 10]);
    }

    #[test]
    fn small_ball_is_rejected() {
        // six-vertex query against a four-vertex ball
        let gq = LabeledGraph::new(vec![0; 6], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let gd = LabeledGraph::new(vec![0; 4], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let outcome = explore_region(&gq, &gd, 2, 3, 1).unwrap();
        assert_eq!(
            outcome,
            RegionOutcome::Rejected { region_size: 4, reason: RejectReason::TooSmall { region_size: 4 } }
        );
    }

    #[test]
    fn missing_candidate_rejects_region() {
        let gq = LabeledGraph::new(vec![0, 1], &[(0, 1)]).unwrap();
        let gd = LabeledGraph::new(vec![0, 0, 1], &[(0, 1), (1, 2)]).unwrap();
        // ball of radius 1 around data vertex 0 has no label-1 vertex
        let outcome = explore_region(&gq, &gd, 0, 1, 0).unwrap();
        assert!(matches!(
            outcome,
            RegionOutcome::Rejected { reason: RejectReason::EmptyCandidates { query_vertex: 1 }, .. }
        ));
    }

    #[test]
    fn ratio_sort_is_exact() {
        // u0: degree 4 with 2 candidates, u1: degree 1 with 1 candidate
        let gq = LabeledGraph::new(vec![0; 5], &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut sets = vec![
            CandidateSet { query_vertex: 1, matches: vec![7] },
            CandidateSet { query_vertex: 0, matches: vec![3, 4] },
        ];
        sort_matching_order(&gq, &mut sets);
        assert_eq!(sets[0].query_vertex, 0);

        // equal ratios fall back to ids
        let mut sets: Vec<_> = (1..5)
            .rev()
            .map(|u| CandidateSet { query_vertex: u, matches: vec![u] })
            .collect();
        sort_matching_order(&gq, &mut sets);
        assert_eq!(sets.iter().map(|c| c.query_vertex).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }
}
