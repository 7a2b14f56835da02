//! Pivot selection: pick the query vertex whose candidate regions are
//! expected to be fewest and smallest, scored by `|candidates| * eccentricity`.

use crate::error::{Error, Result};
use crate::graph::{is_sub_multiset, LabeledGraph, VertexId};

/// Number of query vertices refined and scored.
pub const SHORTLIST_LEN: usize = 3;

/// Data vertices that may be the image of one query vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub query_vertex: VertexId,
    /// Ascending data vertex ids.
    pub matches: Vec<VertexId>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotChoice {
    pub pivot: VertexId,
    pub pivot_eccentricity: usize,
    pub candidates: CandidateSet,
    pub objective_value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PivotSelection {
    Pivot(PivotChoice),
    /// Some shortlisted query vertex has no candidate at all.
    NoEmbeddingPossible,
    /// The query is a single vertex; every score would be zero.
    DegenerateSingleVertex,
}

/// Label, degree and maximum-neighbor-degree test shared by the global and
/// per-region filters.
#[inline]
pub(crate) fn passes_invariants(gq: &LabeledGraph, u: VertexId, gd: &LabeledGraph, v: VertexId) -> bool {
    gq.label(u) == gd.label(v) && gq.deg(u) <= gd.deg(v) && gq.max_nbr_deg(u) <= gd.max_nbr_deg(v)
}

#[inline]
pub(crate) fn passes_neighbor_labels(gq: &LabeledGraph, u: VertexId, gd: &LabeledGraph, v: VertexId) -> bool {
    is_sub_multiset(gq.nbr_labels(u), gd.nbr_labels(v))
}

/// Coarse candidates for every query vertex, indexed by query vertex id.
pub fn coarse_candidates(gq: &LabeledGraph, gd: &LabeledGraph) -> Vec<CandidateSet> {
    (0..gq.vertex_count())
        .map(|u| CandidateSet {
            query_vertex: u,
            matches: (0..gd.vertex_count())
                .filter(|&v| passes_invariants(gq, u, gd, v))
                .collect(),
        })
        .collect()
}

/// The query vertices with the fewest coarse candidates, ties by id.
pub fn shortlist(coarse: &[CandidateSet]) -> Vec<VertexId> {
    let mut order: Vec<&CandidateSet> = coarse.iter().collect();
    order.sort_by_key(|c| (c.len(), c.query_vertex));
    order
        .into_iter()
        .take(SHORTLIST_LEN)
        .map(|c| c.query_vertex)
        .collect()
}

/// Keeps the coarse candidates whose neighbor labels contain those of `u`
/// as a multiset.
pub fn refine(gq: &LabeledGraph, gd: &LabeledGraph, u: VertexId, coarse: &CandidateSet) -> CandidateSet {
    CandidateSet {
        query_vertex: u,
        matches: coarse
            .matches
            .iter()
            .copied()
            .filter(|&v| passes_neighbor_labels(gq, u, gd, v))
            .collect(),
    }
}

pub fn select_pivot(gq: &LabeledGraph, gd: &LabeledGraph) -> Result<PivotSelection> {
    if !gq.is_connected() {
        return Err(Error::Disconnected);
    }
    if gq.vertex_count() == 1 {
        return Ok(PivotSelection::DegenerateSingleVertex);
    }

    let coarse = coarse_candidates(gq, gd);
    let mut best: Option<PivotChoice> = None;
    for u in shortlist(&coarse) {
        let refined = refine(gq, gd, u, &coarse[u]);
        if refined.is_empty() {
            return Ok(PivotSelection::NoEmbeddingPossible);
        }
        let ecc = gq.eccentricity(u)?;
        let objective = refined.len() as u64 * ecc as u64;
        let better = match &best {
            None => true,
            Some(b) => (objective, u) < (b.objective_value, b.pivot),
        };
        if better {
            best = Some(PivotChoice {
                pivot: u,
                pivot_eccentricity: ecc,
                candidates: refined,
                objective_value: objective,
            });
        }
    }
    best.map(PivotSelection::Pivot)
        .ok_or_else(|| Error::Defect("empty shortlist for a non-empty query".into()))
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

    fn sets(sizes: &[usize]) -> Vec<CandidateSet> {
        sizes
            .iter()
            .enumerate()
            .map(|(u, &n)| CandidateSet { query_vertex: u, matches: (0..n).collect() })
            .collect()
    }

    #[test]
    fn shortlist_sorts_by_cardinality() {
        assert_eq!(shortlist(&sets(&[5, 1, 3, 7])), vec![1, 2, 0]);
        assert_eq!(shortlist(&sets(&[2, 2, 2, 2])), vec![0, 1, 2]);
        assert_eq!(shortlist(&sets(&[4, 2])), vec![1, 0]);
    }

    #[test]
    fn refine_uses_multiset_containment() {
        // u: neighbors labeled {0, 0}; v: neighbors labeled {0, 1}
        let gq = LabeledGraph::new(vec![9, 0, 0], &[(0, 1), (0, 2)]).unwrap();
        let gd = LabeledGraph::new(vec![9, 0, 1], &[(0, 1), (0, 2)]).unwrap();
        let coarse = CandidateSet { query_vertex: 0, matches: vec![0] };
        assert!(refine(&gq, &gd, 0, &coarse).is_empty());

        // u: {0, 1}; v: {0, 0, 1, 2}
        let gq = LabeledGraph::new(vec![9, 0, 1], &[(0, 1), (0, 2)]).unwrap();
        let gd = LabeledGraph::new(vec![9, 0, 0, 1, 2], &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(refine(&gq, &gd, 0, &coarse).matches, vec![0]);
    }

    #[test]
    fn single_vertex_coarse_candidates() {
        let gq = LabeledGraph::new(vec![3], &[]).unwrap();
        let gd = LabeledGraph::new(vec![3, 3, 1, 3], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(coarse_candidates(&gq, &gd)[0].matches, vec![0, 1, 3]);
        assert_eq!(select_pivot(&gq, &gd).unwrap(), PivotSelection::DegenerateSingleVertex);
    }

    #[test]
    fn example_shortlist_and_pivot() {
        let (gq, gd) = example_graphs();
        let coarse = coarse_candidates(&gq, &gd);
        let mut short = shortlist(&coarse);
        short.sort();
        assert_eq!(short, vec![1, 2, 3]);
        assert_eq!(refine(&gq, &gd, 1, &coarse[1]).matches, vec![1]);
        assert_eq!(refine(&gq, &gd, 2, &coarse[2]).matches, vec![2]);
        assert_eq!(refine(&gq, &gd, 3, &coarse[3]).matches, vec![4]);

        let PivotSelection::Pivot(choice) = select_pivot(&gq, &gd).unwrap() else {
            panic!("expected a pivot");
        };
        assert_eq!(choice.pivot, 3);
        assert_eq!(choice.pivot_eccentricity, 2);
        assert_eq!(choice.candidates.matches, vec![4]);
        assert_eq!(choice.objective_value, 2);
    }

    #[test]
    fn absent_label_means_no_embedding() {
        let gq = LabeledGraph::new(vec![0, 7], &[(0, 1)]).unwrap();
        let gd = LabeledGraph::new(vec![0, 1, 0], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(select_pivot(&gq, &gd).unwrap(), PivotSelection::NoEmbeddingPossible);
    }

    #[test]
    fn disconnected_query_is_rejected() {
        let gq = LabeledGraph::new(vec![0, 0], &[]).unwrap();
        assert!(matches!(select_pivot(&gq, &gq), Err(Error::Disconnected)));
    }

    #[test]
    fn objective_ties_go_to_lowest_id() {
        // path a-b-a: both endpoints have eccentricity 2 and one candidate
        // each in a copy of itself; the middle has eccentricity 1.
        let gq = LabeledGraph::new(vec![0, 1, 0], &[(0, 1), (1, 2)]).unwrap();
        let gd = LabeledGraph::new(vec![1, 0, 0, 1, 0], &[(0, 1), (0, 2), (3, 4)]).unwrap();
        let PivotSelection::Pivot(choice) = select_pivot(&gq, &gd).unwrap() else {
            panic!("expected a pivot");
        };
        // endpoints: 2 candidates * 2 = 4; middle: 1 candidate * 1 = 1
        assert_eq!(choice.pivot, 1);
        assert_eq!(choice.objective_value, 1);

        let gq = LabeledGraph::new(vec![0, 0], &[(0, 1)]).unwrap();
        let gd = LabeledGraph::new(vec![0, 0, 0], &[(0, 1), (1, 2)]).unwrap();
        let PivotSelection::Pivot(choice) = select_pivot(&gq, &gd).unwrap() else {
            panic!("expected a pivot");
        };
        assert_eq!(choice.pivot, 0);
    }
}
