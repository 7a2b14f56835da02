//! Subgraph isomorphism over labeled undirected graphs.
//!
//! The engine picks a pivot query vertex minimizing
//! `|candidates| * eccentricity`, explores one candidate region (the
//! eccentricity-radius ball) per pivot image, and enumerates embeddings in
//! each region by backtracking under a per-region recursion budget.
//!
//! ```
//! use submatch::{subiso, LabeledGraph, SearchBudget};
//!
//! let query = LabeledGraph::new(vec![0, 1], &[(0, 1)]).unwrap();
//! let data = LabeledGraph::new(vec![0, 1, 1], &[(0, 1), (0, 2)]).unwrap();
//! let result = subiso(&query, &data, &SearchBudget::default()).unwrap();
//! assert_eq!(result.embeddings.len(), 2);
//! ```

pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod pivot;
pub mod querygen;
pub mod region;
pub mod search;

pub use error::{Error, Result};
pub use graph::{Label, LabeledGraph, VertexId, VertexProfile};
pub use pivot::{select_pivot, CandidateSet, PivotChoice, PivotSelection};
pub use region::{explore_region, matching_order, CandidateRegion, RegionOutcome};
pub use search::{is_joinable, subgraph_search, subiso, subiso_parallel, Embedding, SearchBudget, SearchResult};
