//! Densest-subgraph solvers: greedy peeling, an exact max-flow search and a
//! hybrid that runs the exact search on a small neighborhood of the greedy
//! answer.
//!
//! ```
//! use densest::graph::Graph;
//! use densest::peel::peel;
//!
//! let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)];
//! let g = Graph::from_edges(5, &edges).unwrap();
//! let r = peel(&g).unwrap();
//! assert_eq!(r.best_set.members, vec![0, 1, 2, 3]);
//! assert_eq!(r.best_set.density.to_string(), "1.5000");
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod exact;
pub mod flow;
pub mod graph;
pub mod hybrid;
pub mod instances;
pub mod io;
pub mod lp;
pub mod peel;

pub use error::{Error, Result};
pub use graph::{DenseSet, Density, Graph, VertexId};
