//! k safest nearby neighbor (kSNN) queries on road networks.
//!
//! Every engine returns the `k` POIs whose safest valid path from the query
//! vertex ranks best, where a path is valid if it is shorter than the
//! distance constraint `d_c` and paths are ranked by their [`SafetySignature`].

pub mod ct;
pub mod dijkstra;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod ine;
pub mod ingest;
pub mod oracle;
pub mod par;
pub mod path;
pub mod persist;
pub mod query;
pub mod rtree;
pub mod safety;
pub mod snvd;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeKey, RoadGraph, VertexId};
pub use query::{Answer, AnswerEntry, Counters, QueryOutput, QuerySpec, Rules, SearchOptions};
pub use safety::{compare_safety, pss, PathCost, Pss, SafetySignature};
