//! Constant-round 2-ruling sets.
//!
//! [`parallel_two_ruling_set`] computes an independent set with every node
//! within two hops of it. The [`harness`] module runs the same pipeline as a
//! semi-streaming algorithm or in the Congested Clique and reports passes,
//! memory words, or rounds; [`verify`] holds independent checkers.

pub mod backend;
pub mod classify;
pub mod config;
pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod mis;
pub mod nodeset;
pub mod rng;
pub mod ruling;
pub mod verify;

pub use classify::{classify_nodes, Label, NodeClassification};
pub use config::AlgoConfig;
pub use error::{Error, Result};
pub use generate::{generate, Family, GeneratorSpec};
pub use graph::{bfs_distance, build_graph, induced_subgraph, read_edge_list, two_hop_covered, Graph, Induced};
pub use harness::{run_congested_clique, run_streaming, CliqueAccount, StreamAccount};
pub use mis::{greedy_mis, luby_mis, LubyRunRecord};
pub use nodeset::NodeSet;
pub use rng::RngStream;
pub use ruling::{parallel_two_ruling_set, PhaseTrace, RulingSetResult, Witness};
pub use verify::{mis_oracle_check, verify_ruling_set, LemmaReport, Status};
