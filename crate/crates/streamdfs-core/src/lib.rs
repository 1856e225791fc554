//! Semi-streaming DFS toolkit.
//!
//! This crate computes DFS trees of undirected graphs whose edges arrive as a
//! sequential stream. An algorithm may re-read the stream in passes, but at any
//! instant it may hold at most `n * k` graph edges, where `n` is the number of
//! vertices and `k >= 1` a space parameter. The number of passes over the
//! stream is the only cost metric.
//!
//! The crate provides:
//!
//! * core graph types and a rooted-tree representation ([`graph`]),
//! * pass-counting edge streams over memory or files ([`stream`]),
//! * an auditable storage ledger enforcing the `n * k` cap ([`budget`]),
//! * bookkeeping for unvisited components ([`forest`]),
//! * incremental DFS-tree maintenance under edge insertions ([`incremental`]),
//! * the streaming DFS algorithm families ([`algorithms`]),
//! * seeded graph generators ([`generators`]),
//! * a DFS-validity checker and a reference oracle ([`validation`]).
//!
//! Every vertex of the input graph is an integer in `0..n`. All algorithms root
//! their output at an artificial vertex `r` with id `n`, conceptually adjacent
//! to every real vertex; those root edges are not part of the stream and the
//! output tree always spans `{0, .., n}`.

#![forbid(unsafe_code)]
#![deny(rust_2018_idioms)]
#![warn(missing_docs)]

pub mod algorithms;
pub mod budget;
pub mod forest;
pub mod generators;
pub mod graph;
pub mod incremental;
pub mod stream;
pub mod validation;

pub use algorithms::{
    run, run_traced, AlgoConfig, AlgoError, Family, RunReport, Variant, ALGO_NAMES,
};
pub use budget::{BudgetError, BudgetLedger, TraceEvent};
pub use generators::{gen_gnm, gen_powerlaw, generate, GenError, GenModel, GenSpec};
pub use graph::{AdjacencyGraph, DfsTree, Edge, GraphError, VertexId};
pub use stream::{EdgeStream, StreamError};
pub use validation::{check_dfs, oracle_dfs, ValidityReport};
