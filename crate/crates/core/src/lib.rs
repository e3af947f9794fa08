//! Active learning of edge signs in signed graphs.
//!
//! The learners in this crate pick a query set of edges whose labels are
//! revealed by an oracle and predict every remaining edge by the sign product
//! along a path of queried edges (a *circuit*). Three query-selection
//! strategies are provided:
//!
//! * [`treecutter`]: cuts a breadth-first spanning tree into treelets of
//!   height `k` and connects treelet pairs with one queried edge each.
//! * [`starmaker`]: partitions the graph into stars centered on
//!   maximum-degree nodes.
//! * [`treeletstar`]: contracts treelets into a quotient graph and runs the
//!   star decomposition on that.
//!
//! Ground-truth generation lives in [`labeling`], experiment plumbing in
//! [`harness`].

pub mod error;
pub mod graph;
pub mod harness;
pub mod labeling;
pub mod oracle;
pub mod plan;
pub mod sign;
pub mod starmaker;
pub mod treecutter;
pub mod treeletstar;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, NodeId, SignedGraph};
pub use oracle::{CountingOracle, LabelOracle};
pub use plan::{EdgePartition, PredictionRecord, QueryPlan};
pub use sign::Sign;
