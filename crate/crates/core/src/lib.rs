//! Convex completions of doubling metrics.
//!
//! Given a weighted graph or tree whose shortest-path metric is doubling,
//! this crate builds a nearby graph whose *convex closure* (every edge
//! viewed as a continuous segment) stays doubling, and checks the
//! finite consequences of that guarantee:
//!
//! * [`metric`] and [`doubling`]: finite metrics, greedy nets, exact and
//!   greedy doubling-constant estimates, packing lower bounds.
//! * [`net_tree`]: hierarchical net-trees over a rescaled metric.
//! * [`spanner`]: the bounded-degree `(1+eps)`-spanner with edge donation.
//! * [`closure`]: distances and geodesics in the convex closure, the
//!   long-edge audit and its packing witness.
//! * [`completion`]: exponential tails and edge lifting for trees.
//! * [`instances`]: generators and lower-bound certificates.
//! * [`io`]: the plain-text metric, graph and sidecar formats.

pub mod closure;
pub mod completion;
pub mod cover;
pub mod doubling;
pub mod epsilon;
pub mod error;
pub mod graph;
pub mod instances;
pub mod io;
pub mod metric;
pub mod net_tree;
pub mod spanner;
pub mod tol;

pub type PointId = usize;
pub type VertexId = usize;

pub use epsilon::Epsilon;
pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, WeightedGraph};
pub use metric::{shortest_path_metric, FiniteMetric};
