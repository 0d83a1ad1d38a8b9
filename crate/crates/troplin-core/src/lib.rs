//! Exact arithmetic for metric graphs, divisors, and piecewise linear functions.
//!
//! Everything here works over arbitrary-precision rationals. A [`graph::MetricGraph`]
//! is a finite connected multigraph with positive rational edge lengths, points on it
//! are addressed as (edge, offset) pairs, and [`plf::PLFunction`] models continuous
//! piecewise linear functions with integer slopes. The [`reduced`] module computes
//! base-point reduced representatives of divisor classes by exact chip-firing.

pub mod divisor;
pub mod error;
pub mod graph;
pub mod plf;
pub mod rat;
pub mod reduced;
pub mod subgraph;
pub mod wire;

pub use divisor::Divisor;
pub use error::CoreError;
pub use graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
pub use plf::PLFunction;
pub use rat::Q;
pub use subgraph::Subgraph;
