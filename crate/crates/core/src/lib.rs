//! The dimer model on the graph `G_n` whose perfect matchings are the
//! totally symmetric self-complementary plane partitions of order `n + 1`.
//!
//! Exact rational arithmetic is used everywhere except in [`limit_shape`]
//! and the sampler's statistics.

pub mod closed_form;
pub mod combinatorics;
pub mod error;
pub mod graph;
pub mod identities;
pub mod limit_shape;
pub mod linalg;
pub mod rational;
pub mod recurrence;
pub mod registry;
pub mod render;
pub mod sampler;
pub mod series;
pub mod statistics;
pub mod verify;

pub use closed_form::ClosedForm;
pub use error::{Error, Result};
pub use graph::{b_vertex, enumerate_matchings, MatchingConfig, TsscppGraph, VertexCoord};
pub use linalg::{invert, kasteleyn_matrix, pfaffian, Matrix};
pub use rational::BigRational;
