//! Ground states of the focusing nonlinear Schrödinger energy on the
//! square-grid metric graph.
//!
//! The crate discretizes the grid `ℤ²` with unit edges (truncated to a window
//! with Dirichlet boundary vertices) by continuous piecewise-linear functions,
//! evaluates the energy `½∫|u'|² − (1/p)∫|u|^p` and the Gagliardo–Nirenberg
//! quotient exactly on that space, and provides
//!
//! * mass-constrained energy minimization and quotient maximization
//!   ([`minimize`]),
//! * the explicit test families with closed-form norms ([`testfuncs`]),
//! * symmetric rearrangement onto the real line ([`rearrange`]),
//! * phase-diagram sweeps over `(p, μ)` ([`sweep`]),
//! * CSV/JSON dumps of graph functions ([`io`]).

// `!(x > 0.0)` is how parameter checks reject NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functionals;
pub mod graph;
pub mod io;
pub mod minimize;
pub mod operators;
pub mod rearrange;
pub mod sampling;
pub mod segment;
pub mod sweep;
pub mod testfuncs;

pub use error::{Error, Result};
pub use graph::{build_grid, embed_edge_function, GraphFunction, GridGraph, GridSpec};
