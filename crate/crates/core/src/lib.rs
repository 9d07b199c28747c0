//! Topology, degree-distribution and random-failure analysis of high-voltage
//! power grid graphs.
//!
//! The pipeline reads one edge list per network ([`graph`]), computes the
//! topological metric suite ([`metrics`]), fits exponential degree-decay
//! constants over four graph variants ([`degree`]), runs seeded Monte Carlo
//! node and edge removals ([`percolation`]) and ranks networks by
//! standardised composite performance ([`scoring`]).

pub mod cli;
mod csr;
pub mod degree;
pub mod error;
pub mod graph;
pub mod histogram;
pub mod metrics;
pub mod percolation;
pub mod report;
pub mod scoring;
pub mod seed;

pub use error::{GridError, Result};
pub use graph::{
    connected_components, derive_variant, parse_edge_list, write_edge_list, GridGraph, Variant, VariantSpec,
};
