//! girg-lab: generators and expansion diagnostics for geometric inhomogeneous
//! random graphs whose connection kernel uses the minimum component distance
//! (MCD) on the torus, plus an L-infinity Euclidean baseline.
//!
//! The crate is organized around a deterministic, seed-addressable random
//! tape: every weight, position, and edge coin is a pure function of
//! `(seed, purpose, ids)`. Because edge coins are addressed by the unordered
//! vertex pair, the naive quadratic sampler and the strip-bucketed sampler
//! produce bit-identical edge sets for the same parameters and seed.
//!
//! Modules:
//! - [`geometry`]: torus coordinates, MCD / L-infinity distances, ball volumes
//! - [`model`]: power-law weights and the connection kernel
//! - [`tape`]: the seed-addressable random tape
//! - [`sampler`]: naive and bucketed graph samplers
//! - [`graph`]: CSR graph, subgraph views, neighborhoods
//! - [`strips`]: strip index, strip spread, covering bounds
//! - [`expansion`]: expansion ratios, adversarial searches, spectral gap
//! - [`processes`]: lazy random walks, push rumors, SI spread
//! - [`config`], [`io`], [`experiments`]: experiment configs, file formats,
//!   and the experiment orchestrator behind the CLI

pub mod config;
pub mod error;
pub mod experiments;
pub mod expansion;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod model;
pub mod processes;
pub mod sampler;
pub mod strips;
pub mod tape;

/// Scalar type used by all graph plumbing, file formats, and experiments.
///
/// The pure math in [`geometry`] and [`model`] is generic over
/// [`num_traits::Float`]; everything downstream is pinned to `f64` so that
/// sampled graphs and emitted files are reproducible bit for bit.
pub type Real = f64;

/// Vertex identifier. Graphs are indexed densely from zero.
pub type VertexId = u32;

pub use error::{Error, Result};
pub use geometry::{Geometry, TorusPoint};
pub use graph::{Graph, SubgraphView};
pub use model::{ModelParams, VertexData};
pub use tape::RandomTape;
