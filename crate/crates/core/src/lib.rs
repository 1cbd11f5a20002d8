//! QUBO formulations for the snake-in-the-box and coil-in-the-box problems,
//! together with the induced subgraph and maximum common induced subgraph
//! formulations they are built on.
//!
//! The crate is split along the pipeline a user walks through:
//!
//! * [`graphs`] builds hypercubes, paths, cycles and the coil host graph.
//! * [`qubo`] holds the sparse quadratic form and exact integer energies.
//! * [`formulations`] turns graph pairs into penalty QUBOs.
//! * [`solver`] minimizes a QUBO by simulated annealing or exhaustive
//!   Gray-code enumeration.
//! * [`decode`] maps bit vectors back to embeddings and checks them with
//!   plain graph predicates.
//! * [`oracle`] computes exact combinatorial baselines without any QUBO.
//! * [`cli`] wires the above into the `snakebox` binary.

pub mod cli;
pub mod decode;
pub mod error;
pub mod formulations;
pub mod graphs;
pub mod oracle;
pub mod qubo;
pub mod solver;
pub mod table;

pub use error::{Error, Result};
pub use graphs::{CitbHostGraph, Graph};
pub use qubo::{Assignment, LinearExpr, Qubo};
