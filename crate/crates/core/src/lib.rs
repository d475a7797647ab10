//! Distillation of expert knowledge into nested low-rank levels, and the
//! allocation of those levels across a network of agents.
//!
//! - [`distiller`] turns a parameter delta into nested factor pairs and
//!   reports the residual loss of every level;
//! - [`allocation`] scores storage, exploitation and transmission policies
//!   and derives the best exploitation/transmission for a fixed storage;
//! - [`solvers`] search the storage space (exhaustive, greedy, genetic and
//!   the store-everything baseline);
//! - [`netgen`] draws random normalized network instances.

pub mod allocation;
pub mod distiller;
pub mod model;
pub mod netgen;
pub mod solvers;

pub use model::{AllocationPolicy, MetricsReport, ModelError, NetworkInstance, SolveResult, Violation, Weights};
