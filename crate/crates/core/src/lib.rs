//! Deterministic low-space MPC simulation and arboricity-parameterized
//! symmetry breaking: degree reduction, MIS, maximal matching and coloring.

pub mod coloring;
pub mod config;
pub mod degred;
pub mod derand;
pub mod error;
pub mod graph;
pub mod hashing;
pub mod mismm;
pub mod mpc;
pub mod solution;
pub mod util;

pub use config::{BudgetMode, Constants, Mode, RunConfig};
pub use error::{Error, Result};
pub use graph::Graph;
pub use solution::{Kind, PartialSolution};
