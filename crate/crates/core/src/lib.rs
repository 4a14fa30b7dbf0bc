//! Tight CHSH bounds for two-qubit states when both parties are restricted to
//! local vertical (anti-commuting) measurements.
//!
//! - [`linalg`]: fixed-size complex matrices and a Hermitian Jacobi eigensolver.
//! - [`states`]: pure and mixed two-qubit states, Schmidt form, the λ-family.
//! - [`bell`]: Bell operators, the canonical vertical operator `W`, Tsirelson.
//! - [`entanglement`]: entropy, concurrence, Horodecki maximum.
//! - [`optimizer`]: the bound itself, closed-form and numeric, and sweeps.
//! - [`io`]: JSON state files and CSV/JSON tables.
//! - [`verify`]: randomized property suites behind the `verify` subcommand.
//! - [`cli`]: command-line front end.

pub mod bell;
pub mod cli;
pub mod entanglement;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod states;
pub mod verify;

pub use exec::Execution;
pub use optimizer::{maximize_bound, BoundResult, OptimizerConfig};
