//! Exact computations on the torus-invariant prime ideals of the quantum
//! matrix algebra `O_q(M_n)`.
//!
//! The ideals are indexed by Cauchon diagrams (unions of truncated rows and
//! columns of the `n × n` grid). For each diagram the restoration algorithm
//! rebuilds the images `y_{i,α}` of the canonical generators inside a quantum
//! torus, where quantum minors can be evaluated and compared with zero
//! exactly. This gives an independent, computational check of the closed
//! form `(t!·S(n+1,t+1))²` for the number of rank-`t` invariant primes.
//!
//! Module map:
//! - [`qcoeff`]: the coefficient ring `ℤ[q, q⁻¹]`.
//! - [`qtorus`]: the quantum torus on `n²` generators and the q-quantum
//!   relation checkers.
//! - [`diagrams`]: the set `W` of Cauchon diagrams and the `w_r`, `w_{r,γ}`
//!   families.
//! - [`restoration`]: the deleting-derivations algorithm and its inverse.
//! - [`qminors`]: quantum minors and rank classification.
//! - [`counting`]: Stirling numbers, poly-Bernoulli numbers and the closed
//!   forms the enumerations are checked against.

pub mod counting;
pub mod diagrams;
pub mod error;
pub mod qcoeff;
pub mod qminors;
pub mod qtorus;
pub mod restoration;

pub use diagrams::{Diagram, GammaVector, Grid, RVector};
pub use error::{Error, Result};
pub use qcoeff::QLaurent;
pub use qminors::{ClassificationRecord, MinorIndex, MinorTable};
pub use qtorus::{Monomial, Position, RelationReport, TorusElement, TorusPresentation};
pub use restoration::{QuantumMatrix, Step, StepIndex};

/// Largest grid size accepted by the combinatorial routines.
pub const MAX_GRID: usize = 6;
/// Largest grid size accepted by the symbolic (restoration / minor) routines.
pub const MAX_SYMBOLIC_GRID: usize = 4;
