//! Error type shared across the crate.
//!
//! Every fallible operation returns [`Result`]; variants carry enough context
//! to name the offending object (term indices, layer, qubit, …) so that a
//! caller can print the message verbatim.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while building or verifying amplified Hamiltonians.
#[derive(Debug, Error)]
pub enum Error {
    /// A local matrix failed the projector residual checks.
    #[error("term {index}: not a projector: {reason}")]
    NotAProjector { index: usize, reason: String },

    /// A structural problem in a Hamiltonian description (supports, weights,
    /// layer indices, dimensions).
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    /// Two projectors placed in the same layer do not commute.
    #[error(
        "layer {layer}: terms {a} and {b} do not commute \
         (commutator Frobenius norm {norm:.6e}); move one to another layer"
    )]
    NonCommutingLayer {
        layer: usize,
        a: usize,
        b: usize,
        norm: f64,
    },

    /// No equitable coloring exists with the requested number of classes.
    #[error(
        "no equitable coloring with {requested} classes found \
         (max degree {max_degree}); retry with {suggested} classes"
    )]
    ColoringInfeasible {
        requested: usize,
        max_degree: usize,
        suggested: usize,
    },

    /// A regular-graph description is malformed (rotation map not an
    /// involution, port out of range, …).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// A graph family cannot be instantiated at the requested size.
    #[error("family {family} needs at least {min} vertices, got {m}")]
    FamilyTooSmall {
        family: String,
        min: usize,
        m: usize,
    },

    /// Walk enumeration would overflow the supported count range.
    #[error("walk count m*d^(L-1) = {m}*{d}^{exp} exceeds 2^63; refusing to enumerate")]
    WalkCountOverflow { m: usize, d: usize, exp: usize },

    /// An operation needs more qubits than the configured budget allows.
    #[error("operation needs {needed} qubits but the budget is {budget}")]
    QubitBudget { needed: usize, budget: usize },

    /// A dense-matrix operation was requested above its size cap.
    #[error("dense operation on {qubits} qubits exceeds the cap of {cap} qubits")]
    DenseTooLarge { qubits: usize, cap: usize },

    /// The iterative eigensolver did not reach the residual tolerance.
    #[error(
        "eigensolver did not converge: residual {residual:.3e} > tol {tol:.3e} \
         after {iterations} iterations (dim {dim})"
    )]
    NoConvergence {
        residual: f64,
        tol: f64,
        iterations: usize,
        dim: usize,
    },

    /// Generic invalid-parameter error.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
