//! Centralised numerical tolerances.
//!
//! Every tolerance used by the crate lives here with its rationale, so that
//! the relationships between them (an assertion tolerance must dominate the
//! accumulated arithmetic error of what it checks) are visible in one place.
//! Tests assert the orderings we rely on.

/// Residual below which a matrix counts as Hermitian / idempotent / correctly
/// normalised.  Projector entries are exact or few-ulp values; anything above
/// this indicates a malformed input rather than roundoff.
pub const PROJECTOR: f64 = 1e-12;

/// Frobenius norm below which two projectors count as commuting.  Commutators
/// of genuinely commuting clauses accumulate only a few ulps even after
/// embedding; genuinely non-commuting pairs sit at Θ(1).
pub const COMMUTATION: f64 = 1e-10;

/// State-vector normalisation slack.
pub const STATE_NORM: f64 = 1e-10;

/// Residual ‖Hv − λv‖ accepted from the dense eigensolver.  The
/// tridiagonalisation residual grows mildly with dimension (a few 1e-11 is
/// routine by dimension 16 on operators of unit norm); a genuinely failed
/// factorisation sits at Θ(1), so this keeps orders of margin on both sides.
pub const EIG_DENSE: f64 = 1e-9;

/// Residual ‖Hv − λv‖ accepted from the iterative eigensolver (default).
pub const EIG_ITER: f64 = 1e-8;

/// Agreement required between a matrix-free apply and its dense oracle.
pub const APPLY_VS_DENSE: f64 = 1e-10;

/// Agreement required between two exact-enumeration implementations of the
/// same quantity (e.g. the walk transfer-matrix apply against the
/// walk-by-walk streaming sum).
pub const ORACLE_EQUALITY: f64 = 1e-12;

/// Slack for exact measurement/moment identities (probabilities, expectation
/// identities): dominated by branching-tree arithmetic over ≤ 2^12 leaves.
pub const MOMENT_IDENTITY: f64 = 1e-9;

/// Slack granted to analytic inequalities checked on exactly-enumerated
/// quantities (tail bounds, second-moment bounds).
pub const INEQUALITY: f64 = 1e-9;

/// Slack granted to the composite completeness/soundness bound checks, which
/// stack an eigensolve on top of several enumerations.
pub const BOUND_CHECK: f64 = 1e-7;

/// Distributions produced by measurement branching must sum to one within
/// this.
pub const DISTRIBUTION_SUM: f64 = 1e-10;

/// Branch probabilities below this are pruned from measurement trees; pruned
/// mass is recorded, never silently dropped.
pub const BRANCH_PRUNE: f64 = 1e-14;

/// Eigenvalues within this of the spectral-split threshold α trigger a
/// boundary warning (the split itself uses [`SPLIT_GUARD`]).
pub const SPLIT_WARN: f64 = 1e-9;

/// An eigenvalue λ is classified as "high" when λ ≥ α − `SPLIT_GUARD`,
/// protecting the classification against eigensolver jitter at exactly λ = α.
pub const SPLIT_GUARD: f64 = 1e-12;

/// Slack for the monotonicity of violation statistics under register-subset
/// restriction (restricting can only discard violations).
pub const MONOTONE: f64 = 1e-10;

/// Agreement required when two commuting measurements are performed in either
/// order: the joint outcome laws must coincide within this.
pub const ORDER_INVARIANCE: f64 = 1e-10;

/// Slack for the cross-term bound relating pair energies to single-register
/// energies under low-energy conditioning; looser than [`INEQUALITY`] because
/// both sides stack nested measurement branchings.
pub const DECOUPLING: f64 = 1e-8;

/// Imaginary residual allowed when a real expectation value is extracted from
/// a complex quadratic form.
pub const IMAG_RESIDUAL: f64 = 1e-12;

/// Unitarity residual ‖U†U − I‖ accepted for assembled circuits.
pub const UNITARITY: f64 = 1e-11;

/// Agreement between a circuit's action and its closed-form target.
pub const CIRCUIT_ACTION: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orderings_hold() {
        // Exact-oracle agreement is the strictest; composite bound checks the
        // loosest.  If these orderings break, assertion slacks elsewhere stop
        // making sense.
        assert!(ORACLE_EQUALITY < APPLY_VS_DENSE);
        assert!(PROJECTOR < COMMUTATION);
        assert!(EIG_DENSE < EIG_ITER);
        assert!(APPLY_VS_DENSE < BOUND_CHECK);
        assert!(MOMENT_IDENTITY < BOUND_CHECK);
        assert!(BRANCH_PRUNE < DISTRIBUTION_SUM);
        assert!(SPLIT_GUARD < SPLIT_WARN);
        assert!(INEQUALITY < DECOUPLING && DECOUPLING < BOUND_CHECK);
    }
}
