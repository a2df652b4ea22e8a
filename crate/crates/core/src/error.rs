use thiserror::Error;

/// Errors surfaced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not converge: requested tol {requested_tol}, reached {reached_err} after {subdivisions} subdivisions on [{a}, {b}]")]
    NumericalFailure {
        requested_tol: f64,
        reached_err: f64,
        subdivisions: usize,
        a: f64,
        b: f64,
    },
    #[error("degenerate family: Gram matrix condition number {cond:.3e} exceeds {limit:.3e}")]
    DegenerateFamily { cond: f64, limit: f64 },
    #[error("overlap matrix is singular or ill-conditioned; the set does not approximate the hole basis")]
    NonApproximatingSet,
    #[error("eigensolver failed to converge after {iterations} sweeps (off-diagonal residual {residual:.3e})")]
    EigenFailure { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, CfsError>;
