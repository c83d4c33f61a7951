//! Decidable pieces of the value-distribution arguments: truncated counting functions, order tables,
//! the order-inequality certifier, Vandermonde forcing systems, interpolation feasibility and
//! auxiliary plane curves.

mod certify;
mod counting;
mod curves;
mod forcing;
mod interp;

pub use certify::{certify_inequalities, inventory, sweep, CertificateReport, Inequality, InequalityReport, WITNESS_CAP};
pub use counting::{
    counting_function, subspace_count, truncated_count, Atom, CountingValue, Divisor, DivisorPoint, Level, OrderTable,
};
pub use curves::{conic_fit, degenerate_curve, line_through, second_point_on_line, Conic};
pub use forcing::{vandermonde_forcing, Forcing, ForcingReport, ForcingSystem};
pub use interp::{gap_quadratic, interpolation_search, relation1, relation2_gap, Interpolation, MAX_M};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NevanError {
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("unknown preimage label {0:?}")]
    UnknownLabel(String),
    #[error("bad λ values: {0}")]
    BadLambdas(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("points coincide projectively")]
    CoincidentPoints,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
