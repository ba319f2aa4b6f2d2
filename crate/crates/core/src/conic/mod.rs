//! Small dense conic optimization engine.
//!
//! Problems are stated over real scalar variables with Hermitian PSD,
//! sign and equality constraints ([`ConicProblem`]). Equalities are
//! eliminated, Hermitian blocks are real-embedded, and the resulting LMI is
//! solved by a primal-dual interior-point method that returns either an
//! optimal primal/dual pair or a Farkas certificate of infeasibility.

mod bisect;
mod expr;
mod ipm;
mod problem;
mod witness;

pub use bisect::{bisect_quasiconvex, bisect_threshold, BisectionResult};
pub use expr::{HermExpr, ScalarExpr, SparseHerm, VarId};
pub use problem::{
    CertificateCheck, ConicProblem, ConicSolution, Constraint, ConstraintBody, ConstraintId, Multiplier,
    SolverConfig, Status,
};
pub use witness::{verify_dual_witness, WitnessCheck, WitnessRoute};

/// Bisection brackets beyond this are reported as +∞.
pub const INFINITY_THRESHOLD: f64 = 1152921504606846976.0; // 2^60
