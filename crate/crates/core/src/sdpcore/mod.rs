//! Dense semidefinite programming over complex Hermitian matrices.
//!
//! Standard form: optimize `tr(C X)` subject to `tr(A_i X) = b_i` and
//! `X ⪰ 0`, where `X` is block diagonal with dense Hermitian blocks. The
//! solver is a primal-dual interior-point method with Nesterov–Todd scaling,
//! a Mehrotra predictor-corrector and a dense Cholesky factorization of the
//! Schur complement. Complex problems are solved natively; a doubled real
//! embedding is available behind an option as a cross-check path.

mod diamond;
mod problem;
mod solver;

pub use diamond::diamond_norm;
pub use problem::{Constraint, ObjectiveSense, SdpProblem};
pub use solver::{solve_sdp, SdpOptions, SdpSolution, SdpStatus};

/// Hard guard on the Choi dimension accepted by the diamond-norm program.
pub const DIAMOND_CHOI_GUARD: usize = 1024;

/// Hard guard on the per-block dimension of the interior-point solver.
pub const BLOCK_DIM_GUARD: usize = 512;
