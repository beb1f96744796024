//! Dense operator algebra, one-shot entropies and decoupling experiments
//! for unitary approximate two-designs.
//!
//! The crate is organized around a handful of subsystems:
//!
//! - [`qmath`] — complex operator algebra with named tensor factors:
//!   tensor products, partial traces, Schatten norms, fidelities and the
//!   Choi–Jamiołkowski calculus.
//! - [`sdpcore`] — a small dense primal-dual interior-point solver for
//!   complex Hermitian semidefinite programs, plus the diamond-norm program.
//! - [`entropy`] — conditional min-entropy, smooth min-entropy and
//!   conditional von Neumann entropy.
//! - [`designs`] — Haar sampling, two-fold twirls, unitary ensembles and
//!   design-quality (δ) estimation.
//! - [`circuits`] — the random two-qubit-gate circuit model and depth-sweep
//!   design-quality estimation.
//! - [`decouple`] — decoupling bounds, exact identities and empirical
//!   decoupling experiments.
//! - [`report`] — experiment configuration, reports, CSV/JSON/SVG emitters
//!   and the built-in fixtures used by the command line runner.

// links the system LAPACK used for large Hermitian eigendecompositions
use lapack_src as _;

pub mod circuits;
pub mod decouple;
pub mod designs;
pub mod entropy;
pub mod error;
pub mod qmath;
pub mod report;
pub mod sdpcore;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
