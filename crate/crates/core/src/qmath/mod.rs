//! Dense complex operator algebra with named tensor factors.
//!
//! Operators carry a [`SystemLayout`] describing the tensor factorization of
//! the underlying Hilbert space, so partial traces and channel applications
//! can be addressed by subsystem label instead of raw index arithmetic.
//!
//! Conventions:
//! - the maximally entangled state is normalized to trace 1,
//!   `|Φ⟩ = Σ_i |ii⟩/√d`, so Choi matrices of trace-preserving completely
//!   positive maps are states;
//! - internal map-matrix representations use column-stacking vectorization.

mod channel;
mod layout;
mod operator;
mod serialize;

pub use channel::Channel;
pub use layout::SystemLayout;
pub use operator::{Operator, SchattenP};
pub use serialize::OperatorJson;

use num_complex::Complex64;

pub type CMat = nalgebra::DMatrix<Complex64>;

/// Default absolute tolerance for Hermiticity / PSD checks on eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues below this magnitude are clipped to zero in PSD square roots.
pub const PSD_CLIP: f64 = -1e-12;

/// Eigenvalue cutoff for pseudo-inverse square roots.
pub const PINV_CUTOFF: f64 = 1e-10;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigenvalues of a Hermitian matrix via LAPACK `zheev`, ascending.
///
/// Orders of magnitude faster than the pure-Rust path for dimensions in the
/// thousands; values only, no vectors.
pub(crate) fn herm_eigenvalues_lapack(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let ni = n as i32;
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    let mut w = vec![0.0_f64; n];
    let mut rwork = vec![0.0_f64; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0;
    let mut query = [Complex64::new(0.0, 0.0)];
    unsafe {
        lapack::zheev(b'N', b'L', ni, &mut a, ni, &mut w, &mut query, -1, &mut rwork, &mut info);
    }
    assert_eq!(info, 0, "zheev workspace query failed");
    let lwork = query[0].re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        lapack::zheev(b'N', b'L', ni, &mut a, ni, &mut w, &mut work, lwork, &mut rwork, &mut info);
    }
    assert_eq!(info, 0, "zheev failed to converge");
    w
}

/// Decomposes a flat index into per-factor indices for the given dims
/// (row-major: the first factor is the most significant).
pub(crate) fn split_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Inverse of [`split_index`].
pub(crate) fn join_index(parts: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (p, d) in parts.iter().zip(dims) {
        idx = idx * d + p;
    }
    idx
}
