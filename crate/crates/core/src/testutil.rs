//! Shared helpers for unit tests: seeded RNGs and random operators.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qmath::{CMat, Operator, SystemLayout};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cmat(d: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let m = random_cmat(d, rng);
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::new(layout, h).unwrap()
}

/// Random full-rank density matrix (Ginibre GG†, normalized).
pub fn random_density(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let g = random_cmat(d, rng);
    let p = &g * g.adjoint();
    let tr = p.trace();
    Operator::new(layout, p / tr).unwrap()
}

/// Random subnormalized state with trace uniform in (0.2, 1).
pub fn random_subnormalized(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let scale: f64 = rng.gen_range(0.2..1.0);
    let rho = random_density(layout, rng);
    rho.scale(Complex64::new(scale, 0.0))
}

/// Random unitary via QR with phase normalization (not Haar-weighted; use
/// `designs::haar_sample` where the measure matters).
pub fn random_unitary(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let g = random_cmat(d, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    Operator::new(layout, u).unwrap()
}
