use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{CMat, Channel};

use super::problem::{Constraint, ObjectiveSense, SdpProblem};
use super::solver::{solve_sdp, SdpOptions, SdpStatus};
use super::DIAMOND_CHOI_GUARD;

/// Diamond norm of a Hermiticity-preserving map.
///
/// Solves max Re tr(J† X) over block matrices
/// `[[ρ₀⊗I, X], [X†, ρ₁⊗I]] ⪰ 0` with unit-trace ρ₀, ρ₁, where `J` is the
/// unnormalized Choi matrix on `in ⊗ out`; the optimum equals `‖T‖_⋄`.
pub fn diamond_norm(t: &Channel) -> Result<f64> {
    if !t.is_hermiticity_preserving(1e-9) {
        return Err(Error::Domain(
            "diamond norm requires a Hermiticity-preserving map".into(),
        ));
    }
    let d_in = t.in_layout().total_dim();
    let d_out = t.out_layout().total_dim();
    let d = d_in * d_out;
    if d > DIAMOND_CHOI_GUARD {
        return Err(Error::Size(format!(
            "Choi dimension {d} exceeds guard {DIAMOND_CHOI_GUARD}; \
             use the Choi trace-norm bounds in `designs` instead"
        )));
    }

    // J[(i,o1),(j,o2)] = T(E_ij)[o1,o2] = d_in · ω[(o1,i),(o2,j)]
    let omega = t.to_choi();
    let om = omega.matrix();
    let scale = Complex64::new(d_in as f64, 0.0);
    let j_mat = CMat::from_fn(d, d, |r, c| {
        let (i, o1) = (r / d_out, r % d_out);
        let (jj, o2) = (c / d_out, c % d_out);
        scale * om[(o1 * d_in + i, o2 * d_in + jj)]
    });

    // single PSD block of dimension 2d; index (s, i, o) ↦ s·d + i·d_out + o
    let idx = |s: usize, i: usize, o: usize| s * d + i * d_out + o;
    let mut p = SdpProblem::new(vec![2 * d], ObjectiveSense::Maximize)?;

    // objective ½[[0, J],[J†, 0]], so tr(C M) = Re tr(J† X)
    let mut cost = CMat::zeros(2 * d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            cost[(r, d + c)] = j_mat[(r, c)] * Complex64::new(0.5, 0.0);
            cost[(d + c, r)] = j_mat[(r, c)].conj() * Complex64::new(0.5, 0.0);
        }
    }
    p.set_cost_block(0, cost)?;

    // each diagonal corner must equal ρ ⊗ I with tr ρ = 1
    for s in 0..2 {
        for i in 0..d_in {
            for jj in i..d_in {
                for o1 in 0..d_out {
                    for o2 in 0..d_out {
                        let r = idx(s, i, o1);
                        let c = idx(s, jj, o2);
                        if r > c {
                            continue;
                        }
                        if o1 != o2 {
                            // off the ⊗I pattern: entry vanishes
                            p.add_constraint(Constraint::re_entry(0, r, c), 0.0)?;
                            p.add_constraint(Constraint::im_entry(0, r, c), 0.0)?;
                        } else if o1 > 0 {
                            // tied to the o = 0 representative
                            let r0 = idx(s, i, 0);
                            let c0 = idx(s, jj, 0);
                            let mut a = Constraint::re_entry(0, r, c);
                            a.extend_with(&Constraint::re_entry(0, r0, c0).scaled(-1.0));
                            p.add_constraint(a, 0.0)?;
                            if i != jj {
                                let mut a = Constraint::im_entry(0, r, c);
                                a.extend_with(&Constraint::im_entry(0, r0, c0).scaled(-1.0));
                                p.add_constraint(a, 0.0)?;
                            }
                        }
                    }
                }
            }
        }
        // tr(ρ ⊗ I) = d_out
        let mut tr = Constraint::new();
        for i in 0..d_in {
            for o in 0..d_out {
                tr.push(0, idx(s, i, o), idx(s, i, o), Complex64::new(1.0, 0.0));
            }
        }
        p.add_constraint(tr, d_out as f64)?;
    }

    let opts = SdpOptions {
        gap_tol: 1e-8,
        ..SdpOptions::default()
    };
    let sol = solve_sdp(&p, &opts)?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol.primal_value.max(0.0)),
        SdpStatus::MaxIter if sol.gap <= 1e-6 && sol.primal_infeas <= 1e-6 => {
            Ok(sol.primal_value.max(0.0))
        }
        _ => Err(Error::Numeric(format!(
            "diamond-norm program did not converge (status {:?}, gap {:.2e})",
            sol.status, sol.gap
        ))),
    }
}
