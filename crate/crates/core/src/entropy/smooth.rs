use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{CMat, Operator};
use crate::sdpcore::{solve_sdp, Constraint, ObjectiveSense, SdpOptions, SdpProblem};

use super::{
    accept_solution, check_subnormalized_state, min_entropy, split_state, EntropyResult,
};

/// Certified lower bound on the ε-smooth min-entropy `H_min^ε(A|B)`.
///
/// Bisects over candidate entropies λ; each step asks, via one feasibility
/// program, whether some subnormalized ρ̃ within purified distance ε of ρ
/// satisfies `ρ̃ ⪯ 2^{-λ} I_A ⊗ σ` for a state σ. The best smoothing state
/// found is then re-certified exactly: the returned value is `H_min(A|B)` of
/// that state, a valid lower bound on the optimum, and the state itself is
/// returned with the purified-distance constraint checked post hoc.
pub fn smooth_min_entropy(rho: &Operator, a_labels: &[&str], eps: f64) -> Result<EntropyResult> {
    let tr_rho = check_subnormalized_state(rho)?;
    if eps < 0.0 || eps >= tr_rho.sqrt() {
        return Err(Error::Domain(format!(
            "smoothing radius ε = {eps} outside [0, √(tr ρ) = {:.6})",
            tr_rho.sqrt()
        )));
    }
    let base = min_entropy(rho, a_labels)?;
    if eps <= 1e-12 {
        return Ok(EntropyResult {
            smoothing_state: Some(rho.clone()),
            ..base
        });
    }

    let split = split_state(rho, a_labels)?;
    let original_order: Vec<&str> = rho.layout().labels();
    let fbar_target = (1.0 - eps * eps).sqrt();

    // support projection: a singular ρ (e.g. pure) would pin the fidelity
    // block's corner and leave the program without interior
    let (evals, evecs) = split.rho.herm_eigen();
    let lam_max = evals.iter().fold(0.0_f64, |a, &b| a.max(b));
    let keep: Vec<usize> = (0..evals.len())
        .filter(|&i| evals[i] > 1e-10 * lam_max)
        .collect();
    let d = split.rho.dim();
    let r = keep.len();
    let u_s = CMat::from_fn(d, r, |i, k| evecs[(i, keep[k])]);
    let r_s = u_s.adjoint() * split.rho.matrix() * &u_s;

    let mut lo = base.value;
    let mut hi = (split.d_a as f64).log2();
    let mut best: Option<CMat> = None;
    for _ in 0..40 {
        if hi - lo <= 1e-7 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match max_fidelity_at(&split.rho, &r_s, &u_s, split.d_b, tr_rho, mid) {
            Some((fbar, rt)) if fbar >= fbar_target - 1e-8 => {
                lo = mid;
                best = Some(rt);
            }
            _ => hi = mid,
        }
    }

    let candidate = match best {
        Some(rt) => {
            let raw = Operator::new(split.rho.layout().clone(), rt)?;
            let clipped = raw.herm_fn(|v| v.max(0.0));
            let tr = clipped.trace().re;
            let rt = if tr > 1.0 {
                clipped.scale(Complex64::new(1.0 / tr, 0.0))
            } else {
                clipped
            };
            let dist = Operator::purified_distance(&split.rho, &rt)?;
            if dist <= eps + 1e-6 {
                Some(rt)
            } else {
                None
            }
        }
        None => None,
    };
    match candidate {
        Some(rt) => {
            let cert = min_entropy(&rt, a_labels)?;
            if cert.value >= base.value {
                return Ok(EntropyResult {
                    smoothing_state: Some(rt.permute(&original_order)?),
                    ..cert
                });
            }
            Ok(EntropyResult {
                smoothing_state: Some(rho.clone()),
                ..base
            })
        }
        None => Ok(EntropyResult {
            smoothing_state: Some(rho.clone()),
            ..base
        }),
    }
}

/// Maximizes the generalized fidelity `F̄(ρ, ρ̃)` over subnormalized ρ̃ with
/// `ρ̃ ⪯ 2^{-λ} I_A ⊗ σ`, `tr σ = 1`. Returns the optimum and the optimal ρ̃,
/// or `None` when the program fails to solve.
fn max_fidelity_at(
    rho: &Operator,
    r_s: &CMat,
    u_s: &CMat,
    d_b: usize,
    tr_rho: f64,
    lambda: f64,
) -> Option<(f64, CMat)> {
    let d = rho.dim();
    let r = r_s.nrows();
    let scale = 2.0_f64.powf(-lambda);
    let with_tail = tr_rho < 1.0 - 1e-9;

    // blocks: fidelity block [[ρ|_supp, Y],[Y†, ρ̃]], domination slack,
    // σ, and the tail handling √((1−tr ρ)(1−tr ρ̃))
    let tail_dim = if with_tail { 2 } else { 1 };
    let mut p = SdpProblem::new(
        vec![r + d, d, d_b, tail_dim],
        ObjectiveSense::Maximize,
    )
    .ok()?;

    // objective Re tr(Y U_s) (+ the tail's off-diagonal term)
    for k in 0..r {
        for i in 0..d {
            let v = u_s[(i, k)].conj() * 0.5;
            if v.norm_sqr() > 0.0 {
                p.add_cost_entry(0, k, r + i, v);
            }
        }
    }
    if with_tail {
        p.add_cost_entry(3, 0, 1, Complex64::new(0.5, 0.0));
    }

    // ρ restricted to its support is fixed
    for a in 0..r {
        for b in a..r {
            p.add_constraint(Constraint::re_entry(0, a, b), r_s[(a, b)].re)
                .ok()?;
            if a != b {
                p.add_constraint(Constraint::im_entry(0, a, b), r_s[(a, b)].im)
                    .ok()?;
            }
        }
    }
    // 2^{-λ}(I_A⊗σ) − ρ̃ − S = 0 entrywise
    for pr in 0..d {
        for pc in pr..d {
            let (a, i) = (pr / d_b, pr % d_b);
            let (b, j) = (pc / d_b, pc % d_b);
            let mut con = Constraint::re_entry(0, r + pr, r + pc).scaled(-1.0);
            con.extend_with(&Constraint::re_entry(1, pr, pc).scaled(-1.0));
            if a == b {
                con.extend_with(&Constraint::re_entry(2, i, j).scaled(scale));
            }
            p.add_constraint(con, 0.0).ok()?;
            if pr != pc {
                let mut con = Constraint::im_entry(0, r + pr, r + pc).scaled(-1.0);
                con.extend_with(&Constraint::im_entry(1, pr, pc).scaled(-1.0));
                if a == b {
                    con.extend_with(&Constraint::im_entry(2, i, j).scaled(scale));
                }
                p.add_constraint(con, 0.0).ok()?;
            }
        }
    }
    // σ is a state
    let mut tr_sigma = Constraint::new();
    for i in 0..d_b {
        tr_sigma.push(2, i, i, Complex64::new(1.0, 0.0));
    }
    p.add_constraint(tr_sigma, 1.0).ok()?;
    // the tail's corners are 1 − tr ρ and 1 − tr ρ̃
    let gb = tail_dim - 1;
    if with_tail {
        p.add_constraint(Constraint::re_entry(3, 0, 0), 1.0 - tr_rho)
            .ok()?;
    }
    let mut b_tie = Constraint::re_entry(3, gb, gb);
    for pr in 0..d {
        b_tie.extend_with(&Constraint::re_entry(0, r + pr, r + pr));
    }
    p.add_constraint(b_tie, 1.0).ok()?;

    let sol = solve_sdp(&p, &SdpOptions::default()).ok()?;
    accept_solution(&sol, "fidelity feasibility").ok()?;
    let rt = CMat::from_fn(d, d, |pr, pc| sol.x[0][(r + pr, r + pc)]);
    Some((sol.primal_value, rt))
}
