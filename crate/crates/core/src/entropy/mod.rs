//! One-shot and asymptotic conditional entropies.
//!
//! Conditional min-entropy `H_min(A|B)` is computed from the program
//! minimize `tr σ_B` subject to `I_A ⊗ σ_B ⪰ ρ_AB`, smooth min-entropy as a
//! certified lower bound obtained by bisection over entropy targets with a
//! fidelity-constrained feasibility program, and the conditional von Neumann
//! entropy spectrally. All entropies are in bits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{CMat, Operator, SystemLayout};
use crate::sdpcore::{
    solve_sdp, Constraint, ObjectiveSense, SdpOptions, SdpProblem, SdpSolution, SdpStatus,
    BLOCK_DIM_GUARD,
};

mod smooth;
#[cfg(test)]
mod tests;

pub use smooth::smooth_min_entropy;

/// Outcome of a one-shot entropy computation.
#[derive(Debug, Clone)]
pub struct EntropyResult {
    /// Entropy in bits.
    pub value: f64,
    /// The normalized conditioning state σ_B achieving the optimum.
    pub optimizer_sigma: Operator,
    /// Slack of the trace certificate: `2^{-value} − tr[((I⊗σ^{-1/2})ρ)²]/tr ρ`;
    /// nonnegative up to solver tolerance.
    pub certificate_gap: f64,
    /// Smoothing state ρ̃ realizing a smooth-entropy lower bound.
    pub smoothing_state: Option<Operator>,
}

/// ρ permuted to A-then-B factor order, plus the split dimensions.
pub(crate) struct Split {
    pub rho: Operator,
    pub d_a: usize,
    pub d_b: usize,
    pub b_layout: SystemLayout,
}

pub(crate) fn split_state(rho: &Operator, a_labels: &[&str]) -> Result<Split> {
    let layout = rho.layout();
    for l in a_labels {
        layout.position(l)?;
    }
    let b_labels: Vec<&str> = layout
        .labels()
        .into_iter()
        .filter(|l| !a_labels.contains(l))
        .collect();
    let order: Vec<&str> = a_labels.iter().copied().chain(b_labels.clone()).collect();
    let rho = rho.permute(&order)?;
    let d_a = layout.dim_of_all(a_labels)?;
    let d_b = layout.dim_of_all(&b_labels)?;
    let b_layout = layout.select(&b_labels)?;
    Ok(Split {
        rho,
        d_a,
        d_b,
        b_layout,
    })
}

fn check_subnormalized_state(rho: &Operator) -> Result<f64> {
    if !rho.is_hermitian(1e-9) || !rho.is_psd(1e-9) {
        return Err(Error::Domain(
            "entropy input must be Hermitian positive semidefinite".into(),
        ));
    }
    let tr = rho.trace().re;
    if tr <= 1e-12 {
        return Err(Error::Domain("entropy input has zero trace".into()));
    }
    if !rho.is_subnormalized(1e-9) {
        return Err(Error::Domain("entropy input must be subnormalized".into()));
    }
    Ok(tr)
}

/// Adds the entrywise constraints `coupling − S = ρ` on the slack block,
/// where the coupling is `I_A ⊗ σ` expressed through the σ block.
fn add_domination_constraints(
    p: &mut SdpProblem,
    rho: &CMat,
    d_b: usize,
    sigma_block: usize,
    slack_block: usize,
) -> Result<()> {
    let d = rho.nrows();
    for r in 0..d {
        for c in r..d {
            let (a, i) = (r / d_b, r % d_b);
            let (b, j) = (c / d_b, c % d_b);
            let mut con = Constraint::re_entry(slack_block, r, c).scaled(-1.0);
            if a == b {
                con.extend_with(&Constraint::re_entry(sigma_block, i, j));
            }
            p.add_constraint(con, rho[(r, c)].re)?;
            if r != c {
                let mut con = Constraint::im_entry(slack_block, r, c).scaled(-1.0);
                if a == b {
                    con.extend_with(&Constraint::im_entry(sigma_block, i, j));
                }
                p.add_constraint(con, rho[(r, c)].im)?;
            }
        }
    }
    Ok(())
}

pub(crate) fn accept_solution(sol: &SdpSolution, what: &str) -> Result<()> {
    let near_optimal = sol.gap <= 1e-6 && sol.primal_infeas <= 1e-6 && sol.dual_infeas <= 1e-6;
    match sol.status {
        SdpStatus::Optimal => Ok(()),
        SdpStatus::MaxIter if near_optimal => Ok(()),
        _ => Err(Error::Numeric(format!(
            "{what} program did not converge (status {:?}, gap {:.2e})",
            sol.status, sol.gap
        ))),
    }
}

/// Conditional min-entropy `H_min(A|B)` of a subnormalized state, in bits.
///
/// `a_labels` names the conditioned-on-B part A; the remaining factors form
/// B. Returns the optimal value together with the normalized optimizer σ_B
/// and the trace-certificate slack.
pub fn min_entropy(rho: &Operator, a_labels: &[&str]) -> Result<EntropyResult> {
    let tr_rho = check_subnormalized_state(rho)?;
    let split = split_state(rho, a_labels)?;
    let d = split.rho.dim();
    if d > BLOCK_DIM_GUARD {
        return Err(Error::Size(format!(
            "state dimension {d} exceeds solver guard {BLOCK_DIM_GUARD}"
        )));
    }

    let mut p = SdpProblem::new(vec![split.d_b, d], ObjectiveSense::Minimize)?;
    p.set_cost_block(0, CMat::identity(split.d_b, split.d_b))?;
    add_domination_constraints(&mut p, split.rho.matrix(), split.d_b, 0, 1)?;

    let sol = solve_sdp(&p, &SdpOptions::default())?;
    accept_solution(&sol, "min-entropy")?;

    let opt = sol.primal_value.max(1e-300);
    let value = -opt.log2();
    let sigma_hat = Operator::new(split.b_layout.clone(), sol.x[0].clone())?;
    let sigma = normalize_psd(&sigma_hat)?;
    let certificate_gap = opt - trace_certificate(&split.rho, &sigma, tr_rho)?;
    Ok(EntropyResult {
        value,
        optimizer_sigma: sigma,
        certificate_gap,
        smoothing_state: None,
    })
}

/// Clips tiny negative eigenvalues and scales to unit trace.
pub(crate) fn normalize_psd(op: &Operator) -> Result<Operator> {
    let clipped = op.herm_fn(|v| v.max(0.0));
    let tr = clipped.trace().re;
    if tr <= 0.0 {
        return Err(Error::Numeric("optimizer state has zero trace".into()));
    }
    Ok(clipped.scale(Complex64::new(1.0 / tr, 0.0)))
}

/// `tr[((I⊗σ^{-1/2})ρ)²]/tr ρ` with a pseudo-inverse square root (cutoff
/// 1e-10); a lower bound on `2^{-H_min(A|B)}`.
fn trace_certificate(rho_ab: &Operator, sigma: &Operator, tr_rho: f64) -> Result<f64> {
    let d_b = sigma.dim();
    let d_a = rho_ab.dim() / d_b;
    let inv_sqrt = sigma.herm_fn(|v| if v > 1e-10 { 1.0 / v.sqrt() } else { 0.0 });
    let big = CMat::identity(d_a, d_a).kronecker(inv_sqrt.matrix());
    let m = &big * rho_ab.matrix();
    let sq = &m * &m;
    Ok(sq.diagonal().iter().map(|z| z.re).sum::<f64>() / tr_rho)
}

/// Conditional von Neumann entropy `H(A|B) = H(AB) − H(B)` in bits.
pub fn vn_conditional_entropy(rho: &Operator, a_labels: &[&str]) -> Result<f64> {
    if !rho.is_hermitian(1e-9) || !rho.is_psd(1e-9) {
        return Err(Error::Domain(
            "entropy input must be Hermitian positive semidefinite".into(),
        ));
    }
    if (rho.trace().re - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(
            "conditional von Neumann entropy requires a normalized state".into(),
        ));
    }
    for l in a_labels {
        rho.layout().position(l)?;
    }
    let rho_b = rho.partial_trace(a_labels)?;
    Ok(shannon_bits(&rho.herm_eigenvalues()) - shannon_bits(&rho_b.herm_eigenvalues()))
}

fn shannon_bits(eigs: &[f64]) -> f64 {
    eigs.iter()
        .map(|&l| if l > 0.0 { -l * l.log2() } else { 0.0 })
        .sum()
}

/// Smooth min-entropy rate `(1/n)·H_min^ε(Aⁿ|Bⁿ)` of product states
/// `ρ^{⊗n}` for `n = 1..n_max`, as certified lower bounds.
pub fn qaep_trend(
    rho: &Operator,
    a_labels: &[&str],
    eps: f64,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    if n_max == 0 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    let d = rho.dim();
    if d.pow(n_max as u32).saturating_mul(2) > BLOCK_DIM_GUARD {
        return Err(Error::Size(format!(
            "product dimension {}^{n_max} exceeds solver guard",
            d
        )));
    }
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let copies: Vec<Operator> = (1..=n)
            .map(|k| {
                let suffix = format!("#{k}");
                rho.with_layout(rho.layout().relabel_with_suffix(&suffix))
            })
            .collect::<Result<_>>()?;
        let refs: Vec<&Operator> = copies.iter().collect();
        let product = Operator::tensor(&refs)?;
        let a_n: Vec<String> = (1..=n)
            .flat_map(|k| a_labels.iter().map(move |l| format!("{l}#{k}")))
            .collect();
        let a_refs: Vec<&str> = a_n.iter().map(String::as_str).collect();
        let res = smooth_min_entropy(&product, &a_refs, eps)?;
        points.push((n, res.value / n as f64));
    }
    Ok(points)
}
