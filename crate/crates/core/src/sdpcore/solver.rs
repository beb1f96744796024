use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::qmath::CMat;

use super::problem::{ObjectiveSense, SdpProblem};

#[derive(Debug, Clone)]
pub struct SdpOptions {
    /// Feasibility tolerance (primal and dual residuals, relative).
    pub feas_tol: f64,
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Solve via the doubled real symmetric embedding instead of native
    /// complex arithmetic (cross-check path).
    pub real_embedding: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-7,
            max_iter: 200,
            real_embedding: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    /// Primal optimizer blocks.
    pub x: Vec<CMat>,
    /// Dual multipliers for the equality constraints.
    pub y: Vec<f64>,
    /// Dual slack blocks.
    pub z: Vec<CMat>,
    pub status: SdpStatus,
    /// Absolute duality gap |primal − dual|.
    pub gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    /// Complementary slackness residual tr(XZ).
    pub compl_slack: f64,
    pub iterations: usize,
}

/// Solves the SDP; see the module docs for the algorithm.
///
/// Runs the native complex iteration first; if it stops short of the
/// tolerances, the doubled real symmetric embedding is solved as well and
/// the better of the two iterates is returned. The two paths factor the
/// Newton systems differently, so degenerate instances that stall one
/// routinely converge on the other.
pub fn solve_sdp(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    if opts.real_embedding {
        return solve_real_embedded(p, opts);
    }
    let sol = solve_native(p, opts)?;
    if sol.status == SdpStatus::Optimal {
        return Ok(sol);
    }
    let alt = solve_real_embedded(p, opts)?;
    let merit = |s: &SdpSolution| {
        let rel_gap = s.gap / (1.0 + s.primal_value.abs() + s.dual_value.abs());
        s.primal_infeas.max(s.dual_infeas).max(rel_gap)
    };
    if merit(&alt) < merit(&sol) {
        Ok(alt)
    } else {
        Ok(sol)
    }
}

fn solve_native(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let sign = match p.sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let cost: Vec<CMat> = p.cost.iter().map(|c| c * Complex64::new(sign, 0.0)).collect();
    let mut sol = solve_min(p, &cost, opts)?;
    if sign < 0.0 {
        sol.primal_value = -sol.primal_value;
        sol.dual_value = -sol.dual_value;
        for y in sol.y.iter_mut() {
            *y = -*y;
        }
        // Z was the slack of the negated problem; leave it as reported
    }
    Ok(sol)
}

fn solve_real_embedded(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let mut pe = SdpProblem::new(
        p.block_dims.iter().map(|&d| 2 * d).collect(),
        p.sense,
    )?;
    for (k, c) in p.cost.iter().enumerate() {
        let d = p.block_dims[k];
        let mut ce = CMat::zeros(2 * d, 2 * d);
        for r in 0..d {
            for cc in 0..d {
                let v = c[(r, cc)];
                ce[(r, cc)] = Complex64::new(v.re, 0.0);
                ce[(r + d, cc + d)] = Complex64::new(v.re, 0.0);
                ce[(r, cc + d)] = Complex64::new(-v.im, 0.0);
                ce[(r + d, cc)] = Complex64::new(v.im, 0.0);
            }
        }
        pe.set_cost_block(k, ce)?;
    }
    for (a, &bi) in p.constraints.iter().zip(&p.b) {
        let mut ae = super::Constraint::new();
        for &(blk, r, c, v) in &a.entries {
            let d = p.block_dims[blk];
            ae.push(blk, r, c, Complex64::new(v.re, 0.0));
            ae.push(blk, r + d, c + d, Complex64::new(v.re, 0.0));
            ae.push(blk, r, c + d, Complex64::new(-v.im, 0.0));
            ae.push(blk, r + d, c, Complex64::new(v.im, 0.0));
        }
        pe.add_constraint(ae, 2.0 * bi)?;
    }
    let mut opts2 = opts.clone();
    opts2.real_embedding = false;
    let sol = solve_native(&pe, &opts2)?;
    // fold the doubled solution back: value halves, X = ½(X11+X22) + ½i(X21−X12)
    let x = sol
        .x
        .iter()
        .zip(&p.block_dims)
        .map(|(xe, &d)| {
            CMat::from_fn(d, d, |r, c| {
                let re = 0.5 * (xe[(r, c)].re + xe[(r + d, c + d)].re);
                let im = 0.5 * (xe[(r + d, c)].re - xe[(r, c + d)].re);
                Complex64::new(re, im)
            })
        })
        .collect();
    let z = sol
        .z
        .iter()
        .zip(&p.block_dims)
        .map(|(ze, &d)| {
            CMat::from_fn(d, d, |r, c| {
                let re = 0.5 * (ze[(r, c)].re + ze[(r + d, c + d)].re);
                let im = 0.5 * (ze[(r + d, c)].re - ze[(r, c + d)].re);
                Complex64::new(re, im)
            })
        })
        .collect();
    Ok(SdpSolution {
        primal_value: 0.5 * sol.primal_value,
        dual_value: 0.5 * sol.dual_value,
        x,
        y: sol.y,
        z,
        gap: 0.5 * sol.gap,
        compl_slack: 0.5 * sol.compl_slack,
        ..sol
    })
}

// ---- core interior-point iteration ------------------------------------

/// Re tr(AB) summed over blocks, for Hermitian block matrices.
fn block_dot(a: &[CMat], b: &[CMat]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x
            .iter()
            .zip(y.transpose().iter())
            .map(|(p, q)| (p * q).re)
            .sum::<f64>();
    }
    acc
}

fn block_frob(a: &[CMat]) -> f64 {
    a.iter()
        .map(|m| m.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// f(spectrum) for Hermitian input.
fn herm_matfn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let d = m.nrows();
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        se.eigenvalues.iter().map(|&v| Complex64::new(f(v), 0.0)),
    ));
    &se.eigenvectors * diag * se.eigenvectors.adjoint()
}

/// Largest step α ≤ cap with M + α·ΔM ⪰ 0, for M ≻ 0 (eigenvalue-clamped
/// whitening keeps this robust when M is nearly singular).
fn max_psd_step(m: &CMat, dm: &CMat, cap: f64) -> f64 {
    let lam_max = m
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b))
        .max(1e-30);
    let floor = 1e-14 * lam_max;
    let m_mhalf = herm_matfn(m, |v| 1.0 / v.max(floor).sqrt());
    let k = hermitize(&(&m_mhalf * dm * &m_mhalf));
    let lam_min = k
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    if lam_min >= -1e-14 {
        cap
    } else {
        (-1.0 / lam_min).min(cap)
    }
}

/// Smallest eigenvalue over blocks of B + a·D.
fn stepped_lam_min(blocks: &[CMat], dirs: &[CMat], a: f64) -> f64 {
    blocks
        .iter()
        .zip(dirs)
        .map(|(b, d)| {
            hermitize(&(b + d * Complex64::new(a, 0.0)))
                .symmetric_eigenvalues()
                .iter()
                .fold(f64::INFINITY, |acc, &v| acc.min(v))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Shrinks the step until positive definiteness actually holds in floating
/// point, not just in exact arithmetic.
fn backtrack_to_pd(blocks: &[CMat], dirs: &[CMat], mut a: f64) -> f64 {
    for _ in 0..120 {
        if a <= 0.0 || stepped_lam_min(blocks, dirs, a) > 0.0 {
            return a.max(0.0);
        }
        a *= 0.8;
    }
    0.0
}

fn solve_min(p: &SdpProblem, cost: &[CMat], opts: &SdpOptions) -> Result<SdpSolution> {
    let dims = p.block_dims.clone();
    let m = p.constraints.len();
    let ntot: f64 = dims.iter().map(|&d| d as f64).sum();
    let b_norm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_norm = block_frob(cost);
    let a_norm_max = p
        .constraints
        .iter()
        .map(|a| a.frobenius_norm())
        .fold(0.0_f64, f64::max);

    // infeasible start on the central ray, scaled to the data
    let eta_p = 10.0_f64
        .max(ntot.sqrt())
        .max(ntot * p.b.iter().fold(0.0_f64, |a, &v| a.max(v.abs())) / (1.0 + a_norm_max));
    let eta_d = 10.0_f64.max(ntot.sqrt()).max(a_norm_max).max(c_norm);
    let mut x: Vec<CMat> = dims
        .iter()
        .map(|&d| CMat::identity(d, d) * Complex64::new(eta_p, 0.0))
        .collect();
    let mut z: Vec<CMat> = dims
        .iter()
        .map(|&d| CMat::identity(d, d) * Complex64::new(eta_d, 0.0))
        .collect();
    let mut y = vec![0.0_f64; m];

    let mut status = SdpStatus::MaxIter;
    let mut iterations = opts.max_iter;
    let (mut last_ap, mut last_ad) = (0.0_f64, 0.0_f64);
    // best iterate seen, by worst-of(pinf, dinf, rel gap); late iterations
    // can degrade numerically, so the final answer comes from here
    let mut best: Option<(f64, Vec<CMat>, Vec<f64>, Vec<CMat>)> = None;

    for iter in 0..opts.max_iter {
        // residuals
        let rp: Vec<f64> = p
            .constraints
            .iter()
            .zip(&p.b)
            .map(|(a, &bi)| bi - a.dot(&x))
            .collect();
        let mut rd: Vec<CMat> = cost.iter().zip(&z).map(|(c, zb)| c - zb).collect();
        for (a, &yi) in p.constraints.iter().zip(&y) {
            a.add_into(&mut rd, -yi);
        }

        let pobj = block_dot(cost, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let mu = block_dot(&x, &z) / ntot;

        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
        let dinf = block_frob(&rd) / (1.0 + c_norm);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if std::env::var("SDP_TRACE").is_ok() {
            eprintln!(
                "iter {iter}: mu {mu:.3e} pinf {pinf:.3e} dinf {dinf:.3e} gap {rel_gap:.3e} pobj {pobj:.6e} dobj {dobj:.6e} last(ap,ad)=({last_ap:.2e},{last_ad:.2e})"
            );
        }
        let merit = pinf.max(dinf).max(rel_gap);
        if best.as_ref().map_or(true, |(m, _, _, _)| merit < *m) {
            best = Some((merit, x.clone(), y.clone(), z.clone()));
        }
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && rel_gap <= opts.gap_tol {
            status = SdpStatus::Optimal;
            iterations = iter;
            break;
        }
        // divergence heuristic: dual objective running away while the primal
        // residual refuses to drop indicates infeasibility
        if iter > 20 && dobj.abs() > 1e9 * (1.0 + b_norm) && pinf > 1e-4 {
            status = SdpStatus::Infeasible;
            iterations = iter;
            break;
        }

        // NT scaling W = Z^{-1/2}(Z^{1/2} X Z^{1/2})^{1/2} Z^{-1/2}
        let mut w: Vec<CMat> = Vec::with_capacity(dims.len());
        let mut w_half: Vec<CMat> = Vec::with_capacity(dims.len());
        let mut w_mhalf: Vec<CMat> = Vec::with_capacity(dims.len());
        for k in 0..dims.len() {
            let z_h = hermitize(&z[k]);
            let z_floor = 1e-14
                * z_h
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(0.0_f64, |a, &b| a.max(b))
                    .max(1e-30);
            let z_half = herm_matfn(&z_h, |v| v.max(z_floor).sqrt());
            let z_mhalf = herm_matfn(&z_h, |v| 1.0 / v.max(z_floor).sqrt());
            let s = &z_half * hermitize(&x[k]) * &z_half;
            let s_half = herm_matfn(&hermitize(&s), |v| v.max(0.0).sqrt());
            let wk = hermitize(&(&z_mhalf * s_half * &z_mhalf));
            w_half.push(herm_matfn(&wk, |v| v.max(1e-300).sqrt()));
            w_mhalf.push(herm_matfn(&wk, |v| 1.0 / v.max(1e-300).sqrt()));
            w.push(wk);
        }

        // W A_j W for every constraint, then the Schur complement
        let mut waw: Vec<Vec<CMat>> = Vec::with_capacity(m);
        for a in &p.constraints {
            let mut blocks: Vec<CMat> = dims.iter().map(|&d| CMat::zeros(d, d)).collect();
            for &(bk, r, c, v) in &a.entries {
                let wb = &w[bk];
                let d = dims[bk];
                // rank-one update v·W[:,r]·W[c,:]
                for i in 0..d {
                    let wi = wb[(i, r)] * v;
                    if wi.norm_sqr() == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        blocks[bk][(i, l)] += wi * wb[(c, l)];
                    }
                }
            }
            waw.push(blocks);
        }
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = Complex64::default();
                for &(bk, r, c, v) in &p.constraints[i].entries {
                    acc += v * waw[j][bk][(c, r)];
                }
                schur[(i, j)] = acc.re;
                schur[(j, i)] = acc.re;
            }
        }
        // factor the Schur complement; when Cholesky fails the system is
        // numerically rank deficient and a spectral pseudo-inverse gives the
        // minimum-norm multiplier update instead
        enum SchurSolver {
            Chol(Cholesky<f64, nalgebra::Dyn>),
            Pinv(DMatrix<f64>),
        }
        impl SchurSolver {
            fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
                match self {
                    SchurSolver::Chol(c) => c.solve(rhs),
                    SchurSolver::Pinv(p) => p * rhs,
                }
            }
        }
        let chol = Cholesky::new(schur.clone());
        // a Cholesky factor with a collapsing pivot still "succeeds" but then
        // amplifies the right-hand side along near-null directions; treat it
        // as rank deficient as well
        let well_conditioned = chol.as_ref().is_some_and(|ch| {
            let diag = ch.l_dirty().diagonal();
            let dmax = diag.amax().max(1e-300);
            diag.iter().all(|&v| v > 1e-6 * dmax)
        });
        let schur_solver = match chol {
            Some(ch) if well_conditioned => SchurSolver::Chol(ch),
            _ => {
                let se = schur.clone().symmetric_eigen();
                let lam_max = se.eigenvalues.amax().max(1e-30);
                let inv = DMatrix::from_diagonal(&se.eigenvalues.map(|v| {
                    if v > 1e-13 * lam_max {
                        1.0 / v
                    } else {
                        0.0
                    }
                }));
                SchurSolver::Pinv(&se.eigenvectors * inv * se.eigenvectors.transpose())
            }
        };
        // one round of iterative refinement shores up the multiplier solve
        let schur_solve = |rhs: &DVector<f64>| -> DVector<f64> {
            let mut dy = schur_solver.solve(rhs);
            let resid = rhs - &schur * &dy;
            dy += schur_solver.solve(&resid);
            dy
        };

        // one Newton solve for a given complementarity target R
        let newton = |r_mat: &[CMat]| -> (Vec<f64>, Vec<CMat>, Vec<CMat>) {
            // M Δy = rp − A(R) + A(W Rd W)
            let mut rhs = DVector::<f64>::zeros(m);
            let wrdw: Vec<CMat> = (0..dims.len())
                .map(|k| hermitize(&(&w[k] * &rd[k] * &w[k])))
                .collect();
            for i in 0..m {
                rhs[i] = rp[i] - p.constraints[i].dot(r_mat) + p.constraints[i].dot(&wrdw);
            }
            let dy_v = schur_solve(&rhs);
            let dy: Vec<f64> = dy_v.iter().copied().collect();
            // ΔZ = Rd − Aᵀ(Δy); ΔX = R − W ΔZ W
            let mut dz: Vec<CMat> = rd.clone();
            for (a, &dyi) in p.constraints.iter().zip(&dy) {
                a.add_into(&mut dz, -dyi);
            }
            let dx: Vec<CMat> = (0..dims.len())
                .map(|k| hermitize(&(&r_mat[k] - &w[k] * &dz[k] * &w[k])))
                .collect();
            (dy, dx, dz)
        };

        // predictor (affine scaling)
        let r_aff: Vec<CMat> = x.iter().map(|xb| -xb).collect();
        let (_dy_a, dx_a, dz_a) = newton(&r_aff);
        let ap_a = (0..dims.len())
            .map(|k| max_psd_step(&x[k], &dx_a[k], 1.0))
            .fold(1.0_f64, f64::min);
        let ad_a = (0..dims.len())
            .map(|k| max_psd_step(&z[k], &dz_a[k], 1.0))
            .fold(1.0_f64, f64::min);
        let xa: Vec<CMat> = x
            .iter()
            .zip(&dx_a)
            .map(|(xb, dxb)| xb + dxb * Complex64::new(ap_a, 0.0))
            .collect();
        let za: Vec<CMat> = z
            .iter()
            .zip(&dz_a)
            .map(|(zb, dzb)| zb + dzb * Complex64::new(ad_a, 0.0))
            .collect();
        let mu_aff = block_dot(&xa, &za) / ntot;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        // corrector with the Mehrotra second-order term expressed in the
        // NT-scaled space: W^{1/2}·½(V⁻¹H + HV⁻¹)·W^{1/2} with
        // V = W^{-1/2} X W^{-1/2} and H the Hermitian part of
        // W^{-1/2} ΔX_aff ΔZ_aff W^{1/2}
        let second_order: Vec<CMat> = (0..dims.len())
            .map(|k| {
                let v = hermitize(&(&w_mhalf[k] * &x[k] * &w_mhalf[k]));
                let h = hermitize(&(&w_mhalf[k] * &dx_a[k] * &dz_a[k] * &w_half[k]));
                // exact Lyapunov solve ½(V·M + M·V) = H in V's eigenbasis
                let se = nalgebra::SymmetricEigen::new(v);
                let hq = se.eigenvectors.adjoint() * h * &se.eigenvectors;
                let d = hq.nrows();
                let solved = CMat::from_fn(d, d, |i, j| {
                    let denom = 0.5 * (se.eigenvalues[i] + se.eigenvalues[j]);
                    hq[(i, j)] / denom.max(1e-300)
                });
                hermitize(&(&w_half[k] * (&se.eigenvectors * solved * se.eigenvectors.adjoint()) * &w_half[k]))
            })
            .collect();
        // centering target, expressed in the scaled space where X and Z share
        // the spectrum of V: σμZ⁻¹ − X = W^{1/2}(σμV⁻¹ − V)W^{1/2}. Each
        // eigenvalue's correction is clamped to a bounded multiplicative
        // recentering per step — asking a far-from-center pair to restore
        // its product in one linearized step only produces directions the
        // positivity caps then reject
        let target: Vec<CMat> = (0..dims.len())
            .map(|k| {
                let v = hermitize(&(&w_mhalf[k] * &x[k] * &w_mhalf[k]));
                let se = nalgebra::SymmetricEigen::new(v);
                let d = dims[k];
                let g = DMatrix::from_diagonal(&DVector::from_iterator(
                    d,
                    se.eigenvalues.iter().map(|&vi| {
                        let vi = vi.max(1e-150);
                        let raw = sigma * mu / vi - vi;
                        Complex64::new(raw.clamp(-0.75 * vi, 3.0 * vi), 0.0)
                    }),
                ));
                hermitize(
                    &(&w_half[k]
                        * (&se.eigenvectors * g * se.eigenvectors.adjoint())
                        * &w_half[k]),
                )
            })
            .collect();
        let r_cc: Vec<CMat> = (0..dims.len())
            .map(|k| &target[k] - &second_order[k])
            .collect();

        // centrality of a stepped iterate: λ_min of the symmetrized product
        // relative to its mean; steps must keep this from collapsing or
        // subsequent Newton directions become unusable
        let centrality = |xb: &[CMat], zb: &[CMat]| -> f64 {
            let mut lam_min = f64::INFINITY;
            let mut total = 0.0;
            for k in 0..dims.len() {
                let xh = hermitize(&xb[k]);
                let x_half = herm_matfn(&xh, |v| v.max(0.0).sqrt());
                let prod = hermitize(&(&x_half * hermitize(&zb[k]) * &x_half));
                for &l in prod.symmetric_eigenvalues().iter() {
                    lam_min = lam_min.min(l);
                    total += l;
                }
            }
            lam_min / (total / ntot).max(1e-300)
        };
        let gamma = (0.99 * centrality(&x, &z)).min(0.05);

        // adaptive fraction-to-boundary: aggressive only once steps are long
        let tau = 0.9 + 0.08 * last_ap.min(last_ad).clamp(0.0, 1.0);

        // evaluate a candidate direction: admissible step lengths inside the
        // neighborhood, plus the complementarity it would achieve
        let assess = |dx: &[CMat], dz: &[CMat]| -> (f64, f64, f64) {
            let mut ap = (0..dims.len())
                .map(|k| max_psd_step(&x[k], &dx[k], 1.0 / tau))
                .fold(1.0 / tau, f64::min)
                * tau;
            let mut ad = (0..dims.len())
                .map(|k| max_psd_step(&z[k], &dz[k], 1.0 / tau))
                .fold(1.0 / tau, f64::min)
                * tau;
            ap = backtrack_to_pd(&x, dx, ap.min(1.0));
            ad = backtrack_to_pd(&z, dz, ad.min(1.0));
            let mut ok = false;
            for _ in 0..60 {
                let xn: Vec<CMat> = (0..dims.len())
                    .map(|k| &x[k] + &dx[k] * Complex64::new(ap, 0.0))
                    .collect();
                let zn: Vec<CMat> = (0..dims.len())
                    .map(|k| &z[k] + &dz[k] * Complex64::new(ad, 0.0))
                    .collect();
                if centrality(&xn, &zn) >= gamma {
                    ok = true;
                    break;
                }
                ap *= 0.8;
                ad *= 0.8;
            }
            if !ok {
                return (0.0, 0.0, f64::INFINITY);
            }
            let xn: Vec<CMat> = (0..dims.len())
                .map(|k| &x[k] + &dx[k] * Complex64::new(ap, 0.0))
                .collect();
            let zn: Vec<CMat> = (0..dims.len())
                .map(|k| &z[k] + &dz[k] * Complex64::new(ad, 0.0))
                .collect();
            (ap, ad, block_dot(&xn, &zn) / ntot)
        };

        // prefer the second-order direction when it makes at least as much
        // progress as the plain centering direction
        let with_corr = newton(&r_cc);
        let (ap_c, ad_c, mu_c) = assess(&with_corr.1, &with_corr.2);
        let plain = newton(&target);
        let (ap_p, ad_p, mu_p) = assess(&plain.1, &plain.2);
        let ((dy, dx, dz), ap, ad) = if mu_c <= mu_p {
            (with_corr, ap_c, ad_c)
        } else {
            (plain, ap_p, ad_p)
        };
        if ap == 0.0 && ad == 0.0 {
            // no admissible step in any direction: numerical floor reached
            break;
        }

        last_ap = ap;
        last_ad = ad;
        for k in 0..dims.len() {
            x[k] = hermitize(&(&x[k] + &dx[k] * Complex64::new(ap, 0.0)));
            z[k] = hermitize(&(&z[k] + &dz[k] * Complex64::new(ad, 0.0)));
        }
        for (yi, dyi) in y.iter_mut().zip(&dy) {
            *yi += ad * dyi;
        }

        if mu < 1e-300 {
            break;
        }
    }

    if let Some((_, bx, by, bz)) = best {
        x = bx;
        y = by;
        z = bz;
    }

    // final report
    let rp: Vec<f64> = p
        .constraints
        .iter()
        .zip(&p.b)
        .map(|(a, &bi)| bi - a.dot(&x))
        .collect();
    let mut rd: Vec<CMat> = cost.iter().zip(&z).map(|(c, zb)| c - zb).collect();
    for (a, &yi) in p.constraints.iter().zip(&y) {
        a.add_into(&mut rd, -yi);
    }
    let pobj = block_dot(cost, &x);
    let dobj: f64 = p.b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
    let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
    let dinf = block_frob(&rd) / (1.0 + c_norm);
    let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    if pinf <= opts.feas_tol && dinf <= opts.feas_tol && rel_gap <= opts.gap_tol {
        status = SdpStatus::Optimal;
    }
    Ok(SdpSolution {
        primal_value: pobj,
        dual_value: dobj,
        compl_slack: block_dot(&x, &z),
        gap: (pobj - dobj).abs(),
        primal_infeas: pinf,
        dual_infeas: dinf,
        x,
        y,
        z,
        status,
        iterations,
    })
}
