//! Decoupling: after a random unitary on A followed by a channel A→B, how
//! close is the joint state with the reference R to the product ω_B ⊗ ρ_R?
//!
//! The module provides the traceless decoupling operator ξ = Φ − π⊗π, the
//! exact Haar average of the 2-norm of its twirled image, the one-shot
//! decoupling bounds for Haar unitaries and δ-approximate 2-designs (with
//! and without smoothing), the supporting Hölder- and cross-term
//! inequalities, empirical decoupling experiments, and the Markov tail
//! bound for subsystem decoupling.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{sample_circuit_unitary, CircuitModel};
use crate::designs::{haar_sample, UnitaryEnsemble};
use crate::entropy::{min_entropy, smooth_min_entropy};
use crate::error::{Error, Result};
use crate::qmath::{CMat, Channel, Operator, SchattenP, SystemLayout};


/// Largest explicit ensemble for exact decoupling averages.
pub const ENSEMBLE_AVERAGE_GUARD: usize = 10_000;

/// The decoupling operator `ξ = Φ − π⊗π` on two d-dimensional factors.
///
/// It is Hermitian and traceless, both partial traces vanish, and
/// `‖ξ‖₂² = 1 − 1/d²`.
pub fn decoupling_operator(d: usize, label_a: &str, label_b: &str) -> Result<Operator> {
    if d < 2 {
        return Err(Error::Domain(
            "decoupling operator is degenerate for d = 1".into(),
        ));
    }
    let phi = Operator::max_entangled(d, label_a, label_b)?;
    let pi2 = CMat::identity(d * d, d * d) * Complex64::new(1.0 / (d * d) as f64, 0.0);
    Operator::new(phi.layout().clone(), phi.matrix() - pi2)
}

/// A state on A⊗R together with a channel A→B.
#[derive(Debug, Clone)]
pub struct DecouplingInstance {
    rho: Operator,
    channel: Channel,
    a_labels: Vec<String>,
    r_labels: Vec<String>,
}

impl DecouplingInstance {
    /// The A part of `rho` is identified by the channel's input layout; the
    /// remaining factors form the reference R.
    pub fn new(rho: Operator, channel: Channel) -> Result<Self> {
        if !rho.is_hermitian(1e-9) || !rho.is_psd(1e-9) || !rho.is_subnormalized(1e-9) {
            return Err(Error::Domain(
                "decoupling input must be a subnormalized state".into(),
            ));
        }
        if !channel.is_hermiticity_preserving(1e-9) {
            return Err(Error::Domain(
                "decoupling channel must be Hermiticity-preserving".into(),
            ));
        }
        let a_labels: Vec<String> = channel
            .in_layout()
            .labels()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let a_refs: Vec<&str> = a_labels.iter().map(String::as_str).collect();
        for l in &a_refs {
            rho.layout().position(l)?;
        }
        let r_labels: Vec<String> = rho
            .layout()
            .labels()
            .into_iter()
            .filter(|l| !a_refs.contains(l))
            .map(str::to_owned)
            .collect();
        let order: Vec<&str> = a_refs
            .iter()
            .copied()
            .chain(r_labels.iter().map(String::as_str))
            .collect();
        let rho = rho.permute(&order)?;
        Ok(DecouplingInstance {
            rho,
            channel,
            a_labels,
            r_labels,
        })
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn d_a(&self) -> usize {
        self.channel.in_layout().total_dim()
    }

    pub fn d_b(&self) -> usize {
        self.channel.out_layout().total_dim()
    }

    pub fn d_r(&self) -> usize {
        self.rho.dim() / self.d_a()
    }

    pub fn a_labels(&self) -> Vec<&str> {
        self.a_labels.iter().map(String::as_str).collect()
    }

    pub fn r_labels(&self) -> Vec<&str> {
        self.r_labels.iter().map(String::as_str).collect()
    }

    /// ω_B = T(π_A), the U-independent output marginal.
    pub fn omega_b(&self) -> Result<Operator> {
        self.channel.choi_out_reduction()
    }

    /// ρ_R = tr_A ρ.
    pub fn rho_r(&self) -> Result<Operator> {
        self.rho.partial_trace(&self.a_labels())
    }

    /// The product ω_B ⊗ ρ_R subtracted inside the decoupling error.
    pub fn target_product(&self) -> Result<Operator> {
        Operator::tensor(&[&self.omega_b()?, &self.rho_r()?])
    }

    /// `H_min(A'|B)` of the channel's Choi state ω_{A'B}.
    pub fn channel_entropy(&self, eps: f64) -> Result<f64> {
        let omega = self.channel.to_choi();
        let primed: Vec<String> = self
            .channel
            .in_layout()
            .relabel_with_suffix("'")
            .labels()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let refs: Vec<&str> = primed.iter().map(String::as_str).collect();
        entropy_value(&omega, &refs, eps)
    }

    /// `H_min(A|R)` of the input state.
    pub fn state_entropy(&self, eps: f64) -> Result<f64> {
        entropy_value(&self.rho, &self.a_labels(), eps)
    }
}

fn entropy_value(op: &Operator, a_labels: &[&str], eps: f64) -> Result<f64> {
    if eps > 0.0 {
        Ok(smooth_min_entropy(op, a_labels, eps)?.value)
    } else {
        Ok(min_entropy(op, a_labels)?.value)
    }
}

/// Which decoupling theorem evaluates the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    /// Haar unitaries: `2^{−½H_min(A'|B) − ½H_min(A|R)}`.
    Haar,
    /// δ-approximate 2-design: the Haar bound times `√(1 + 4δd_A⁴)`.
    Approx { delta: f64 },
    /// Smoothed variant with certified smooth-entropy lower bounds plus the
    /// `8d_Aδε + 12ε` additive corrections.
    Smooth { delta: f64, eps: f64 },
}

/// Right-hand side of the decoupling inequalities.
///
/// Smooth mode uses certified lower bounds on the smooth min-entropies, so
/// the returned value is a valid (possibly loose) upper bound on the
/// expected decoupling error.
pub fn decoupling_bound(inst: &DecouplingInstance, mode: BoundMode) -> Result<f64> {
    let omega = inst.channel.to_choi();
    if !omega.is_subnormalized(1e-9) || !omega.is_psd(1e-9) {
        return Err(Error::Domain(
            "decoupling bounds need a subnormalized PSD Choi state".into(),
        ));
    }
    let d_a = inst.d_a() as f64;
    let (delta, eps) = match mode {
        BoundMode::Haar => (0.0, 0.0),
        BoundMode::Approx { delta } => (delta, 0.0),
        BoundMode::Smooth { delta, eps } => (delta, eps),
    };
    if delta < 0.0 {
        return Err(Error::Parameter(format!("negative design error δ = {delta}")));
    }
    if eps > 0.0 {
        let limit = inst
            .rho
            .trace()
            .re
            .sqrt()
            .min(omega.trace().re.sqrt());
        if eps >= limit {
            return Err(Error::Domain(format!(
                "smoothing radius ε = {eps} not below min(√tr ρ, √tr ω) = {limit:.6}"
            )));
        }
    }
    let h_channel = inst.channel_entropy(eps)?;
    let h_state = inst.state_entropy(eps)?;
    let design_factor = (1.0 + 4.0 * delta * d_a.powi(4)).sqrt();
    let main = design_factor * 2.0_f64.powf(-0.5 * (h_channel + h_state));
    let correction = if eps > 0.0 {
        8.0 * d_a * delta * eps + 12.0 * eps
    } else {
        0.0
    };
    Ok(main + correction)
}

/// How the unitaries of an empirical decoupling experiment are drawn.
#[derive(Debug, Clone)]
pub enum DecouplingSource<'a> {
    Haar { n_trials: usize },
    Ensemble(&'a UnitaryEnsemble),
    Circuit {
        model: &'a CircuitModel,
        n_trials: usize,
    },
}

/// Result of an empirical decoupling experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalError {
    pub mean: f64,
    pub stderr: f64,
    /// Set when the mean is an exact finite average rather than Monte Carlo.
    pub exact: bool,
}

/// Mean trace-norm deviation `‖T((U⊗I)ρ(U†⊗I)) − ω_B⊗ρ_R‖₁` over the
/// source's unitaries; exact for explicit ensembles, Monte Carlo otherwise.
pub fn empirical_decoupling_error(
    inst: &DecouplingInstance,
    source: &DecouplingSource,
    rng: &mut impl Rng,
) -> Result<EmpiricalError> {
    let target = inst.target_product()?;
    let deviation = |u: &CMat| -> Result<f64> {
        let d_r = inst.d_r();
        let full = u.kronecker(&CMat::identity(d_r, d_r));
        let rotated = Operator::new(
            inst.rho.layout().clone(),
            &full * inst.rho.matrix() * full.adjoint(),
        )?;
        let out = inst.channel.apply_on(&rotated, &inst.a_labels())?;
        Ok(Operator::new(out.layout().clone(), out.matrix() - target.matrix())?.trace_norm())
    };

    match source {
        DecouplingSource::Ensemble(ens) => {
            let elements = ens.elements().ok_or_else(|| {
                Error::Parameter(
                    "the Haar ensemble has no finite average; use DecouplingSource::Haar".into(),
                )
            })?;
            if elements.len() > ENSEMBLE_AVERAGE_GUARD {
                return Err(Error::Size(format!(
                    "{} ensemble elements exceed the exact-average guard {ENSEMBLE_AVERAGE_GUARD}",
                    elements.len()
                )));
            }
            if ens.dim() != inst.d_a() {
                return Err(Error::Layout(format!(
                    "ensemble dimension {} does not match d_A = {}",
                    ens.dim(),
                    inst.d_a()
                )));
            }
            let mut mean = 0.0;
            for (p, u) in elements {
                mean += p * deviation(u.matrix())?;
            }
            Ok(EmpiricalError {
                mean,
                stderr: 0.0,
                exact: true,
            })
        }
        DecouplingSource::Haar { n_trials } => {
            let samples = monte_carlo(*n_trials, rng, |rng| {
                let u = haar_sample(inst.channel.in_layout().clone(), rng);
                deviation(u.matrix())
            })?;
            Ok(samples)
        }
        DecouplingSource::Circuit { model, n_trials } => {
            if 1usize << model.n_qubits != inst.d_a() {
                return Err(Error::Layout(format!(
                    "circuit dimension 2^{} does not match d_A = {}",
                    model.n_qubits,
                    inst.d_a()
                )));
            }
            let samples = monte_carlo(*n_trials, rng, |rng| {
                let w = sample_circuit_unitary(model, rng)?;
                deviation(w.matrix())
            })?;
            Ok(samples)
        }
    }
}

fn monte_carlo<R: Rng>(
    n_trials: usize,
    rng: &mut R,
    mut trial: impl FnMut(&mut R) -> Result<f64>,
) -> Result<EmpiricalError> {
    if n_trials < 2 {
        return Err(Error::Parameter(
            "Monte Carlo needs at least 2 trials".into(),
        ));
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n_trials {
        let v = trial(rng)?;
        sum += v;
        sumsq += v * v;
    }
    let n = n_trials as f64;
    let mean = sum / n;
    let var = ((sumsq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(EmpiricalError {
        mean,
        stderr: (var / n).sqrt(),
        exact: false,
    })
}

/// Monte Carlo left-hand side and exact right-hand side of the Haar 2-norm
/// identity `E_U‖(T⊗E)((U⊗I)ξ(U†⊗I))‖₂² = d²/(d²−1)·‖(T⊗I)ξ‖₂²·‖(I⊗E)ξ‖₂²`.
pub fn haar_l2_identity(
    t: &Channel,
    e: &Channel,
    n_trials: usize,
    rng: &mut impl Rng,
) -> Result<((f64, f64), f64)> {
    let d = t.in_layout().total_dim();
    if d < 2 {
        return Err(Error::Domain("identity is degenerate for d_A = 1".into()));
    }
    if e.in_layout().total_dim() != d {
        return Err(Error::Layout(format!(
            "both maps must share the input dimension, got {d} and {}",
            e.in_layout().total_dim()
        )));
    }
    if n_trials < 100 {
        return Err(Error::Parameter(
            "the Monte Carlo average needs at least 100 trials".into(),
        ));
    }
    let xi = decoupling_operator(d, "xa", "xb")?;
    let xi_a = xi.with_layout(join_layouts(t.in_layout(), "xb", d)?)?;
    let xi_e = xi.with_layout(join_layouts(e.in_layout(), "xa", d)?)?;
    let t_xi = t.apply_on(&xi_a, &t.in_layout().labels())?;
    let e_xi = e.apply_on(&xi_e, &e.in_layout().labels())?;
    let rhs = (d * d) as f64 / ((d * d - 1) as f64)
        * t_xi.schatten_norm(SchattenP::Two).powi(2)
        * e_xi.schatten_norm(SchattenP::Two).powi(2);

    let mc = monte_carlo(n_trials, rng, |rng| {
        let u = haar_sample(t.in_layout().clone(), rng);
        let full = u.matrix().kronecker(&CMat::identity(d, d));
        let rotated = Operator::new(
            xi_a.layout().clone(),
            &full * xi_a.matrix() * full.adjoint(),
        )?;
        let after_t = t.apply_on(&rotated, &t.in_layout().labels())?;
        // apply_on lists channel output factors first, so the ξ spectator
        // factor "xb" is last
        let spectator = after_t
            .layout()
            .labels()
            .last()
            .copied()
            .expect("layout is non-empty")
            .to_owned();
        let relabeled = relabel_factor(&after_t, &spectator, e.in_layout())?;
        let after_e = e.apply_on(&relabeled, &e.in_layout().labels())?;
        Ok(after_e.schatten_norm(SchattenP::Two).powi(2))
    })?;
    Ok(((mc.mean, mc.stderr), rhs))
}

/// Layout `first ⊗ (extra: d)` for placing ξ's factors; errors if the extra
/// label collides.
fn join_layouts(first: &SystemLayout, extra: &str, d: usize) -> Result<SystemLayout> {
    first.join(&SystemLayout::single(extra, d))
}

/// Reinterprets a single spectator factor of `op` as the (possibly
/// composite) layout `target`, leaving the other factors untouched.
fn relabel_factor(op: &Operator, from: &str, target: &SystemLayout) -> Result<Operator> {
    let mut factors: Vec<(String, usize)> = Vec::new();
    for (l, d) in op.layout().factors() {
        if l == from {
            if *d != target.total_dim() {
                return Err(Error::Layout(format!(
                    "factor {from} has dimension {d}, target layout needs {}",
                    target.total_dim()
                )));
            }
            factors.extend(target.factors().iter().cloned());
        } else {
            factors.push((l.clone(), *d));
        }
    }
    op.with_layout(SystemLayout::new(factors)?)
}

/// Coefficients of the twirled swap `E_U[(U†)⊗²(T†)⊗²(F_B)U⊗²] = αI + βF`.
pub fn twirl_swap_coefficients(t: &Channel) -> Result<(f64, f64)> {
    let d = t.in_layout().total_dim();
    if d < 2 {
        return Err(Error::Domain(
            "twirl coefficients are degenerate for d_A = 1".into(),
        ));
    }
    let m = twirled_swap_preimage(t)?;
    // the Haar twirl of a Hermitian two-copy operator is αI + βF with the
    // coefficients fixed by tr and tr(·F)
    let df = d as f64;
    let denom = df * df * (df * df - 1.0);
    let tr = m.trace().re;
    let mut tr_f = 0.0;
    for i in 0..d {
        for j in 0..d {
            tr_f += m.matrix()[(i * d + j, j * d + i)].re;
        }
    }
    let alpha = (df * df * tr - df * tr_f) / denom;
    let beta = (df * df * tr_f - df * tr) / denom;
    Ok((alpha, beta))
}

/// `(T†)⊗²(F_B)` on two copies of the channel input.
pub(crate) fn twirled_swap_preimage(t: &Channel) -> Result<Operator> {
    let d_b = t.out_layout().total_dim();
    let f_b = Operator::swap_operator(d_b, "fb1", "fb2")?;
    let adjoint = Channel::from_map(
        SystemLayout::single("fb1", d_b),
        SystemLayout::single("c1", t.in_layout().total_dim()),
        |y| {
            let relabeled = y.with_layout(t.out_layout().clone())?;
            let back = t.adjoint_apply(&relabeled)?;
            back.with_layout(SystemLayout::single("c1", back.dim()))
        },
    )?;
    let adjoint2 = Channel::from_map(
        SystemLayout::single("fb2", d_b),
        SystemLayout::single("c2", t.in_layout().total_dim()),
        |y| {
            let relabeled = y.with_layout(t.out_layout().clone())?;
            let back = t.adjoint_apply(&relabeled)?;
            back.with_layout(SystemLayout::single("c2", back.dim()))
        },
    )?;
    let step = adjoint.apply_on(&f_b, &["fb1"])?;
    adjoint2.apply_on(&step, &["fb2"])
}

/// Both sides of the Hölder-type bound `‖ξ‖₁ ≤ ‖λ^{−1/4} ξ λ^{−1/4}‖₂`.
pub fn weighted_l2_bound(xi: &Operator, lambda: &Operator) -> Result<(f64, f64)> {
    if !xi.is_hermitian(1e-9) {
        return Err(Error::Domain("weighted bound needs Hermitian ξ".into()));
    }
    if !lambda.is_psd(1e-9) || (lambda.trace().re - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("weight λ must be a normalized state".into()));
    }
    let min_eig = lambda
        .herm_eigenvalues()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_eig <= 1e-10 {
        return Err(Error::Domain(format!(
            "weight λ is numerically singular (min eigenvalue {min_eig:.2e})"
        )));
    }
    let quarter_inv = lambda.herm_fn(|v| v.powf(-0.25));
    let weighted = quarter_inv.matrix() * xi.matrix() * quarter_inv.matrix();
    let weighted_l2 = Operator::new(xi.layout().clone(), weighted)?.schatten_norm(SchattenP::Two);
    Ok((xi.trace_norm(), weighted_l2))
}

/// Both sides of the cross-term bound
/// `|tr[(ω_AB⊗I)(ω_A'B-style)(ρ_AA'⊗I)]| ≤ tr(ω²)·√(tr ρ²)`.
///
/// `omega` lives on two factors (A, B), `rho` on two copies of A.
pub fn cross_term_bound(omega: &Operator, rho: &Operator) -> Result<(f64, f64)> {
    let of = omega.layout().factors();
    let rf = rho.layout().factors();
    if of.len() != 2 || rf.len() != 2 {
        return Err(Error::Layout(
            "cross-term bound expects bipartite ω and ρ".into(),
        ));
    }
    let (d_a, d_b) = (of[0].1, of[1].1);
    if rf[0].1 != d_a || rf[1].1 != d_a {
        return Err(Error::Layout(format!(
            "ρ must live on two copies of the {d_a}-dimensional A factor"
        )));
    }
    if !omega.is_hermitian(1e-9) || !rho.is_hermitian(1e-9) {
        return Err(Error::Domain("cross-term bound needs Hermitian inputs".into()));
    }
    let om = omega.with_layout(SystemLayout::new(vec![("a", d_a), ("b", d_b)])?)?;
    let om_p = omega.with_layout(SystemLayout::new(vec![("p", d_a), ("b", d_b)])?)?;
    let rh = rho.with_layout(SystemLayout::new(vec![("a", d_a), ("p", d_a)])?)?;
    let id_a = Operator::new(SystemLayout::single("a", d_a), CMat::identity(d_a, d_a))?;
    let id_p = Operator::new(SystemLayout::single("p", d_a), CMat::identity(d_a, d_a))?;
    let id_b = Operator::new(SystemLayout::single("b", d_b), CMat::identity(d_b, d_b))?;
    let order = ["a", "p", "b"];
    let x1 = Operator::tensor(&[&om, &id_p])?.permute(&order)?;
    let x2 = Operator::tensor(&[&om_p, &id_a])?.permute(&order)?;
    let x3 = Operator::tensor(&[&rh, &id_b])?.permute(&order)?;
    let lhs = (x1.matrix() * x2.matrix() * x3.matrix()).trace().norm();
    let tr_omega_sq = (om.matrix() * om.matrix()).trace().re;
    let tr_rho_sq = (rh.matrix() * rh.matrix()).trace().re.max(0.0);
    Ok((lhs, tr_omega_sq * tr_rho_sq.sqrt()))
}

/// Markov tail bound for subsystem decoupling:
/// `Pr ≤ (1/ε)·(d_AS/√d_AE)·√(1 + 4δd_A⁴)` with `d_A = d_AS·d_AE`.
pub fn subsystem_tail_bound(eps: f64, d_as: usize, d_ae: usize, delta: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::Parameter(format!(
            "tail probability threshold ε = {eps} must be positive"
        )));
    }
    if d_as < 1 || d_ae < 1 {
        return Err(Error::Parameter("subsystem dimensions must be ≥ 1".into()));
    }
    if delta < 0.0 {
        return Err(Error::Parameter(format!("negative design error δ = {delta}")));
    }
    let d_a = (d_as * d_ae) as f64;
    Ok((1.0 / eps) * (d_as as f64 / (d_ae as f64).sqrt()) * (1.0 + 4.0 * delta * d_a.powi(4)).sqrt())
}

/// Record of one decoupling experiment: empirical statistics next to the
/// theorem bounds and the entropies they were evaluated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub empirical_mean: f64,
    pub empirical_stderr: f64,
    pub exact_average: bool,
    pub n_trials: usize,
    pub bound_haar: f64,
    pub bound_approx: f64,
    pub bound_smooth: Option<f64>,
    pub hmin_channel: f64,
    pub hmin_state: f64,
    pub hmin_channel_smooth: Option<f64>,
    pub hmin_state_smooth: Option<f64>,
    pub delta_used: f64,
    pub eps_used: Option<f64>,
    pub trace_rho: f64,
    pub trace_omega: f64,
    pub seeds: Vec<u64>,
}
