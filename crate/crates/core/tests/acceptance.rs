//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with the measured values before asserting.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qdecouple::circuits::{circuit_design_sweep, CircuitModel, GateSet};
use qdecouple::decouple::{
    cross_term_bound, decoupling_bound, empirical_decoupling_error, haar_l2_identity, BoundMode,
    DecouplingSource, weighted_l2_bound,
};
use qdecouple::designs::{clifford1q_ensemble, design_delta, DeltaMethod, UnitaryEnsemble};
use qdecouple::entropy::min_entropy;
use qdecouple::qmath::{Channel, Operator, SystemLayout};
use qdecouple::report::load_fixture;
use qdecouple::sdpcore::diamond_norm;

type CMat = nalgebra::DMatrix<Complex64>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_cmat(d: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_hermitian(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let m = random_cmat(d, rng);
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::new(layout, h).unwrap()
}

fn random_density(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let d = layout.total_dim();
    let g = random_cmat(d, rng);
    let p = &g * g.adjoint();
    let tr = p.trace();
    Operator::new(layout, p / tr).unwrap()
}

fn random_subnormalized(layout: SystemLayout, rng: &mut impl Rng) -> Operator {
    let scale: f64 = rng.gen_range(0.2..1.0);
    random_density(layout, rng).scale(Complex64::new(scale, 0.0))
}

fn verdict(criterion: u32, name: &str, pass: bool, details: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({name}): {status} — {details}");
    assert!(pass, "criterion {criterion} ({name}) failed: {details}");
}

#[test]
fn criterion_01_haar_l2_identity_monte_carlo() {
    let t = Channel::identity(SystemLayout::single("T", 2)).unwrap();
    let e = Channel::identity(SystemLayout::single("E", 2)).unwrap();
    let mut rng = rng(101);
    let ((mean, stderr), rhs) = haar_l2_identity(&t, &e, 20_000, &mut rng).unwrap();
    let dev = (mean - rhs).abs();
    verdict(
        1,
        "Haar 2-norm identity",
        dev <= 3.0 * stderr + 1e-9,
        &format!("MC mean {mean:.9} ± {stderr:.2e} vs closed form {rhs} (|Δ| = {dev:.2e})"),
    );
}

#[test]
fn criterion_02_clifford_exact_decoupling() {
    let inst = load_fixture("bell-identity").unwrap();
    let clifford = clifford1q_ensemble();
    let mut rng = rng(102);
    let err =
        empirical_decoupling_error(&inst, &DecouplingSource::Ensemble(&clifford), &mut rng)
            .unwrap();
    let bound = decoupling_bound(&inst, BoundMode::Haar).unwrap();
    let (_, delta_upper) = design_delta(&clifford, DeltaMethod::Diamond).unwrap();
    let pass = err.exact && err.mean <= bound + 1e-9 && delta_upper <= 1e-9;
    verdict(
        2,
        "exact 2-design decoupling",
        pass,
        &format!(
            "24-term average {:.9} ≤ bound {bound:.9} (slack {:.4}); certified δ = {delta_upper:.2e}",
            err.mean,
            bound - err.mean
        ),
    );
}

#[test]
fn criterion_03_interpolated_ensembles_respect_the_design_bound() {
    let inst = load_fixture("bell-identity").unwrap();
    let clifford = clifford1q_ensemble();
    let identity = Operator::identity(SystemLayout::single("Q", 2));
    let mut all_pass = true;
    let mut details = Vec::new();
    for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut elements = Vec::new();
        if w < 1.0 {
            elements.push((1.0 - w, identity.clone()));
        }
        if w > 0.0 {
            for (p, u) in clifford.elements().unwrap() {
                elements.push((w * p, u.clone()));
            }
        }
        let ens = UnitaryEnsemble::explicit(elements).unwrap();
        let (_, delta_upper) = design_delta(&ens, DeltaMethod::ChoiTraceBounds).unwrap();
        let err = empirical_decoupling_error(
            &inst,
            &DecouplingSource::Ensemble(&ens),
            &mut rng(103),
        )
        .unwrap();
        let bound = decoupling_bound(&inst, BoundMode::Approx { delta: delta_upper }).unwrap();
        let ok = err.exact && err.mean <= bound + 1e-9;
        all_pass &= ok;
        details.push(format!(
            "w={w}: error {:.4} ≤ bound {:.4} (δ̄ {:.2e})",
            err.mean, bound, delta_upper
        ));
    }
    verdict(
        3,
        "design-bound consistency across mixtures",
        all_pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_04_min_entropy_values_and_certificates() {
    let phi = Operator::max_entangled(2, "A", "B").unwrap();
    let h_phi = min_entropy(&phi, &["A"]).unwrap().value;

    let mut r = rng(104);
    let sigma = random_density(SystemLayout::single("B", 2), &mut r);
    let pi = Operator::mixed_state(SystemLayout::single("A", 2));
    let product = Operator::tensor(&[&pi, &sigma]).unwrap();
    let h_product = min_entropy(&product, &["A"]).unwrap().value;

    let layout = SystemLayout::new(vec![("A", 2), ("B", 2)]).unwrap();
    let mut cc = CMat::zeros(4, 4);
    cc[(0, 0)] = Complex64::new(0.5, 0.0);
    cc[(3, 3)] = Complex64::new(0.5, 0.0);
    let classical = Operator::new(layout.clone(), cc).unwrap();
    let h_classical = min_entropy(&classical, &["A"]).unwrap().value;

    let mut worst_gap = f64::INFINITY;
    for _ in 0..100 {
        let rho = random_subnormalized(layout.clone(), &mut r);
        let gap = min_entropy(&rho, &["A"]).unwrap().certificate_gap;
        worst_gap = worst_gap.min(gap);
    }

    let pass = (h_phi + 1.0).abs() < 1e-5
        && (h_product - 1.0).abs() < 1e-5
        && h_classical.abs() < 1e-5
        && worst_gap >= -1e-6;
    verdict(
        4,
        "min-entropy SDP",
        pass,
        &format!(
            "H_min: Φ → {h_phi:.7}, π⊗σ → {h_product:.7}, classical → {h_classical:.7}; \
             worst certificate gap over 100 states {worst_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_05_purified_distance_sandwich() {
    let mut r = rng(105);
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    for trial in 0..1000 {
        let d = 2 + trial % 3;
        let layout = SystemLayout::single("x", d);
        let rho = random_subnormalized(layout.clone(), &mut r);
        let sigma = random_subnormalized(layout, &mut r);
        let p = Operator::purified_distance(&rho, &sigma).unwrap();
        let l1 = rho.sub(&sigma).unwrap().trace_norm();
        let tr_gap = (rho.trace().re - sigma.trace().re).abs();
        worst_lower = worst_lower.min(p - (0.5 * l1 + 0.5 * tr_gap));
        worst_upper = worst_upper.min((l1 + tr_gap).sqrt() - p);
    }
    let pass = worst_lower >= -1e-9 && worst_upper >= -1e-9;
    verdict(
        5,
        "purified-distance sandwich",
        pass,
        &format!(
            "1000 pairs, d ∈ {{2,3,4}}: min slack lower {worst_lower:.2e}, upper {worst_upper:.2e}"
        ),
    );
}

#[test]
fn criterion_06_proof_level_inequalities() {
    let mut r = rng(106);
    let mut worst_holder = f64::INFINITY;
    for trial in 0..500 {
        let d = 2 + trial % 3;
        let layout = SystemLayout::single("x", d);
        let xi = random_hermitian(layout.clone(), &mut r);
        let lambda = random_density(layout, &mut r);
        let (l1, wl2) = weighted_l2_bound(&xi, &lambda).unwrap();
        worst_holder = worst_holder.min(wl2 - l1);
    }
    let mut worst_cross = f64::INFINITY;
    for trial in 0..500 {
        let d_a = 2 + trial % 2;
        let d_b = 2 + (trial / 2) % 2;
        let omega = random_hermitian(
            SystemLayout::new(vec![("A", d_a), ("B", d_b)]).unwrap(),
            &mut r,
        );
        let rho = random_subnormalized(
            SystemLayout::new(vec![("A", d_a), ("P", d_a)]).unwrap(),
            &mut r,
        );
        let (lhs, rhs) = cross_term_bound(&omega, &rho).unwrap();
        worst_cross = worst_cross.min(rhs - lhs);
    }
    let pass = worst_holder >= -1e-10 && worst_cross >= -1e-10;
    verdict(
        6,
        "weighted-norm and cross-term inequalities",
        pass,
        &format!(
            "500 instances each: min slack weighted-norm {worst_holder:.2e}, cross-term {worst_cross:.2e}"
        ),
    );
}

/// Finite universal two-qubit gate set {CNOT, H⊗I, I⊗H, T⊗I, I⊗T}, uniform.
///
/// A Haar-distributed U(4) gate is degenerate on 2 qubits: a single gate
/// already covers the whole space, so every depth ≥ 1 yields exactly the
/// Haar distribution and no depth dependence. Convergence with depth is only
/// observable for a gate set that is universal but not itself a 2-design.
fn universal_gate_set() -> UnitaryEnsemble {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let h = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let t8 = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let gate = |mat: [[Complex64; 4]; 4]| {
        let m = CMat::from_fn(4, 4, |r, c| mat[r][c]);
        Operator::new(SystemLayout::single("g", 4), m).unwrap()
    };
    let cnot = gate([[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]]);
    let h1 = gate([[h, z, h, z], [z, h, z, h], [h, z, -h, z], [z, h, z, -h]]);
    let h2 = gate([[h, h, z, z], [h, -h, z, z], [z, z, h, h], [z, z, h, -h]]);
    let t1 = gate([[o, z, z, z], [z, o, z, z], [z, z, t8, z], [z, z, z, t8]]);
    let t2 = gate([[o, z, z, z], [z, t8, z, z], [z, z, o, z], [z, z, z, t8]]);
    UnitaryEnsemble::explicit(vec![
        (0.2, cnot),
        (0.2, h1),
        (0.2, h2),
        (0.2, t1),
        (0.2, t2),
    ])
    .unwrap()
}

#[test]
fn criterion_07_circuit_convergence_with_depth() {
    let model = CircuitModel::new(2, GateSet::Ensemble(universal_gate_set()), 0).unwrap();
    let mut r = rng(107);
    let rows = circuit_design_sweep(&model, &[1, 5, 10, 20, 40], 2000, &mut r).unwrap();
    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    let factor = first.delta_estimate / last.delta_estimate;
    let mut weakly_decreasing = true;
    for pair in rows.windows(2) {
        if pair[1].delta_estimate
            > pair[0].delta_estimate + 2.0 * (pair[0].stderr + pair[1].stderr)
        {
            weakly_decreasing = false;
        }
    }
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("t={}: {:.4}±{:.4}", r.t, r.delta_estimate, r.stderr))
        .collect();
    verdict(
        7,
        "circuit convergence",
        factor >= 5.0 && weakly_decreasing,
        &format!(
            "{}; proxy(1)/proxy(40) = {factor:.2}, weakly decreasing: {weakly_decreasing}",
            summary.join(", ")
        ),
    );
}

#[test]
fn criterion_08_subsystem_decoupling_with_circuit_source() {
    let inst = load_fixture("bell-trace").unwrap();
    let model = CircuitModel::new(3, GateSet::HaarU4, 60).unwrap();
    let mut r = rng(108);
    let err = empirical_decoupling_error(
        &inst,
        &DecouplingSource::Circuit {
            model: &model,
            n_trials: 500,
        },
        &mut r,
    )
    .unwrap();

    let proxy_rows = circuit_design_sweep(&model, &[60], 500, &mut r).unwrap();
    let delta_hat = proxy_rows[0].delta_estimate;
    let (d_as, d_ae) = (2.0_f64, 4.0_f64);
    let d_a = d_as * d_ae;
    let bound = d_as / d_ae.sqrt() * (1.0 + 4.0 * delta_hat * d_a.powi(4)).sqrt();
    let pass = err.mean <= bound + 3.0 * err.stderr;
    verdict(
        8,
        "subsystem decoupling",
        pass,
        &format!(
            "mean {:.4} ± {:.4} over 500 circuit trials ≤ bound {bound:.4} \
             (δ̂ proxy {delta_hat:.4}, noiseless prefactor {:.4})",
            err.mean,
            err.stderr,
            d_as / d_ae.sqrt()
        ),
    );
}

#[test]
fn criterion_09_diamond_norm_oracles() {
    let layout = SystemLayout::single("A", 2);
    let mut zmat = CMat::identity(2, 2);
    zmat[(1, 1)] = Complex64::new(-1.0, 0.0);
    let zgate = Operator::new(layout.clone(), zmat).unwrap();
    let diff = Channel::identity(layout.clone())
        .unwrap()
        .sub(&Channel::unitary_conjugation(&zgate).unwrap())
        .unwrap();
    let value = diamond_norm(&diff).unwrap();

    let zero = Channel::zero(layout.clone(), layout).unwrap();
    let zero_value = diamond_norm(&zero).unwrap();
    let pass = (value - 2.0).abs() < 1e-5 && zero_value.abs() < 1e-7;
    verdict(
        9,
        "diamond norm",
        pass,
        &format!("‖id − Z·Z†‖⋄ = {value:.8} (target 2), zero map → {zero_value:.2e}"),
    );
}

#[test]
fn criterion_10_smoothed_bound_sanity() {
    let inst = load_fixture("bell-identity").unwrap();
    let eps = 0.05;
    let bound_plain = decoupling_bound(&inst, BoundMode::Haar).unwrap();
    let bound_smooth = decoupling_bound(&inst, BoundMode::Smooth { delta: 0.0, eps }).unwrap();

    let clifford = clifford1q_ensemble();
    let empirical = empirical_decoupling_error(
        &inst,
        &DecouplingSource::Ensemble(&clifford),
        &mut rng(110),
    )
    .unwrap();

    // the bound is 2^{-(h_channel+h_state)/2} + 12ε: strictly decreasing in
    // the certified smooth entropies
    let h_channel = inst.channel_entropy(eps).unwrap();
    let h_state = inst.state_entropy(eps).unwrap();
    let of_entropies = |h1: f64, h2: f64| 2f64.powf(-0.5 * (h1 + h2)) + 12.0 * eps;
    let monotone = of_entropies(h_channel + 0.2, h_state) < of_entropies(h_channel, h_state)
        && of_entropies(h_channel, h_state + 0.2) < of_entropies(h_channel, h_state)
        && (of_entropies(h_channel, h_state) - bound_smooth).abs() < 1e-9;

    let pass = bound_smooth >= empirical.mean - 1e-9
        && bound_smooth >= bound_plain - 12.0 * eps - 1e-9
        && monotone;
    verdict(
        10,
        "smoothed decoupling bound",
        pass,
        &format!(
            "smoothed bound {bound_smooth:.6} ≥ empirical {:.6} and ≥ plain {bound_plain:.6} − 12ε; \
             certified smooth entropies ({h_channel:.4}, {h_state:.4}), monotone: {monotone}",
            empirical.mean
        ),
    );
}
