use num_complex::Complex64;

use super::*;
use crate::qmath::Operator;
use crate::testutil;

fn layout_ab(d_a: usize, d_b: usize) -> SystemLayout {
    SystemLayout::new(vec![("A", d_a), ("B", d_b)]).unwrap()
}

fn lambda_min(op: &Operator) -> f64 {
    op.herm_eigenvalues()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn min_entropy_of_max_entangled_is_minus_one_bit() {
    let phi = Operator::max_entangled(2, "A", "B").unwrap();
    let res = min_entropy(&phi, &["A"]).unwrap();
    assert!((res.value + 1.0).abs() < 1e-5, "got {}", res.value);
}

#[test]
fn min_entropy_of_mixed_product_is_log_da() {
    let mut rng = testutil::rng(11);
    for d_a in [2usize, 3] {
        let pi_a = Operator::new(
            SystemLayout::single("A", d_a),
            CMat::identity(d_a, d_a) * Complex64::new(1.0 / d_a as f64, 0.0),
        )
        .unwrap();
        let sigma_b = testutil::random_density(SystemLayout::single("B", 2), &mut rng);
        let rho = Operator::tensor(&[&pi_a, &sigma_b]).unwrap();
        let res = min_entropy(&rho, &["A"]).unwrap();
        assert!(
            (res.value - (d_a as f64).log2()).abs() < 1e-5,
            "d_a = {d_a}: got {}",
            res.value
        );
    }
}

#[test]
fn min_entropy_of_classical_correlation_is_zero() {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(3, 3)] = Complex64::new(0.5, 0.0);
    let rho = Operator::new(layout_ab(2, 2), m).unwrap();
    let res = min_entropy(&rho, &["A"]).unwrap();
    assert!(res.value.abs() < 1e-5, "got {}", res.value);
}

#[test]
fn min_entropy_with_trivial_b_is_max_eigenvalue_entropy() {
    let mut rng = testutil::rng(23);
    let rho_a = testutil::random_density(SystemLayout::single("A", 3), &mut rng);
    let expect = -rho_a
        .herm_eigenvalues()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
        .log2();

    let res = min_entropy(&rho_a, &["A"]).unwrap();
    assert!(
        (res.value - expect).abs() < 1e-6,
        "no B factor: {} vs {expect}",
        res.value
    );

    let with_unit_b = rho_a
        .with_layout(SystemLayout::new(vec![("A", 3), ("B", 1)]).unwrap())
        .unwrap();
    let res = min_entropy(&with_unit_b, &["A"]).unwrap();
    assert!(
        (res.value - expect).abs() < 1e-6,
        "dimension-one B factor: {} vs {expect}",
        res.value
    );
}

#[test]
fn min_entropy_certificate_and_bounds_on_random_states() {
    let mut rng = testutil::rng(37);
    for trial in 0..50 {
        let d_a = 2 + trial % 2;
        let d_b = 2 + (trial / 2) % 2;
        let rho = if trial % 3 == 0 {
            testutil::random_subnormalized(layout_ab(d_a, d_b), &mut rng)
        } else {
            testutil::random_density(layout_ab(d_a, d_b), &mut rng)
        };
        let tr = rho.trace().re;
        let res = min_entropy(&rho, &["A"]).unwrap();
        assert!(
            res.certificate_gap >= -1e-6,
            "trial {trial}: certificate gap {}",
            res.certificate_gap
        );
        let log_da = (d_a as f64).log2();
        assert!(
            res.value >= -log_da - 1e-6 && res.value <= log_da - tr.log2() + 1e-6,
            "trial {trial}: value {} outside dimension bounds",
            res.value
        );
    }
}

#[test]
fn min_entropy_optimizer_dominates_the_state() {
    let mut rng = testutil::rng(41);
    for _ in 0..5 {
        let rho = testutil::random_density(layout_ab(2, 3), &mut rng);
        let res = min_entropy(&rho, &["A"]).unwrap();
        let coupling = CMat::identity(2, 2).kronecker(res.optimizer_sigma.matrix())
            * Complex64::new(2.0_f64.powf(-res.value), 0.0);
        let slack = Operator::new(rho.layout().clone(), coupling - rho.matrix()).unwrap();
        assert!(
            lambda_min(&slack) >= -1e-6,
            "2^-H I⊗σ − ρ has eigenvalue {}",
            lambda_min(&slack)
        );
    }
}

#[test]
fn min_entropy_never_exceeds_von_neumann() {
    let mut rng = testutil::rng(43);
    for _ in 0..5 {
        let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
        let hmin = min_entropy(&rho, &["A"]).unwrap().value;
        let hvn = vn_conditional_entropy(&rho, &["A"]).unwrap();
        assert!(hmin <= hvn + 1e-6, "H_min {hmin} > H {hvn}");
    }
}

#[test]
fn min_entropy_rejects_bad_input() {
    let zero = Operator::new(layout_ab(2, 2), CMat::zeros(4, 4)).unwrap();
    assert!(matches!(
        min_entropy(&zero, &["A"]),
        Err(Error::Domain(_))
    ));

    let mut rng = testutil::rng(5);
    let herm = testutil::random_hermitian(layout_ab(2, 2), &mut rng);
    assert!(min_entropy(&herm, &["A"]).is_err());

    let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
    assert!(min_entropy(&rho, &["C"]).is_err());
}

#[test]
fn smooth_min_entropy_at_zero_radius_matches_plain() {
    let mut rng = testutil::rng(53);
    let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
    let base = min_entropy(&rho, &["A"]).unwrap();
    let res = smooth_min_entropy(&rho, &["A"], 0.0).unwrap();
    assert!((res.value - base.value).abs() < 1e-5);
    let rt = res.smoothing_state.unwrap();
    assert!(Operator::purified_distance(&rho, &rt).unwrap() < 1e-9);
}

#[test]
fn smooth_min_entropy_grows_with_radius() {
    let mut rng = testutil::rng(59);
    let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
    let base = min_entropy(&rho, &["A"]).unwrap().value;
    let small = smooth_min_entropy(&rho, &["A"], 0.01).unwrap();
    let large = smooth_min_entropy(&rho, &["A"], 0.1).unwrap();
    assert!(small.value >= base - 1e-6);
    assert!(large.value >= small.value - 1e-6);
    for (eps, res) in [(0.01, &small), (0.1, &large)] {
        let rt = res.smoothing_state.as_ref().unwrap();
        let dist = Operator::purified_distance(&rho, rt).unwrap();
        assert!(dist <= eps + 1e-6, "distance {dist} exceeds ε = {eps}");
    }
}

#[test]
fn smooth_min_entropy_improves_on_pure_product() {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    let rho = Operator::new(layout_ab(2, 2), m).unwrap();
    let eps = 0.1;
    let res = smooth_min_entropy(&rho, &["A"], eps).unwrap();
    assert!(res.value >= -1e-6 && res.value <= 1.0 + 1e-6);
    let rt = res.smoothing_state.unwrap();
    assert!(Operator::purified_distance(&rho, &rt).unwrap() <= eps + 1e-6);
}

#[test]
fn smooth_min_entropy_rejects_bad_radius() {
    let mut rng = testutil::rng(61);
    let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
    assert!(matches!(
        smooth_min_entropy(&rho, &["A"], -0.1),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        smooth_min_entropy(&rho, &["A"], 1.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn vn_conditional_entropy_known_values() {
    let phi = Operator::max_entangled(2, "A", "B").unwrap();
    assert!((vn_conditional_entropy(&phi, &["A"]).unwrap() + 1.0).abs() < 1e-9);

    let pi = Operator::new(
        layout_ab(2, 2),
        CMat::identity(4, 4) * Complex64::new(0.25, 0.0),
    )
    .unwrap();
    assert!((vn_conditional_entropy(&pi, &["A"]).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn vn_conditional_entropy_of_product_is_marginal_entropy() {
    let mut rng = testutil::rng(67);
    let rho_a = testutil::random_density(SystemLayout::single("A", 3), &mut rng);
    let rho_b = testutil::random_density(SystemLayout::single("B", 2), &mut rng);
    let rho = Operator::tensor(&[&rho_a, &rho_b]).unwrap();
    let expect = shannon_bits(&rho_a.herm_eigenvalues());
    let got = vn_conditional_entropy(&rho, &["A"]).unwrap();
    assert!((got - expect).abs() < 1e-9);
}

#[test]
fn vn_conditional_entropy_requires_normalization() {
    let mut rng = testutil::rng(71);
    let rho = testutil::random_density(layout_ab(2, 2), &mut rng)
        .scale(Complex64::new(0.5, 0.0));
    assert!(matches!(
        vn_conditional_entropy(&rho, &["A"]),
        Err(Error::Domain(_))
    ));
}

#[test]
fn qaep_rate_is_flat_for_maximally_mixed_product() {
    let pi = Operator::new(
        layout_ab(2, 2),
        CMat::identity(4, 4) * Complex64::new(0.25, 0.0),
    )
    .unwrap();
    let points = qaep_trend(&pi, &["A"], 0.05, 2).unwrap();
    assert_eq!(points.len(), 2);
    for (n, rate) in points {
        assert!((rate - 1.0).abs() < 1e-4, "n = {n}: rate {rate}");
    }
}

#[test]
fn qaep_rate_of_entangled_state_stays_in_range() {
    let phi = Operator::max_entangled(2, "A", "B").unwrap();
    let points = qaep_trend(&phi, &["A"], 0.05, 2).unwrap();
    assert_eq!(points.len(), 2);
    for (n, rate) in points {
        assert!(
            (-1.0 - 1e-4..=1.0 + 1e-6).contains(&rate),
            "n = {n}: rate {rate}"
        );
    }
}

#[test]
fn qaep_rejects_oversized_products() {
    let mut rng = testutil::rng(73);
    let rho = testutil::random_density(layout_ab(2, 2), &mut rng);
    assert!(matches!(
        qaep_trend(&rho, &["A"], 0.05, 5),
        Err(Error::Size(_))
    ));
    assert!(matches!(
        qaep_trend(&rho, &["A"], 0.05, 0),
        Err(Error::Parameter(_))
    ));
}
