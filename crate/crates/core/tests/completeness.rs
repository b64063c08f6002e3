use nlcs::algebra::AlgebraSpec;
use nlcs::completeness::{measure_density, resolution_of_identity, resolution_of_identity_check, verify_moments};
use nlcs::quadrature::{integrate, QuadOptions};
use nlcs::specfun::log_gamma;
use nlcs::Error;

fn su11() -> AlgebraSpec {
    AlgebraSpec::su11(1.0, 1.0, 1.0).unwrap()
}

#[test]
fn su11_moments_are_factorial_products() {
    let rep = verify_moments(&su11(), 10, 1e-11).unwrap();
    for e in &rep.entries {
        let n = e.n as f64;
        let target = log_gamma(n + 1.0).unwrap() + log_gamma(n + 2.0).unwrap();
        assert!((e.target_log - target).abs() < 1e-12);
        assert!(e.relative_error <= 1e-6, "n={}", e.n);
    }
}

#[test]
fn shifted_linear_moments() {
    let spec = AlgebraSpec::polynomial(vec![1.0], vec![0.5]).unwrap();
    let rep = verify_moments(&spec, 10, 1e-11).unwrap();
    assert!(rep.max_relative_error <= 1e-6);
    for e in &rep.entries {
        let n = e.n as f64;
        let target = log_gamma(n + 1.5).unwrap() - log_gamma(1.5).unwrap();
        assert!((e.quadrature_value.ln() - target).abs() <= 1e-6);
    }
}

#[test]
fn scaled_and_mixed_polynomials() {
    // γ ≠ 1 exercises the x/γ change of variables
    for spec in [
        AlgebraSpec::polynomial(vec![2.5], vec![1.0]).unwrap(),
        AlgebraSpec::polynomial(vec![0.5, 3.0], vec![0.2, 1.5]).unwrap(),
        AlgebraSpec::su11(0.8, 1.7, 0.4).unwrap(),
    ] {
        let rep = verify_moments(&spec, 8, 1e-11).unwrap();
        assert!(rep.max_relative_error <= 1e-7, "{spec}: {}", rep.max_relative_error);
    }
}

#[test]
fn negative_shift_has_an_integrable_singularity() {
    // δ = −0.6: Λ ~ x^{−0.6} near zero
    let spec = AlgebraSpec::polynomial(vec![1.0, 1.0], vec![-0.6, 1.0]).unwrap();
    let rep = verify_moments(&spec, 6, 1e-11).unwrap();
    assert!(rep.max_relative_error <= 1e-6, "{}", rep.max_relative_error);
}

#[test]
fn cubic_moments_use_the_contour_density() {
    let spec = AlgebraSpec::polynomial(vec![1.0, 1.0, 1.0], vec![0.0, 0.5, 2.0]).unwrap();
    let rep = verify_moments(&spec, 4, 1e-9).unwrap();
    assert!(rep.all_supported());
    assert!(rep.max_relative_error <= 1e-7, "{}", rep.max_relative_error);
}

#[test]
fn divergent_and_non_polynomial_measures_are_rejected() {
    let spec = AlgebraSpec::polynomial(vec![1.0, 1.0], vec![-1.0, 3.0]).unwrap();
    assert!(matches!(measure_density(&spec, 1.0), Err(Error::Unsupported(_))));
    // two sign flips cancel: (−n−1)(−n−2) has the same measure as (n+1)(n+2)
    let flipped = AlgebraSpec::polynomial(vec![-1.0, -1.0], vec![-1.0, -2.0]).unwrap();
    let plain = AlgebraSpec::polynomial(vec![1.0, 1.0], vec![1.0, 2.0]).unwrap();
    assert_eq!(measure_density(&flipped, 2.0).unwrap(), measure_density(&plain, 2.0).unwrap());
    for spec in [
        AlgebraSpec::distorted(0.5).unwrap(),
        AlgebraSpec::susy_cubic(0.0).unwrap(),
    ] {
        assert!(matches!(resolution_of_identity_check(&spec, 3, 1e-10), Err(Error::Unsupported(_))));
    }
}

#[test]
fn density_is_nonnegative() {
    for spec in [
        AlgebraSpec::identity(),
        su11(),
        AlgebraSpec::polynomial(vec![1.0], vec![0.7]).unwrap(),
        AlgebraSpec::polynomial(vec![1.0, 1.0, 1.0], vec![0.0, 0.5, 2.0]).unwrap(),
    ] {
        for i in 1..200 {
            let x = 0.05 * i as f64;
            assert!(measure_density(&spec, x).unwrap() >= 0.0);
        }
    }
}

#[test]
fn density_normalizes_against_plain_quadrature() {
    // ∫Λ dx = E(0)! = 1, integrated here without the substitution used internally
    for spec in [su11(), AlgebraSpec::polynomial(vec![1.0], vec![2.0]).unwrap()] {
        let v = integrate(|x| measure_density(&spec, x).unwrap_or(0.0), 1e-300, 200.0, QuadOptions::rel(1e-12))
            .unwrap()
            .value;
        assert!((v - 1.0).abs() < 1e-9, "{spec}: {v}");
    }
}

#[test]
fn resolution_of_identity_examples() {
    let cases = [
        (AlgebraSpec::identity(), 20, 1e-8),
        (su11(), 15, 1e-6),
        (AlgebraSpec::polynomial(vec![1.0], vec![0.7]).unwrap(), 15, 1e-6),
    ];
    for (spec, cutoff, tol) in cases {
        let r = resolution_of_identity(&spec, cutoff, 1e-11).unwrap();
        assert!(r.max_diagonal_deviation <= tol, "{spec}: {}", r.max_diagonal_deviation);
        assert!(r.max_off_diagonal <= 1e-12, "{spec}: off-diagonal {}", r.max_off_diagonal);
        assert_eq!(r.matrix.nrows(), cutoff + 1);
    }
}

#[test]
fn csv_has_one_row_per_moment() {
    let rep = verify_moments(&AlgebraSpec::identity(), 4, 1e-10).unwrap();
    let csv = rep.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,quadrature_value,target,relative_error");
    assert_eq!(lines.len(), 6);
    let row: Vec<f64> = lines[5].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 4.0);
    assert!((row[2] - 24.0).abs() < 1e-12);
}
