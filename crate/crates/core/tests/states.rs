use num_complex::Complex64;
use proptest::prelude::*;

use nlcs::algebra::AlgebraSpec;
use nlcs::specfun::{bessel_i, log_gamma, p_f_q, SeriesControl};
use nlcs::states::{
    bargmann_eval, coherent_state, e_exponential, e_exponential_complex, normalization_constant,
    su2_coherent_state, TruncatedState,
};

const TOL: f64 = 1e-12;

fn su11() -> AlgebraSpec {
    AlgebraSpec::su11(1.0, 1.0, 1.0).unwrap()
}

/// Σ wⁿ/E(n)! with plain products, no logarithms.
fn naive_e_exponential(spec: &AlgebraSpec, w: Complex64, terms: usize) -> Complex64 {
    let base = spec.ladder_base();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..terms {
        term = term * w / spec.e_of_n(base + k);
        sum += term;
    }
    sum
}

#[test]
fn eigenvector_residual_is_small_for_every_preset() {
    for (name, spec) in AlgebraSpec::presets() {
        for r in [0.5, 1.0, 2.0, 4.0] {
            let z = Complex64::from_polar(r, 0.3 + r);
            let st = coherent_state(&spec, z, TOL).unwrap();
            let res = st.eigen_residual(&spec, z);
            assert!(res <= 1e-8, "{name} |z|={r}: residual {res:e}");
            let norm = st.norm_sqr();
            assert!((1.0 - TOL..=1.0 + 1e-14).contains(&norm), "{name}: norm {norm}");
            assert!(st.tail_bound() <= TOL);
        }
    }
}

#[test]
fn su11_distribution_matches_bessel_form() {
    for r in [0.3, 1.7, 5.0] {
        let st = coherent_state(&su11(), Complex64::new(0.0, r), 1e-15).unwrap();
        let i1 = bessel_i(1.0, 2.0 * r).unwrap();
        for (n, p) in st.photon_distribution().iter().enumerate() {
            let nf = n as f64;
            let expected = ((2.0 * nf + 1.0) * r.ln()
                - log_gamma(nf + 1.0).unwrap()
                - log_gamma(nf + 2.0).unwrap())
            .exp()
                / i1;
            assert!((p - expected).abs() <= 1e-13 * expected.max(1e-3), "r={r} n={n}");
        }
    }
}

#[test]
fn number_state_distribution_is_an_indicator() {
    let st = TruncatedState::number(4, 9);
    let p = st.photon_distribution();
    assert_eq!(p.len(), 10);
    for (n, v) in p.iter().enumerate() {
        assert_eq!(*v, if n == 4 { 1.0 } else { 0.0 });
    }
    let s = TruncatedState::number(5, 5).statistics();
    assert_eq!(s.mandel_q, -1.0);
}

#[test]
fn e_exponential_closed_forms() {
    let id = AlgebraSpec::identity();
    for x in [0.0, 0.5, 3.0, 20.0] {
        assert!((e_exponential(&id, x).unwrap() / x.exp() - 1.0).abs() < 1e-13);
    }
    for x in [0.1f64, 1.0, 9.0, 40.0] {
        let expected = bessel_i(1.0, 2.0 * x.sqrt()).unwrap() / x.sqrt();
        assert!((e_exponential(&su11(), x).unwrap() / expected - 1.0).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn e_exponential_matches_hypergeometric_form() {
    let ctl = SeriesControl::default();
    let specs = [
        (vec![2.0], vec![1.4]),
        (vec![1.0, 0.5], vec![0.3, 1.0]),
        (vec![1.5, 1.0, 0.8], vec![0.0, 2.0, 0.4]),
    ];
    for (alphas, betas) in specs {
        let spec = AlgebraSpec::polynomial(alphas.clone(), betas.clone()).unwrap();
        let form = spec.polynomial_form().unwrap();
        let b: Vec<f64> = form.deltas.iter().map(|d| 1.0 + d).collect();
        for x in [0.2, 2.0, 15.0] {
            let series = p_f_q(&[1.0], &b, x / form.gamma, ctl).unwrap();
            let ours = e_exponential(&spec, x).unwrap();
            assert!((ours / series - 1.0).abs() < 1e-10, "{alphas:?} {betas:?} x={x}");
        }
    }
}

#[test]
fn cubic_e_exponential_reduces_to_zero_f_two() {
    let ctl = SeriesControl::default();
    let alpha = 1.3;
    for (b2, b3) in [(0.4, 2.6), (1.9, 0.7)] {
        let spec = AlgebraSpec::polynomial(vec![alpha; 3], vec![alpha, b2, b3]).unwrap();
        let g = alpha.powi(3);
        let (d2, d3) = (b2 / alpha, b3 / alpha);
        for x in [0.5, 4.0, 25.0] {
            let closed = g * d2 * d3 / x * (p_f_q(&[], &[d2, d3], x / g, ctl).unwrap() - 1.0);
            let ours = e_exponential(&spec, x).unwrap();
            assert!((ours / closed - 1.0).abs() < 1e-10, "x={x}");
        }
    }
}

#[test]
fn normalization_is_the_inverse_root_of_the_e_exponential() {
    for (name, spec) in AlgebraSpec::presets() {
        for r in [0.4, 1.5, 3.0] {
            let n = normalization_constant(&spec, r).unwrap();
            let e = naive_e_exponential(&spec, Complex64::new(r * r, 0.0), 400).re;
            assert!((n * n * e - 1.0).abs() < 1e-12, "{name} r={r}");
        }
    }
}

#[test]
fn unnormalized_overlap_is_the_e_exponential() {
    for (name, spec) in AlgebraSpec::presets() {
        let z = Complex64::new(0.9, -1.1);
        let w = Complex64::new(-0.4, 1.6);
        let a = coherent_state(&spec, z, 1e-15).unwrap();
        let b = coherent_state(&spec, w, 1e-15).unwrap();
        let na = normalization_constant(&spec, z.norm()).unwrap();
        let nb = normalization_constant(&spec, w.norm()).unwrap();
        let overlap = a.inner(&b) / (na * nb);
        let oracle = naive_e_exponential(&spec, z.conj() * w, 400);
        assert!((overlap - oracle).norm() <= 1e-10 * oracle.norm(), "{name}");
        let ours = e_exponential_complex(&spec, z.conj() * w).unwrap();
        assert!((ours - oracle).norm() <= 1e-12 * oracle.norm(), "{name}");
    }
}

#[test]
fn bargmann_function_examples() {
    let spec = su11();
    let z = Complex64::new(0.7, 0.2);
    let vac = TruncatedState::number(0, 5);
    assert_eq!(bargmann_eval(&vac, &spec, z).unwrap(), Complex64::new(1.0, 0.0));
    let three = TruncatedState::number(3, 5);
    let expected = z.powu(3) / 144f64.sqrt();
    assert!((bargmann_eval(&three, &spec, z).unwrap() - expected).norm() < 1e-15);
    let w = Complex64::new(-1.2, 0.5);
    let cs = coherent_state(&spec, w, 1e-15).unwrap();
    let psi = bargmann_eval(&cs, &spec, z).unwrap();
    let oracle = naive_e_exponential(&spec, z * w, 300) * normalization_constant(&spec, w.norm()).unwrap();
    assert!((psi - oracle).norm() < 1e-12 * oracle.norm());
}

#[test]
fn bargmann_rejects_states_below_the_chain() {
    let susy = AlgebraSpec::susy_cubic(0.1).unwrap();
    let vac = TruncatedState::number(0, 4);
    assert!(bargmann_eval(&vac, &susy, Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn su2_state_reproduces_the_binomial_law() {
    let i = Complex64::new(0.0, 1.0);
    for n in [1usize, 2, 7, 30, 60] {
        let st = su2_coherent_state(n, i);
        for k in 0..=n {
            let ln_b = log_gamma(n as f64 + 1.0).unwrap()
                - log_gamma(k as f64 + 1.0).unwrap()
                - log_gamma((n - k) as f64 + 1.0).unwrap()
                - n as f64 * std::f64::consts::LN_2;
            let p = st.get(k, n - k).norm_sqr();
            assert!((p - ln_b.exp()).abs() < 1e-14, "n={n} k={k}");
        }
    }
    let bell = su2_coherent_state(1, i);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((bell.get(0, 1) - Complex64::new(h, 0.0)).norm() < 1e-15);
    assert!((bell.get(1, 0) - Complex64::new(0.0, h)).norm() < 1e-15);
}

#[test]
fn json_export_round_trips_coefficients() {
    let spec = AlgebraSpec::susy_cubic(-0.5).unwrap();
    let z = Complex64::new(0.6, 0.8);
    let st = coherent_state(&spec, z, TOL).unwrap();
    let v = st.to_json(&spec, z);
    let text = serde_json::to_string(&v).unwrap();
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back["base_level"], 1);
    let coeffs = back["coefficients"].as_array().unwrap();
    for (c, pair) in st.coefficients().iter().zip(coeffs) {
        assert_eq!(pair[0].as_f64().unwrap(), c.re);
        assert_eq!(pair[1].as_f64().unwrap(), c.im);
    }
    let alg = AlgebraSpec::from_json(&back["algebra"].to_string()).unwrap();
    assert_eq!(alg, spec);
}

proptest! {
    #[test]
    fn statistics_depend_only_on_modulus(r in 0.0f64..8.0, phase in 0.0f64..std::f64::consts::TAU) {
        for spec in [su11(), AlgebraSpec::identity(), AlgebraSpec::distorted(0.5).unwrap()] {
            let a = coherent_state(&spec, Complex64::new(r, 0.0), TOL).unwrap().statistics();
            let b = coherent_state(&spec, Complex64::from_polar(r, phase), TOL).unwrap().statistics();
            prop_assert!((a.mean - b.mean).abs() <= 1e-12 * (1.0 + a.mean));
            prop_assert!((a.variance - b.variance).abs() <= 1e-12 * (1.0 + a.variance));
        }
    }

    #[test]
    fn su11_mandel_q_is_sub_poissonian(r in 0.0f64..30.0) {
        let s = coherent_state(&su11(), Complex64::new(r, 0.0), TOL).unwrap().statistics();
        prop_assert!(s.mandel_q <= 0.0 && s.mandel_q >= -0.5);
        prop_assert!(s.variance >= 0.0);
    }

    #[test]
    fn bargmann_function_obeys_the_schwarz_bound(
        re_parts in prop::collection::vec(-1.0f64..1.0, 12),
        im_parts in prop::collection::vec(-1.0f64..1.0, 12),
        zr in 0.0f64..3.0,
        zt in 0.0f64..std::f64::consts::TAU,
    ) {
        let mut c: Vec<Complex64> = re_parts.iter().zip(&im_parts).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let norm: f64 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        for v in c.iter_mut() {
            *v /= norm;
        }
        let st = TruncatedState::new(c, 0.0, 0).unwrap();
        for spec in [su11(), AlgebraSpec::identity(), AlgebraSpec::q_deformed(0.2).unwrap()] {
            let z = Complex64::from_polar(zr, zt);
            let psi = bargmann_eval(&st, &spec, z).unwrap();
            let bound = 1.0 / normalization_constant(&spec, zr).unwrap();
            prop_assert!(psi.norm() <= bound * (1.0 + 1e-12));
        }
    }
}
