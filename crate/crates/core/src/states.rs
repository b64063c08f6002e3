//! Nonlinear coherent states and single-mode photon statistics.
//!
//! A coherent state of `â_E` has coefficients `c_n ∝ zⁿ/√E(n)!`. When
//! E(1) = 0 the chain starts one level higher: the state lives on
//! `span{|b⟩, |b+1⟩, …}` with `b` the algebra's ladder base, and
//! `c_{b+k} ∝ z^k / √Π_{j=1..k} E(b+j)`, which is the only eigenvector of
//! `â_E` on that subspace.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::algebra::AlgebraSpec;
use crate::beamsplitter::TwoModeState;
use crate::error::{Error, Result};
use crate::specfun::log_gamma;
use crate::specfun::hypergeometric::CompensatedSum;

/// Default tail-mass tolerance for state construction.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Hard cap on the number of chain levels kept.
pub const DEFAULT_CUTOFF_CAP: usize = 4096;

/// A finite vector of Fock coefficients `c_0..c_N`, indexed by absolute level.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    coefficients: Vec<Complex64>,
    tail_bound: f64,
    base_level: usize,
}

/// Single-mode counting statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonStatistics {
    pub mean: f64,
    pub second_factorial: f64,
    pub variance: f64,
    pub mandel_q: f64,
}

impl PhotonStatistics {
    /// Moments of a (not necessarily normalized) distribution over 0..len.
    /// The distribution is renormalized by its own total mass.
    pub fn from_distribution(p: &[f64]) -> Self {
        let mut mass = CompensatedSum::default();
        let mut first = CompensatedSum::default();
        let mut second = CompensatedSum::default();
        for (n, &pn) in p.iter().enumerate() {
            let nf = n as f64;
            mass.add(pn);
            first.add(nf * pn);
            second.add(nf * (nf - 1.0) * pn);
        }
        let total = mass.value();
        if total <= 0.0 {
            return Self {
                mean: 0.0,
                second_factorial: 0.0,
                variance: 0.0,
                mandel_q: 0.0,
            };
        }
        let mean = first.value() / total;
        let second_factorial = second.value() / total;
        let mut var = CompensatedSum::default();
        for (n, &pn) in p.iter().enumerate() {
            let d = n as f64 - mean;
            var.add(d * d * pn);
        }
        let variance = (var.value() / total).max(0.0);
        let mandel_q = if mean > 0.0 { variance / mean - 1.0 } else { 0.0 };
        Self {
            mean,
            second_factorial,
            variance,
            mandel_q,
        }
    }

    /// Zero-delay `g² = ⟨n(n−1)⟩/⟨n⟩²`.
    pub fn g2(&self) -> Result<f64> {
        if self.mean > 0.0 {
            Ok(self.second_factorial / (self.mean * self.mean))
        } else {
            Err(Error::InvalidParameter(
                "g2 is undefined for a state with zero mean photon number".into(),
            ))
        }
    }
}

impl TruncatedState {
    /// Builds a state from raw coefficients; checks the norm against the bound.
    pub fn new(coefficients: Vec<Complex64>, tail_bound: f64, base_level: usize) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("state needs at least one coefficient".into()));
        }
        if !(0.0..1.0).contains(&tail_bound) {
            return Err(Error::InvalidParameter(format!("tail bound {tail_bound} out of [0, 1)")));
        }
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        let slack = 1e-13 * coefficients.len() as f64;
        if norm > 1.0 + slack || norm < 1.0 - tail_bound - slack {
            return Err(Error::InvalidParameter(format!(
                "squared norm {norm} outside [1 - {tail_bound}, 1]"
            )));
        }
        Ok(Self {
            coefficients,
            tail_bound,
            base_level,
        })
    }

    /// The number state |n⟩ with coefficients out to `cutoff ≥ n`.
    pub fn number(n: usize, cutoff: usize) -> Self {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); cutoff.max(n) + 1];
        coefficients[n] = Complex64::new(1.0, 0.0);
        Self {
            coefficients,
            tail_bound: 0.0,
            base_level: 0,
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for c in &self.coefficients {
            s.add(c.norm_sqr());
        }
        s.value()
    }

    /// `P(n) = |c_n|²` for n = 0..=cutoff.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn statistics(&self) -> PhotonStatistics {
        PhotonStatistics::from_distribution(&self.photon_distribution())
    }

    /// `‖â_E|ψ⟩ − z|ψ⟩‖` over levels 0..cutoff−1; the top level, whose
    /// image would need level cutoff+1, is the truncation boundary.
    pub fn eigen_residual(&self, spec: &AlgebraSpec, z: Complex64) -> f64 {
        let c = &self.coefficients;
        let mut acc = 0.0;
        for n in 1..c.len() {
            let d = c[n] * spec.e_of_n(n).sqrt() - z * c[n - 1];
            acc += d.norm_sqr();
        }
        acc.sqrt()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &TruncatedState) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// JSON record `{algebra, z, base_level, coefficients, tail_bound}`.
    pub fn to_json(&self, spec: &AlgebraSpec, z: Complex64) -> serde_json::Value {
        json!({
            "algebra": serde_json::to_value(spec).expect("algebra serializes"),
            "z": [z.re, z.im],
            "base_level": self.base_level,
            "coefficients": self.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "tail_bound": self.tail_bound,
        })
    }
}

/// Log-weights `w_k = k ln x − ln Π_{j≤k} E(b+j)` of the chain series
/// `Σ x^k/Π E(b+j)` for x > 0, grown until the discarded tail is below `tol`
/// relative to the partial sum (or up to exactly `fixed` terms).
///
/// The tail estimate is geometric: once the term ratio `ρ = x/E(b+K+1)` is
/// below one and E is non-decreasing there, the remaining sum is at most
/// `w_K·ρ/(1−ρ)`. The bound assumes E stays non-decreasing past the cutoff.
/// That is true for the closed-form variants; for general polynomials and
/// tables it is only checked at the cutoff itself.
struct ChainSeries {
    ln_terms: Vec<f64>,
    ln_sum: f64,
    tail_relative: f64,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut s = CompensatedSum::default();
    for &x in v {
        s.add((x - m).exp());
    }
    m + s.value().ln()
}

fn chain_series(
    spec: &AlgebraSpec,
    x: f64,
    tol: f64,
    cap: usize,
    fixed: Option<usize>,
) -> Result<ChainSeries> {
    let base = spec.ladder_base();
    if x == 0.0 {
        return Ok(ChainSeries {
            ln_terms: vec![0.0],
            ln_sum: 0.0,
            tail_relative: 0.0,
        });
    }
    let ln_x = x.ln();
    let mut ln_terms = vec![0.0];
    let mut running = 0.0f64;
    let mut k = 0usize;
    loop {
        let e_next = spec.e_of_n(base + k + 1);
        let rho = x / e_next;
        let bounded = rho < 1.0 && e_next >= spec.e_of_n(base + k);
        let tail = |ln_sum: f64| {
            if bounded {
                (ln_terms[k] - ln_sum + rho.ln() - (-rho).ln_1p()).exp()
            } else {
                f64::INFINITY
            }
        };
        let stop = match fixed {
            Some(f) => k >= f,
            None => bounded && tail(running) <= tol,
        };
        if stop {
            let ln_sum = log_sum_exp(&ln_terms);
            let tail_relative = tail(ln_sum);
            return Ok(ChainSeries {
                ln_terms,
                ln_sum,
                tail_relative,
            });
        }
        if k + 1 > cap {
            return Err(Error::CutoffExceeded { cap });
        }
        let next = ln_terms[k] + ln_x - spec.ln_e_of_n(base + k + 1);
        running = log_add_exp(running, next);
        ln_terms.push(next);
        k += 1;
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Options for [`coherent_state_with`].
#[derive(Debug, Clone, Copy)]
pub struct StateOptions {
    /// Bound on the discarded probability mass.
    pub tol: f64,
    /// Maximum number of chain levels.
    pub cap: usize,
    /// Keep exactly this many chain levels instead of choosing adaptively.
    pub cutoff: Option<usize>,
}

impl Default for StateOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            cap: DEFAULT_CUTOFF_CAP,
            cutoff: None,
        }
    }
}

/// The normalized coherent state `|z_E⟩` with adaptive cutoff.
pub fn coherent_state(spec: &AlgebraSpec, z: Complex64, tol: f64) -> Result<TruncatedState> {
    coherent_state_with(
        spec,
        z,
        StateOptions {
            tol,
            ..StateOptions::default()
        },
    )
}

pub fn coherent_state_with(
    spec: &AlgebraSpec,
    z: Complex64,
    opts: StateOptions,
) -> Result<TruncatedState> {
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tol = {} must lie in (0, 1)", opts.tol)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("z = {z} must be finite")));
    }
    let base = spec.ladder_base();
    let r = z.norm();
    let theta = z.arg();
    let series = chain_series(spec, r * r, opts.tol, opts.cap, opts.cutoff)?;
    if series.tail_relative > opts.tol && opts.cutoff.is_none() {
        return Err(Error::NonConvergence {
            what: "coherent state tail",
            terms: series.ln_terms.len(),
        });
    }
    if !(series.tail_relative < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cutoff {:?} too small to bound the tail at |z| = {r}",
            opts.cutoff
        )));
    }
    let mut coefficients = vec![Complex64::new(0.0, 0.0); base + series.ln_terms.len()];
    for (k, lt) in series.ln_terms.iter().enumerate() {
        let modulus = (0.5 * (lt - series.ln_sum)).exp();
        coefficients[base + k] = Complex64::from_polar(modulus, theta * k as f64);
    }
    Ok(TruncatedState {
        coefficients,
        tail_bound: series.tail_relative,
        base_level: base,
    })
}

/// `ln e_E^x` for x ≥ 0, summed along the ladder chain.
pub fn ln_e_exponential(spec: &AlgebraSpec, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ln_e_exponential needs finite x >= 0, got {x}"
        )));
    }
    Ok(chain_series(spec, x, 1e-17, 1 << 20, None)?.ln_sum)
}

/// The E-exponential `e_E^x = Σ xⁿ/E(n)!`.
///
/// For algebras with E(1) = 0 the sum runs along the ladder chain,
/// `Σ x^k / Π_{j=1..k} E(b+j)`, which is the series that normalizes the
/// coherent states of those algebras.
pub fn e_exponential(spec: &AlgebraSpec, x: f64) -> Result<f64> {
    if x >= 0.0 {
        let v = ln_e_exponential(spec, x)?.exp();
        if v.is_infinite() {
            return Err(Error::Overflow {
                func: "e_exponential",
            });
        }
        return Ok(v);
    }
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x = {x} must be finite")));
    }
    // Alternating series: plain term recursion, stop once terms are negligible
    // and decreasing.
    let base = spec.ladder_base();
    let mut sum = CompensatedSum::default();
    let mut term = 1.0f64;
    sum.add(term);
    for k in 1..1_000_000usize {
        let e = spec.e_of_n(base + k);
        term *= x / e;
        sum.add(term);
        if term.abs() <= 1e-17 * sum.value().abs() && x.abs() < e {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence {
        what: "e_exponential",
        terms: 1_000_000,
    })
}

/// `e_E^w` for complex w, by term recursion along the ladder chain.
pub fn e_exponential_complex(spec: &AlgebraSpec, w: Complex64) -> Result<Complex64> {
    let base = spec.ladder_base();
    let r = w.norm();
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ln_r = r.ln();
    let theta = w.arg();
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    re.add(1.0);
    let mut ln_t = 0.0;
    let mut peak = 0.0f64;
    for k in 1..(1usize << 20) {
        let e = spec.e_of_n(base + k);
        ln_t += ln_r - spec.ln_e_of_n(base + k);
        peak = peak.max(ln_t);
        let t = Complex64::from_polar(ln_t.exp(), theta * k as f64);
        re.add(t.re);
        im.add(t.im);
        if r < e && ln_t - peak < (1e-17f64).ln() {
            let v = Complex64::new(re.value(), im.value());
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Overflow {
                    func: "e_exponential_complex",
                });
            }
            return Ok(v);
        }
    }
    Err(Error::NonConvergence {
        what: "e_exponential_complex",
        terms: 1 << 20,
    })
}

/// `N_E(r) = (e_E^{r²})^{−1/2}`.
pub fn normalization_constant(spec: &AlgebraSpec, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must be non-negative")));
    }
    Ok((-0.5 * ln_e_exponential(spec, r * r)?).exp())
}

/// Fock–Bargmann function `ψ(z) = Σ zⁿ ψ_n / √E(n)!` of a state.
///
/// Levels below the state's chain base carry no weight; along the chain the
/// factorial is the chain product, as for coherent states.
pub fn bargmann_eval(state: &TruncatedState, spec: &AlgebraSpec, z: Complex64) -> Result<Complex64> {
    let base = spec.ladder_base();
    let c = state.coefficients();
    if let Some((n, _)) = c
        .iter()
        .enumerate()
        .take(base)
        .find(|(_, v)| v.norm_sqr() > 0.0)
    {
        return Err(Error::ZeroDivisor { n });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ln_fact = 0.0;
    for (k, psi) in c.iter().enumerate().skip(base) {
        let j = k - base;
        if j > 0 {
            ln_fact += spec.ln_e_of_n(k);
        }
        if psi.norm_sqr() == 0.0 {
            continue;
        }
        let zk = if j == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            z.powu(j as u32)
        };
        acc += zk * psi * (-0.5 * ln_fact).exp();
    }
    if !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(Error::Overflow {
            func: "bargmann_eval",
        });
    }
    Ok(acc)
}

/// SU(2) coherent state `(1+|ξ|²)^{−n/2} Σ_k C(n,k)^{1/2} ξ^k |k, n−k⟩`.
pub fn su2_coherent_state(n: usize, xi: Complex64) -> TwoModeState {
    let mut st = TwoModeState::zeros(n);
    let ln_norm = -0.5 * n as f64 * (1.0 + xi.norm_sqr()).ln();
    let ln_nfact = log_gamma(n as f64 + 1.0).unwrap_or(0.0);
    for k in 0..=n {
        let ln_binom = ln_nfact
            - log_gamma(k as f64 + 1.0).unwrap_or(0.0)
            - log_gamma((n - k) as f64 + 1.0).unwrap_or(0.0);
        let amp = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            xi.powu(k as u32)
        };
        st.set(k, n - k, amp * (0.5 * ln_binom + ln_norm).exp());
    }
    st
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_i;

    #[test]
    fn identity_coherent_state_is_poisson() {
        let id = AlgebraSpec::identity();
        let z = Complex64::new(1.2, -0.7);
        let st = coherent_state(&id, z, 1e-12).unwrap();
        let mu = z.norm_sqr();
        for (n, p) in st.photon_distribution().iter().enumerate() {
            let poisson = (-mu + n as f64 * mu.ln() - log_gamma(n as f64 + 1.0).unwrap()).exp();
            // truncated states are renormalized, so P(n) exceeds Poisson by at most the tail
            let slack = 1e-15 + st.tail_bound() * poisson;
            assert!((p - poisson).abs() <= slack, "n={n}: {p} vs {poisson}");
        }
        assert!(st.tail_bound() <= 1e-12);
    }

    #[test]
    fn vacuum_limit() {
        for (_, spec) in AlgebraSpec::presets() {
            let st = coherent_state(&spec, Complex64::new(0.0, 0.0), 1e-12).unwrap();
            let b = spec.ladder_base();
            assert_eq!(st.cutoff(), b);
            assert_eq!(st.coefficients()[b], Complex64::new(1.0, 0.0));
            let expected_q = if b == 0 { 0.0 } else { -1.0 };
            assert_eq!(st.statistics().mandel_q, expected_q);
        }
    }

    #[test]
    fn su11_mean_matches_bessel_ratio() {
        let spec = AlgebraSpec::su11(1.0, 1.0, 1.0).unwrap();
        for r in [0.5, 1.0, 2.0, 4.0, 10.0] {
            let st = coherent_state(&spec, Complex64::new(r, 0.0), 1e-14).unwrap();
            let expected = r * bessel_i(2.0, 2.0 * r).unwrap() / bessel_i(1.0, 2.0 * r).unwrap();
            let mean = st.statistics().mean;
            assert!((mean - expected).abs() < 1e-10 * expected, "r={r}");
        }
    }

    #[test]
    fn normalization_examples() {
        let id = AlgebraSpec::identity();
        let su = AlgebraSpec::su11(1.0, 1.0, 1.0).unwrap();
        for r in [0.0, 0.3, 1.0, 3.0, 7.0] {
            let n = normalization_constant(&id, r).unwrap();
            assert!((n - (-r * r / 2.0).exp()).abs() <= 1e-13 * n.max(1e-300));
            if r > 0.0 {
                let n = normalization_constant(&su, r).unwrap();
                let expected = (r / bessel_i(1.0, 2.0 * r).unwrap()).sqrt();
                assert!((n / expected - 1.0).abs() < 1e-12, "r={r}");
            }
        }
        for (_, spec) in AlgebraSpec::presets() {
            assert_eq!(normalization_constant(&spec, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_argument_e_exponential() {
        let id = AlgebraSpec::identity();
        for x in [-0.5, -3.0, -10.0] {
            let v = e_exponential(&id, x).unwrap();
            assert!((v - f64::exp(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn susy_state_lives_on_the_one_photon_chain() {
        let spec = AlgebraSpec::susy_cubic(-0.5).unwrap();
        let z = Complex64::new(0.8, 0.4);
        let st = coherent_state(&spec, z, 1e-12).unwrap();
        assert_eq!(st.base_level(), 1);
        assert_eq!(st.coefficients()[0], Complex64::new(0.0, 0.0));
        let c = st.coefficients();
        // c_2/c_1 = z/√E(2)
        let ratio = c[2] / c[1];
        assert!((ratio - z / spec.e_of_n(2).sqrt()).norm() < 1e-14);
        assert!(st.eigen_residual(&spec, z) < 1e-12);
    }

    #[test]
    fn fixed_cutoff_reports_its_tail() {
        let id = AlgebraSpec::identity();
        let z = Complex64::new(2.0, 0.0);
        let opts = StateOptions {
            cutoff: Some(12),
            ..StateOptions::default()
        };
        let st = coherent_state_with(&id, z, opts).unwrap();
        assert_eq!(st.cutoff(), 12);
        // true discarded Poisson(4) mass above 12 is ≈ 2.9e-4 relative
        assert!(st.tail_bound() > 1e-4 && st.tail_bound() < 1e-3);
        let too_small = StateOptions {
            cutoff: Some(1),
            ..StateOptions::default()
        };
        assert!(coherent_state_with(&id, z, too_small).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let id = AlgebraSpec::identity();
        let opts = StateOptions {
            cap: 50,
            ..StateOptions::default()
        };
        assert!(matches!(
            coherent_state_with(&id, Complex64::new(10.0, 0.0), opts),
            Err(Error::CutoffExceeded { cap: 50 })
        ));
    }

    #[test]
    fn number_state_statistics() {
        for n in 1..10 {
            let s = TruncatedState::number(n, 20).statistics();
            assert_eq!(s.mean, n as f64);
            assert_eq!(s.variance, 0.0);
            assert_eq!(s.mandel_q, -1.0);
            assert!((s.g2().unwrap() - (1.0 - 1.0 / n as f64)).abs() < 1e-15);
        }
        assert!(TruncatedState::number(0, 3).statistics().g2().is_err());
    }

    #[test]
    fn su2_examples() {
        let i = Complex64::new(0.0, 1.0);
        let st = su2_coherent_state(2, i);
        let h = 0.5;
        assert!((st.get(0, 2) - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert!((st.get(1, 1) - i / 2f64.sqrt()).norm() < 1e-15);
        assert!((st.get(2, 0) - Complex64::new(-h, 0.0)).norm() < 1e-15);
        let zero = su2_coherent_state(5, Complex64::new(0.0, 0.0));
        assert_eq!(zero.get(0, 5), Complex64::new(1.0, 0.0));
        assert!((zero.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_record_shape() {
        let spec = AlgebraSpec::identity();
        let z = Complex64::new(0.5, 0.25);
        let st = coherent_state(&spec, z, 1e-12).unwrap();
        let v = st.to_json(&spec, z);
        assert_eq!(v["z"], json!([0.5, 0.25]));
        assert_eq!(v["base_level"], json!(0));
        assert_eq!(v["algebra"]["variant"], json!("identity"));
        assert_eq!(v["coefficients"].as_array().unwrap().len(), st.cutoff() + 1);
    }
}
