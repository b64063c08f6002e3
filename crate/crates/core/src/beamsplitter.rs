//! The 50:50 beam splitter `BS = exp[i(π/4)(a_H† a_V + a_H a_V†)]` on
//! two-mode truncated Fock space, with joint output statistics.
//!
//! Two-mode kets are written `|n, m⟩` with n photons in the horizontal mode
//! and m in the vertical one. Matrices are indexed `[(n, m)]` and only cells
//! with `n + m ≤ cutoff_total` are populated.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::specfun::hypergeometric::CompensatedSum;
use crate::specfun::{ln_bessel_i, log_beta, log_gamma};
use crate::states::{coherent_state, PhotonStatistics, TruncatedState};

/// Default mutual-information threshold (nats) for [`factorization_test`].
pub const DEFAULT_SEPARABILITY_THRESHOLD: f64 = 1e-6;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn lgam(x: f64) -> f64 {
    log_gamma(x).expect("positive argument")
}

/// Pure two-mode state on the triangle `n + m ≤ cutoff_total`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amplitudes: DMatrix<Complex64>,
    tail_bound: f64,
}

impl TwoModeState {
    pub fn zeros(cutoff_total: usize) -> Self {
        Self {
            amplitudes: DMatrix::from_element(cutoff_total + 1, cutoff_total + 1, czero()),
            tail_bound: 0.0,
        }
    }

    /// Wraps an amplitude matrix; entries outside the triangle must be zero.
    pub fn from_amplitudes(amplitudes: DMatrix<Complex64>, tail_bound: f64) -> Result<Self> {
        if amplitudes.nrows() != amplitudes.ncols() || amplitudes.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "amplitude matrix must be square and non-empty".into(),
            ));
        }
        let t = amplitudes.nrows() - 1;
        for n in 0..=t {
            for m in 0..=t {
                if n + m > t && amplitudes[(n, m)] != czero() {
                    return Err(Error::InvalidParameter(format!(
                        "amplitude at ({n}, {m}) lies beyond cutoff_total {t}"
                    )));
                }
            }
        }
        Ok(Self {
            amplitudes,
            tail_bound,
        })
    }

    /// `|ψ⟩ ⊗ |0⟩`, horizontal input with vacuum in the vertical port.
    pub fn with_vacuum(state: &TruncatedState) -> Self {
        let mut out = Self::zeros(state.cutoff());
        for (n, c) in state.coefficients().iter().enumerate() {
            out.amplitudes[(n, 0)] = *c;
        }
        out.tail_bound = state.tail_bound();
        out
    }

    pub fn cutoff_total(&self) -> usize {
        self.amplitudes.nrows() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amplitudes
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        if n + m > self.cutoff_total() {
            czero()
        } else {
            self.amplitudes[(n, m)]
        }
    }

    pub(crate) fn set(&mut self, n: usize, m: usize, value: Complex64) {
        self.amplitudes[(n, m)] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for a in self.amplitudes.iter() {
            s.add(a.norm_sqr());
        }
        s.value()
    }

    pub fn probabilities(&self) -> JointDistribution {
        JointDistribution {
            probs: self.amplitudes.map(|a| a.norm_sqr()),
            tail_bound: self.tail_bound,
        }
    }
}

/// Real symmetric generator block on `|k, N−k⟩`, k = 0..=N.
fn generator_block(total: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(total + 1, total + 1);
    for k in 0..total {
        let v = (((k + 1) * (total - k)) as f64).sqrt();
        g[(k + 1, k)] = v;
        g[(k, k + 1)] = v;
    }
    g
}

/// `exp(iπ/4 · G_N)` for the block of total photon number N.
pub fn bs_block(total: usize) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(generator_block(total));
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|l| Complex64::from_polar(1.0, FRAC_PI_4 * l)),
    );
    &v * phases * v.transpose()
}

/// Applies BS exactly, one total-photon-number block at a time.
pub fn bs_oracle(input: &TwoModeState) -> TwoModeState {
    let t = input.cutoff_total();
    let mut out = TwoModeState::zeros(t);
    out.tail_bound = input.tail_bound;
    for total in 0..=t {
        let block: Vec<Complex64> = (0..=total).map(|k| input.amplitudes[(k, total - k)]).collect();
        if block.iter().all(|a| *a == czero()) {
            continue;
        }
        let u = bs_block(total);
        for row in 0..=total {
            let mut acc = czero();
            for (col, a) in block.iter().enumerate() {
                acc += u[(row, col)] * a;
            }
            out.amplitudes[(row, total - row)] = acc;
        }
    }
    out
}

/// `2^{−n/2} Σ_k C(n,k)^{1/2} e^{iπk/2} |k, n−k⟩`, the split Fock state with
/// its global phase dropped. Matches the probabilities of `bs_oracle(|n,0⟩)`;
/// its amplitudes are those of the oracle output complex-conjugated, up to
/// the phase `iⁿ`.
pub fn bs_fock_closed_form(n: usize) -> TwoModeState {
    let mut st = TwoModeState::zeros(n);
    let ln_nf = lgam(n as f64 + 1.0);
    for k in 0..=n {
        let ln_binom = ln_nf - lgam(k as f64 + 1.0) - lgam((n - k) as f64 + 1.0);
        let modulus = (0.5 * ln_binom - 0.5 * n as f64 * std::f64::consts::LN_2).exp();
        let phase = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        st.set(k, n - k, phase * modulus);
    }
    st
}

/// Joint photon-count distribution `P(n, m)` at the two output ports.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: DMatrix<f64>,
    tail_bound: f64,
}

impl JointDistribution {
    pub fn from_probs(probs: DMatrix<f64>, tail_bound: f64) -> Result<Self> {
        if probs.nrows() != probs.ncols() || probs.nrows() == 0 {
            return Err(Error::InvalidParameter("probability matrix must be square".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidParameter("probabilities must be non-negative".into()));
        }
        Ok(Self { probs, tail_bound })
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn cutoff_total(&self) -> usize {
        self.probs.nrows() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        if n.max(m) > self.cutoff_total() {
            0.0
        } else {
            self.probs[(n, m)]
        }
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for p in self.probs.iter() {
            s.add(*p);
        }
        s.value()
    }

    /// Horizontal marginal `P_H(n) = Σ_m P(n, m)`.
    pub fn horizontal_marginal(&self) -> Vec<f64> {
        (0..self.probs.nrows())
            .map(|n| {
                let mut s = CompensatedSum::default();
                for m in 0..self.probs.ncols() {
                    s.add(self.probs[(n, m)]);
                }
                s.value()
            })
            .collect()
    }

    /// Vertical marginal `P_V(m) = Σ_n P(n, m)`.
    pub fn vertical_marginal(&self) -> Vec<f64> {
        (0..self.probs.ncols())
            .map(|m| {
                let mut s = CompensatedSum::default();
                for n in 0..self.probs.nrows() {
                    s.add(self.probs[(n, m)]);
                }
                s.value()
            })
            .collect()
    }

    /// Distribution of `n_tot = n + m`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let t = self.cutoff_total();
        let mut sums = vec![CompensatedSum::default(); 2 * t + 1];
        for n in 0..=t {
            for m in 0..=t {
                sums[n + m].add(self.probs[(n, m)]);
            }
        }
        let mut out: Vec<f64> = sums.iter().map(CompensatedSum::value).collect();
        while out.len() > 1 && *out.last().unwrap() == 0.0 {
            out.pop();
        }
        out
    }

    /// Statistics of each port, with the vacuum convention (Q = 0 at zero mean).
    pub fn marginal_statistics(&self) -> (PhotonStatistics, PhotonStatistics) {
        (
            PhotonStatistics::from_distribution(&self.horizontal_marginal()),
            PhotonStatistics::from_distribution(&self.vertical_marginal()),
        )
    }

    /// Largest entrywise difference to another distribution.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        let t = self.cutoff_total().max(other.cutoff_total());
        let mut worst = 0.0f64;
        for n in 0..=t {
            for m in 0..=t {
                worst = worst.max((self.get(n, m) - other.get(n, m)).abs());
            }
        }
        worst
    }

    /// `(n, m, p)` rows over the populated triangle, n-major.
    pub fn rows(&self) -> Vec<(usize, usize, f64)> {
        let t = self.cutoff_total();
        let mut out = Vec::with_capacity((t + 1) * (t + 2) / 2);
        for n in 0..=t {
            for m in 0..=(t - n) {
                out.push((n, m, self.probs[(n, m)]));
            }
        }
        out
    }

    /// CSV text with columns `n,m,p`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,m,p\n");
        for (n, m, p) in self.rows() {
            s.push_str(&format!("{n},{m},{p:.16e}\n"));
        }
        s
    }

    /// Dense JSON matrix, `probs[n][m]`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<f64>> = (0..self.probs.nrows())
            .map(|n| (0..self.probs.ncols()).map(|m| self.probs[(n, m)]).collect())
            .collect();
        json!({
            "cutoff_total": self.cutoff_total(),
            "tail_bound": self.tail_bound,
            "probs": rows,
        })
    }
}

/// `P(m, r) = n!/(m! r! 2ⁿ)` on `m + r = n`, written through the Euler beta
/// function.
pub fn joint_fock(n: usize) -> JointDistribution {
    let mut probs = DMatrix::zeros(n + 1, n + 1);
    for m in 0..=n {
        let r = n - m;
        let (rf, mf) = (r as f64, m as f64);
        let ln_p = lgam(rf + 0.5) + lgam(mf + 0.5) - lgam(rf + 1.0) - lgam(mf + 1.0)
            - (rf + mf) * std::f64::consts::LN_2
            - log_beta(rf + 0.5, mf + 0.5).expect("positive arguments");
        probs[(m, r)] = ln_p.exp();
    }
    JointDistribution {
        probs,
        tail_bound: 0.0,
    }
}

/// Product of two Poisson laws with mean `|z|²/2` each, on the triangle
/// fixed by the input coherent state's cutoff at `tol`.
pub fn joint_coherent(z: Complex64, tol: f64) -> Result<JointDistribution> {
    let input = coherent_state(&AlgebraSpec::identity(), z, tol)?;
    let t = input.cutoff();
    let mu = 0.5 * z.norm_sqr();
    let mut probs = DMatrix::zeros(t + 1, t + 1);
    if mu == 0.0 {
        probs[(0, 0)] = 1.0;
    } else {
        let ln_mu = mu.ln();
        let ln_poisson = |k: usize| -mu + k as f64 * ln_mu - lgam(k as f64 + 1.0);
        let lp: Vec<f64> = (0..=t).map(ln_poisson).collect();
        for n in 0..=t {
            for m in 0..=(t - n) {
                probs[(n, m)] = (lp[n] + lp[m]).exp();
            }
        }
    }
    Ok(JointDistribution {
        probs,
        tail_bound: input.tail_bound(),
    })
}

/// Output distribution for the su(1,1) coherent state with E(n) = n(n+1):
/// `P(n,m) = 2^{−n−m}(n+1)(m+1)B(m+1,n+1)|z|^{2(n+m)+1} /
/// [Γ(n+1)Γ(n+2)Γ(m+1)Γ(m+2) I₁(2|z|)]`.
pub fn joint_su11(z: Complex64, tol: f64) -> Result<JointDistribution> {
    let spec = AlgebraSpec::su11(1.0, 1.0, 1.0)?;
    let input = coherent_state(&spec, z, tol)?;
    let t = input.cutoff();
    let r = z.norm();
    let mut probs = DMatrix::zeros(t + 1, t + 1);
    if r == 0.0 {
        probs[(0, 0)] = 1.0;
    } else {
        let ln_r = r.ln();
        let ln_i1 = ln_bessel_i(1.0, 2.0 * r)?;
        for n in 0..=t {
            for m in 0..=(t - n) {
                let (nf, mf) = (n as f64, m as f64);
                let ln_p = -(nf + mf) * std::f64::consts::LN_2
                    + (nf + 1.0).ln()
                    + (mf + 1.0).ln()
                    + log_beta(mf + 1.0, nf + 1.0)?
                    + (2.0 * (nf + mf) + 1.0) * ln_r
                    - lgam(nf + 1.0)
                    - lgam(nf + 2.0)
                    - lgam(mf + 1.0)
                    - lgam(mf + 2.0)
                    - ln_i1;
                probs[(n, m)] = ln_p.exp();
            }
        }
    }
    Ok(JointDistribution {
        probs,
        tail_bound: input.tail_bound(),
    })
}

/// Per-port statistics and correlations of a joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport {
    pub horizontal: PhotonStatistics,
    pub vertical: PhotonStatistics,
    pub covariance: f64,
    pub total_variance: f64,
    /// Nats.
    pub mutual_information: f64,
    pub g2_horizontal: f64,
    pub g2_vertical: f64,
}

impl ChannelReport {
    /// `Var(n_H) + Var(n_V)`, the sum without the covariance term.
    pub fn uncorrelated_total_variance(&self) -> f64 {
        self.horizontal.variance + self.vertical.variance
    }
}

/// `Σ P ln[P/(P_H P_V)]` over the normalized distribution.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let total = joint.total_mass();
    let ph = joint.horizontal_marginal();
    let pv = joint.vertical_marginal();
    let mut s = CompensatedSum::default();
    let p = joint.probs();
    for n in 0..p.nrows() {
        for m in 0..p.ncols() {
            let pnm = p[(n, m)];
            if pnm > 0.0 {
                s.add(pnm * (pnm * total / (ph[n] * pv[m])).ln());
            }
        }
    }
    (s.value() / total).max(0.0)
}

pub fn channel_report(joint: &JointDistribution) -> Result<ChannelReport> {
    let (horizontal, vertical) = joint.marginal_statistics();
    let g2_horizontal = horizontal
        .g2()
        .map_err(|_| Error::DegenerateChannel {
            channel: "horizontal",
        })?;
    let g2_vertical = vertical.g2().map_err(|_| Error::DegenerateChannel {
        channel: "vertical",
    })?;
    let total = joint.total_mass();
    let p = joint.probs();
    let mut cov = CompensatedSum::default();
    for n in 0..p.nrows() {
        for m in 0..p.ncols() {
            cov.add((n as f64 - horizontal.mean) * (m as f64 - vertical.mean) * p[(n, m)]);
        }
    }
    let covariance = cov.value() / total;
    let total_variance = PhotonStatistics::from_distribution(&joint.total_number_distribution()).variance;
    Ok(ChannelReport {
        horizontal,
        vertical,
        covariance,
        total_variance,
        mutual_information: mutual_information(joint),
        g2_horizontal,
        g2_vertical,
    })
}

/// Outcome of [`factorization_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factorization {
    pub separable: bool,
    /// Mutual information in nats.
    pub score: f64,
    /// `σ₂/σ₁` of the probability matrix; zero for a rank-one matrix.
    pub singular_value_ratio: f64,
}

pub fn factorization_test(joint: &JointDistribution, threshold: f64) -> Factorization {
    let score = mutual_information(joint);
    let mut sv: Vec<f64> = joint.probs().clone().singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let singular_value_ratio = match sv.as_slice() {
        [s1, s2, ..] if *s1 > 0.0 => s2 / s1,
        _ => 0.0,
    };
    Factorization {
        separable: score < threshold,
        score,
        singular_value_ratio,
    }
}

/// Photon-number law of one output port when `p` enters the other port
/// and vacuum the second: `P(k) = Σₙ pₙ C(n,k) 2⁻ⁿ`.
///
/// This is the marginal of the full two-mode output without building it,
/// so it stays cheap at cutoffs where [`bs_oracle`] is not.
pub fn split_marginal(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    let lf: Vec<f64> = (0..=p.len()).map(|k| lgam(k as f64 + 1.0)).collect();
    for (n, &pn) in p.iter().enumerate() {
        if pn <= 0.0 {
            continue;
        }
        let ln_pn = pn.ln() - n as f64 * std::f64::consts::LN_2 + lf[n];
        for (k, o) in out.iter_mut().enumerate().take(n + 1) {
            *o += (ln_pn - lf[k] - lf[n - k]).exp();
        }
    }
    out
}

/// `⟨n(n−1)⟩/⟨n⟩²` of a single-mode state.
pub fn input_g2(state: &TruncatedState) -> Result<f64> {
    state.statistics().g2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_photon_gives_bell_state() {
        let input = TwoModeState::with_vacuum(&TruncatedState::number(1, 1));
        let out = bs_oracle(&input);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.get(1, 0) - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert!((out.get(0, 1) - Complex64::new(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn split_marginal_matches_the_oracle() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let c: Vec<Complex64> = p.iter().map(|v: &f64| Complex64::new(v.sqrt(), 0.0)).collect();
        let st = TruncatedState::new(c, 0.0, 0).unwrap();
        let joint = bs_oracle(&TwoModeState::with_vacuum(&st)).probabilities();
        for (a, b) in split_marginal(&p).iter().zip(joint.horizontal_marginal()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_is_invariant() {
        let out = bs_oracle(&TwoModeState::with_vacuum(&TruncatedState::number(0, 0)));
        assert!((out.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn blocks_are_unitary() {
        for total in [1, 5, 20, 60] {
            let u = bs_block(total);
            let id = u.adjoint() * &u;
            for i in 0..=total {
                for j in 0..=total {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((id[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(bs_fock_closed_form(0).get(0, 0), Complex64::new(1.0, 0.0));
        let p = bs_fock_closed_form(2).probabilities();
        for (k, e) in [0.25, 0.5, 0.25].iter().enumerate() {
            assert!((p.get(k, 2 - k) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn joint_fock_examples() {
        let j = joint_fock(1);
        assert!((j.get(1, 0) - 0.5).abs() < 1e-15 && (j.get(0, 1) - 0.5).abs() < 1e-15);
        let j = joint_fock(2);
        for (k, e) in [0.25, 0.5, 0.25].iter().enumerate() {
            assert!((j.get(k, 2 - k) - e).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_marginal_means() {
        let r = channel_report(&joint_coherent(Complex64::new(4.0, 0.0), 1e-12).unwrap()).unwrap();
        assert!((r.horizontal.mean - 8.0).abs() < 1e-9);
        assert!((r.vertical.mean - 8.0).abs() < 1e-9);
        assert!(r.mutual_information < 1e-9);
        let z0 = joint_coherent(Complex64::new(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(z0.get(0, 0), 1.0);
        assert!(matches!(channel_report(&z0), Err(Error::DegenerateChannel { .. })));
    }

    #[test]
    fn covariance_decomposition() {
        let r = channel_report(&joint_fock(6)).unwrap();
        assert!(r.total_variance.abs() < 1e-14);
        assert!((r.horizontal.variance - 1.5).abs() < 1e-13);
        assert!(
            (r.total_variance - (r.horizontal.variance + r.vertical.variance + 2.0 * r.covariance))
                .abs()
                < 1e-12
        );
        assert!(r.uncorrelated_total_variance() > 1.0);
    }

    #[test]
    fn factorization_examples() {
        let c = factorization_test(
            &joint_coherent(Complex64::new(2.0, 0.0), 1e-12).unwrap(),
            DEFAULT_SEPARABILITY_THRESHOLD,
        );
        assert!(c.separable);
        assert!(c.singular_value_ratio < 1e-8);
        let f = factorization_test(&joint_fock(3), DEFAULT_SEPARABILITY_THRESHOLD);
        assert!(!f.separable);
        assert!(f.singular_value_ratio > 0.1);
    }

    #[test]
    fn csv_and_json_shapes() {
        let j = joint_fock(2);
        let csv = j.to_csv();
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(csv.starts_with("n,m,p\n"));
        let v = j.to_json();
        assert_eq!(v["probs"].as_array().unwrap().len(), 3);
    }
}
