//! Closure measures for polynomial E-functions.
//!
//! For `E(n) = γ Π_{p=1}^{ℓ} (n + δ_p)` the radial density
//! `Λ_E(x) = G^{ℓ,0}_{0,ℓ}(x/γ | δ) / (γ Π Γ(1+δ_p))` solves the moment
//! problem `∫_0^∞ Λ_E(x) xⁿ dx = E(n)!`, which is what makes
//! `∫ dσ_E |z_E⟩⟨z_E| = 𝟙`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, PolynomialForm};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::{ln_meijer_g_measure, log_gamma};

/// Validated measure parameters.
#[derive(Debug, Clone)]
struct Measure {
    form: PolynomialForm,
    ln_norm: f64,
}

impl Measure {
    fn new(spec: &AlgebraSpec) -> Result<Self> {
        let form = spec.polynomial_form().ok_or_else(|| {
            Error::Unsupported(format!(
                "closure measure is only known for polynomial E-functions, not `{}`",
                spec.variant().name()
            ))
        })?;
        if !(form.gamma > 0.0) {
            return Err(Error::Unsupported(format!(
                "leading coefficient γ = {} must be positive",
                form.gamma
            )));
        }
        if let Some(d) = form.deltas.iter().find(|d| **d <= -1.0) {
            return Err(Error::Unsupported(format!(
                "δ = {d} ≤ −1 gives divergent moments"
            )));
        }
        let mut ln_norm = form.gamma.ln();
        for d in &form.deltas {
            ln_norm += log_gamma(1.0 + d)?;
        }
        Ok(Self { form, ln_norm })
    }

    fn ln_density(&self, x: f64) -> Result<f64> {
        Ok(ln_meijer_g_measure(x / self.form.gamma, &self.form.deltas)? - self.ln_norm)
    }

    /// Rough location past which `Λ(x) x^s` has decayed: the density falls
    /// like `exp(−ℓ (x/γ)^{1/ℓ})`, so the moment peaks near `γ (s+δ)^ℓ`.
    fn x_scale(&self, s: f64) -> f64 {
        let dmax = self.form.deltas.iter().cloned().fold(0.0, f64::max);
        self.form.gamma * (s + 2.0 + dmax).powi(self.form.deltas.len() as i32)
    }

    /// `ln ∫_0^∞ Λ(x) x^s dx`, scaled by `exp(−shift)` inside the integrand.
    ///
    /// Substituting `x = u²` removes the `x^δ` endpoint behaviour; the
    /// u-axis is covered by doubling panels until a panel past the peak
    /// contributes less than `tol` of the running total.
    fn ln_moment(&self, s: f64, shift: f64, tol: f64) -> Result<f64> {
        let failure = std::cell::Cell::new(None);
        let g = |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let x = u * u;
            match self.ln_density(x) {
                Ok(l) => (l + s * x.ln() - shift).exp() * 2.0 * u,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        };
        let u_end = self.x_scale(s).sqrt();
        let mut total = 0.0;
        let mut a = 0.0;
        let mut b = (0.5 * self.form.gamma).sqrt().min(1.0);
        let opts = QuadOptions::rel(tol);
        for _ in 0..200 {
            let piece = integrate(g, a, b, opts)?.value;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            total += piece;
            if b > u_end && piece <= tol * 1e-3 * total {
                return Ok(total.ln() + shift);
            }
            a = b;
            b *= 1.5;
        }
        Err(Error::Quadrature {
            n: None,
            detail: "moment integral did not settle".into(),
        })
    }
}

/// `Λ_E(x)` for polynomial algebras (Identity and Su11 included).
pub fn measure_density(spec: &AlgebraSpec, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(crate::error::domain("measure_density", format!("x = {x} must be positive")));
    }
    Ok(Measure::new(spec)?.ln_density(x)?.exp())
}

/// One row of a [`MomentReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEntry {
    pub n: usize,
    /// `∫ Λ_E xⁿ dx`; NaN when unsupported.
    pub quadrature_value: f64,
    /// `ln E(n)!`.
    pub target_log: f64,
    /// `|ln quadrature − ln E(n)!|`; NaN when unsupported.
    pub relative_error: f64,
    /// False when the density could not be evaluated for this n.
    pub supported: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub entries: Vec<MomentEntry>,
    /// Worst error over supported entries.
    pub max_relative_error: f64,
}

impl MomentReport {
    pub fn all_supported(&self) -> bool {
        self.entries.iter().all(|e| e.supported)
    }

    /// Columns `n,quadrature_value,target,relative_error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,quadrature_value,target,relative_error\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                e.n,
                e.quadrature_value,
                e.target_log.exp(),
                e.relative_error
            ));
        }
        s
    }
}

/// Compares `∫ Λ_E xⁿ dx` with `E(n)!` for n = 0..=n_max.
///
/// Entries whose density cannot be evaluated (a non-converging contour
/// integral for ℓ ≥ 3) are marked unsupported instead of failing the run.
pub fn verify_moments(spec: &AlgebraSpec, n_max: usize, quad_tol: f64) -> Result<MomentReport> {
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("quad_tol = {quad_tol} out of (0, 1)")));
    }
    let measure = Measure::new(spec)?;
    let mut entries = Vec::with_capacity(n_max + 1);
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let target_log = spec.log_e_factorial(n)?;
        match measure.ln_moment(n as f64, target_log, quad_tol) {
            Ok(ln_q) => {
                let err = (ln_q - target_log).abs();
                worst = worst.max(err);
                entries.push(MomentEntry {
                    n,
                    quadrature_value: ln_q.exp(),
                    target_log,
                    relative_error: err,
                    supported: true,
                });
            }
            Err(Error::NonConvergence { .. }) | Err(Error::Domain { .. }) => {
                entries.push(MomentEntry {
                    n,
                    quadrature_value: f64::NAN,
                    target_log,
                    relative_error: f64::NAN,
                    supported: false,
                });
            }
            Err(Error::Quadrature { detail, .. }) => {
                return Err(Error::Quadrature { n: Some(n), detail });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MomentReport {
        entries,
        max_relative_error: worst,
    })
}

/// The truncated closure operator and its deviation from the identity.
#[derive(Debug, Clone)]
pub struct ResolutionCheck {
    pub matrix: DMatrix<f64>,
    pub max_diagonal_deviation: f64,
    pub max_off_diagonal: f64,
}

/// Assembles `⟨n| ∫ dσ_E |z_E⟩⟨z_E| |m⟩` for n, m ≤ cutoff.
///
/// With `z = √x e^{iθ}` the entry is `A(n−m) · ∫ Λ x^{(n+m)/2} dx /
/// √(E(n)! E(m)!)`, where `A(k)` is the angular average of `e^{ikθ}`. The
/// angular average uses the trapezoid rule on `2·cutoff + 2` nodes, which is
/// exact for every frequency that occurs.
pub fn resolution_of_identity(
    spec: &AlgebraSpec,
    cutoff: usize,
    quad_tol: f64,
) -> Result<ResolutionCheck> {
    let measure = Measure::new(spec)?;
    let ln_fact: Vec<f64> = (0..=cutoff)
        .map(|n| spec.log_e_factorial(n))
        .collect::<Result<_>>()?;
    // radial moments of order s = k/2, k = 0..=2·cutoff
    let radial: Vec<f64> = (0..=2 * cutoff)
        .map(|k| {
            let shift = 0.5 * (ln_fact[k / 2] + ln_fact[k.div_ceil(2)]);
            measure
                .ln_moment(0.5 * k as f64, shift, quad_tol)
                .map_err(|e| match e {
                    Error::Quadrature { detail, .. } => Error::Quadrature { n: Some(k / 2), detail },
                    other => other,
                })
        })
        .collect::<Result<_>>()?;
    let nodes = 2 * cutoff + 2;
    let angular = |k: i64| -> f64 {
        (0..nodes)
            .map(|j| (k as f64 * 2.0 * PI * j as f64 / nodes as f64).cos())
            .sum::<f64>()
            / nodes as f64
    };
    let mut matrix = DMatrix::zeros(cutoff + 1, cutoff + 1);
    let mut diag = 0.0f64;
    let mut off = 0.0f64;
    for n in 0..=cutoff {
        for m in 0..=cutoff {
            let v = angular(n as i64 - m as i64)
                * (radial[n + m] - 0.5 * (ln_fact[n] + ln_fact[m])).exp();
            matrix[(n, m)] = v;
            if n == m {
                diag = diag.max((v - 1.0).abs());
            } else {
                off = off.max(v.abs());
            }
        }
    }
    Ok(ResolutionCheck {
        matrix,
        max_diagonal_deviation: diag,
        max_off_diagonal: off,
    })
}

/// Largest `|⟨n|∫dσ_E|z_E⟩⟨z_E||n⟩ − 1|` over n ≤ cutoff.
pub fn resolution_of_identity_check(spec: &AlgebraSpec, cutoff: usize, quad_tol: f64) -> Result<f64> {
    Ok(resolution_of_identity(spec, cutoff, quad_tol)?.max_diagonal_deviation)
}
