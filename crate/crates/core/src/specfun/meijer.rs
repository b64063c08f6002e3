//! The Meijer G-function `G^{ℓ,0}_{0,ℓ}(y | δ_1, …, δ_ℓ)`, i.e. the inverse
//! Mellin transform of `Π Γ(s + δ_p)`.
//!
//! Closed forms cover ℓ = 1 and ℓ = 2. Higher orders integrate the
//! Mellin–Barnes contour along the vertical line through the real saddle
//! point of the integrand, where the phase is stationary and the integrand
//! is peaked at the real axis.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::bessel::ln_bessel_k;
use crate::specfun::gamma::{digamma, log_gamma_complex};

/// Relative magnitude below which the contour integrand is truncated.
const CONTOUR_CUTOFF: f64 = 1e-16;

fn check(y: f64, deltas: &[f64]) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain("meijer_g_measure", format!("y = {y} must be positive")));
    }
    if deltas.is_empty() {
        return Err(domain("meijer_g_measure", "parameter list is empty"));
    }
    if deltas.iter().any(|d| !d.is_finite()) {
        return Err(domain("meijer_g_measure", "non-finite parameter"));
    }
    Ok(())
}

/// `G^{ℓ,0}_{0,ℓ}(y | deltas)` for y > 0.
pub fn meijer_g_measure(y: f64, deltas: &[f64]) -> Result<f64> {
    Ok(ln_meijer_g_measure(y, deltas)?.exp())
}

/// Natural log of [`meijer_g_measure`]; the function is positive on y > 0.
pub fn ln_meijer_g_measure(y: f64, deltas: &[f64]) -> Result<f64> {
    check(y, deltas)?;
    match deltas {
        [d] => Ok(d * y.ln() - y),
        [d1, d2] => {
            let s = 2.0 * y.sqrt();
            Ok(2f64.ln() + 0.5 * (d1 + d2) * y.ln() + ln_bessel_k(d1 - d2, s)?)
        }
        _ => ln_mellin_barnes(y, deltas),
    }
}

/// Real saddle point c of |Π Γ(s + δ_p) y^{-s}| on the real axis:
/// Σ ψ(c + δ_p) = ln y, with c + δ_p > 0 for every p.
fn saddle(y: f64, deltas: &[f64]) -> Result<f64> {
    let ln_y = y.ln();
    let floor = -deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let f = |c: f64| -> Result<f64> {
        let mut s = -ln_y;
        for d in deltas {
            s += digamma(c + d)?;
        }
        Ok(s)
    };
    let mut lo = floor + 1e-12;
    if f(lo)? > 0.0 {
        // ψ is increasing; the saddle sits essentially on the left boundary
        return Ok(lo);
    }
    let mut hi = floor + 1.0;
    while f(hi)? < 0.0 {
        lo = hi;
        hi = floor + 2.0 * (hi - floor);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ln G via numerical integration of the Mellin–Barnes contour; valid for any ℓ ≥ 1.
pub fn ln_mellin_barnes(y: f64, deltas: &[f64]) -> Result<f64> {
    check(y, deltas)?;
    let c = saddle(y, deltas)?;
    let ln_y = y.ln();
    let phase = |t: f64| -> Result<Complex64> {
        let s = Complex64::new(c, t);
        let mut acc = -s * ln_y;
        for d in deltas {
            acc += log_gamma_complex(s + d)?;
        }
        Ok(acc)
    };
    let peak = phase(0.0)?.re;
    let drop = CONTOUR_CUTOFF.ln();
    let mut t_max = 1.0;
    while phase(t_max)?.re - peak > drop {
        t_max *= 1.5;
        if t_max > 1e6 {
            return Err(Error::NonConvergence {
                what: "Mellin-Barnes contour",
                terms: 0,
            });
        }
    }
    let integrand = |t: f64| match phase(t) {
        Ok(p) => {
            let e = p - peak;
            e.re.exp() * e.im.cos()
        }
        Err(_) => f64::NAN,
    };
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    };
    let r = integrate(integrand, 0.0, t_max, opts).map_err(|e| match e {
        Error::Quadrature { detail, .. } => Error::Quadrature {
            n: None,
            detail: format!("Mellin-Barnes contour: {detail}"),
        },
        other => other,
    })?;
    if !(r.value > 0.0) {
        return Err(Error::NonConvergence {
            what: "Mellin-Barnes contour (non-positive result)",
            terms: r.evaluations,
        });
    }
    Ok(peak + (r.value / std::f64::consts::PI).ln())
}
