//! Modified Bessel functions of real order and real argument.
//!
//! `I_ν`: ascending power series below the crossover, Hankel's large-argument
//! expansion above it. `K_ν`: trapezoidal rule on
//! `K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(νt) dt`, whose integrand decays
//! double-exponentially so the rule converges geometrically in the step.

use crate::error::{domain, Error, Result};
use crate::specfun::gamma::log_gamma;

/// Smallest argument at which `I_ν` switches to the asymptotic expansion.
pub const I_ASYMPTOTIC_MIN_X: f64 = 30.0;

/// Argument at which the asymptotic expansion takes over for order `nu`.
pub fn i_crossover(nu: f64) -> f64 {
    I_ASYMPTOTIC_MIN_X.max(nu * nu)
}

fn check_i(nu: f64, x: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(domain("bessel_i", format!("order {nu} must be non-negative")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("bessel_i", format!("x = {x} must be non-negative")));
    }
    Ok(())
}

/// ln(e^{-x} I_ν(x)) by the ascending series, with running rescaling so
/// that partial sums never overflow.
fn ln_i_scaled_series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for k in 0..100_000usize {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            ln_scale += 250.0 * std::f64::consts::LN_10;
        }
        if term <= sum * 1e-17 && kf + 1.0 > 0.5 * x {
            let ln_pref = nu * (0.5 * x).ln() - log_gamma(nu + 1.0)?;
            return Ok(ln_pref + ln_scale + sum.ln() - x);
        }
    }
    Err(Error::NonConvergence {
        what: "bessel_i series",
        terms: 100_000,
    })
}

fn i_scaled_asymptotic(nu: f64, x: f64) -> Result<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * x);
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum / (2.0 * std::f64::consts::PI * x).sqrt());
        }
    }
    if last <= 1e-15 * sum.abs() {
        return Ok(sum / (2.0 * std::f64::consts::PI * x).sqrt());
    }
    Err(Error::NonConvergence {
        what: "bessel_i asymptotic expansion",
        terms: 200,
    })
}

/// Exponentially scaled `e^{-x} I_ν(x)`; finite for every admissible input.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_i(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x >= i_crossover(nu) {
        i_scaled_asymptotic(nu, x)
    } else {
        Ok(ln_i_scaled_series(nu, x)?.exp())
    }
}

/// Modified Bessel function of the first kind `I_ν(x)`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_i(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let v = if x >= i_crossover(nu) {
        i_scaled_asymptotic(nu, x)? * x.exp()
    } else {
        (ln_i_scaled_series(nu, x)? + x).exp()
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "bessel_i" })
    }
}

/// ln I_ν(x), usable far beyond the overflow threshold of `bessel_i`.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_i(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x >= i_crossover(nu) {
        Ok(i_scaled_asymptotic(nu, x)?.ln() + x)
    } else {
        Ok(ln_i_scaled_series(nu, x)? + x)
    }
}

/// ln(e^{x} K_ν(x)).
fn ln_k_scaled(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(domain("bessel_k", format!("order {nu} must be finite")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("bessel_k", format!("x = {x} must be positive (K diverges at 0)")));
    }
    let nu = nu.abs();
    // log of exp(-2x sinh²(t/2)) cosh(νt)
    let g = |t: f64| {
        let s = (0.5 * t).sinh();
        let e = (-2.0 * nu * t).exp();
        -2.0 * x * s * s + nu * t + (0.5 * (1.0 + e)).ln()
    };
    let h = 0.1f64.min(0.5 / (x * x + nu * nu).powf(0.25));
    let mut values = Vec::with_capacity(256);
    let mut g_max = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut k = 0usize;
    loop {
        let gk = g(k as f64 * h);
        values.push(gk);
        g_max = g_max.max(gk);
        if gk < prev && gk < g_max - 46.0 {
            break;
        }
        prev = gk;
        k += 1;
        if k > 2_000_000 {
            return Err(Error::NonConvergence {
                what: "bessel_k trapezoid",
                terms: k,
            });
        }
    }
    let mut sum = 0.5 * (values[0] - g_max).exp();
    for v in &values[1..] {
        sum += (v - g_max).exp();
    }
    Ok(g_max + (h * sum).ln())
}

/// Exponentially scaled `e^{x} K_ν(x)`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    let v = ln_k_scaled(nu, x)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "bessel_k_scaled" })
    }
}

/// Modified Bessel function of the second kind `K_ν(x)`, x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let v = (ln_k_scaled(nu, x)? - x).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { func: "bessel_k" })
    }
}

/// ln K_ν(x).
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_k_scaled(nu, x)? - x)
}
