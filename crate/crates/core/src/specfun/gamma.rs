//! Gamma-family functions: ln Γ (real and complex), Γ, ψ, B and Γ(s, x).

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("log_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(libm::lgamma(x))
}

/// Γ(x) for x > 0; overflows above x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma", format!("x = {x} must be positive and finite")));
    }
    let g = libm::tgamma(x);
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Overflow { func: "gamma" })
    }
}

/// Euler beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b), evaluated in log space.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain("beta", format!("a = {a}, b = {b} must both be positive")));
    }
    Ok(log_beta(a, b)?.exp())
}

pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Digamma ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", format!("x = {x} must be positive and finite")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Principal-sheet-agnostic ln Γ(z) for Re z > 0.
///
/// The imaginary part is only determined modulo 2π; callers exponentiate.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(domain("log_gamma_complex", format!("Re z = {} must be positive", z.re)));
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Stirling series, B_{2k} / (2k (2k-1) z^{2k-1})
    const COEF: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in COEF.iter().rev() {
        series = series * inv2 + *c;
    }
    series *= inv;
    Ok((z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift)
}

/// Upper incomplete gamma function Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    let q = regularized_upper_gamma(s, x)?;
    let v = (log_gamma(s)? + q.ln()).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            func: "upper_incomplete_gamma",
        })
    }
}

/// Q(s, x) = Γ(s, x)/Γ(s).
pub fn regularized_upper_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("upper_incomplete_gamma", format!("s = {s} must be positive")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(domain("upper_incomplete_gamma", format!("x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let prefactor = (s * x.ln() - x - log_gamma(s)?).exp();
    if x < s + 1.0 {
        // lower series: γ(s,x) = x^s e^{-x} Σ x^k / (s (s+1) ... (s+k))
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut ap = s;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok(1.0 - sum * prefactor);
            }
        }
        Err(Error::NonConvergence {
            what: "incomplete gamma series",
            terms: 10_000,
        })
    } else {
        // modified Lentz on the continued fraction for Γ(s,x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok(prefactor * h);
            }
        }
        Err(Error::NonConvergence {
            what: "incomplete gamma continued fraction",
            terms: 10_000,
        })
    }
}
