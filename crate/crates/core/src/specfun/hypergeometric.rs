//! Generalized hypergeometric series `pFq(a; b; x)` by term recursion.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Truncation control for power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rel_tol = {rel_tol} must be positive")));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

fn is_non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `pFq(a; b; x)` summed until `|t_n| ≤ rel_tol·|partial sum|` with the
/// terms already decreasing.
pub fn p_f_q(a: &[f64], b: &[f64], x: f64, ctl: SeriesControl) -> Result<f64> {
    if let Some((index, &value)) = b.iter().enumerate().find(|(_, v)| is_non_positive_integer(**v)) {
        return Err(Error::Pole { index, value });
    }
    if !x.is_finite() || a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(domain("p_f_q", "non-finite parameter or argument"));
    }
    let (p, q) = (a.len(), b.len());
    if p > q + 1 || (p == q + 1 && x.abs() >= 1.0) {
        return Err(domain(
            "p_f_q",
            format!("series for p = {p}, q = {q} diverges at x = {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let mut term = 1.0;
    let mut sum = CompensatedSum::default();
    sum.add(term);
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let num: f64 = a.iter().map(|&aj| aj + nf).product();
        let den: f64 = b.iter().map(|&bj| bj + nf).product();
        let ratio = num / den * x / (nf + 1.0);
        term *= ratio;
        if term == 0.0 {
            // a terminating series: some a_j is a non-positive integer
            return Ok(sum.value());
        }
        sum.add(term);
        if term.abs() <= ctl.rel_tol * sum.value().abs() && ratio.abs() < 1.0 {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence {
        what: "p_f_q",
        terms: ctl.max_terms,
    })
}
