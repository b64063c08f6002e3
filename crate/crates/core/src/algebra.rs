//! Generalized oscillator algebras defined through an E-function.
//!
//! The ladder operators act as `â_E|n⟩ = √E(n)|n−1⟩` and
//! `â_E†|n⟩ = √E(n+1)|n+1⟩`, so `â_E†â_E = E(n̂)` and
//! `[â_E, â_E†] = E(n̂+1) − E(n̂)`. Every variant sets `E(0) = 0`; the
//! polynomial formulas apply from `n = 1` on.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::specfun::log_gamma;

/// Levels scanned at construction for negative or vanishing E(n).
pub const VALIDATION_RANGE: usize = 10_000;

/// The f² function of an f-oscillator, `E(n) = n f²(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FSquared {
    /// `f²(n) = sinh(λn) / (n sinh λ)`, the q-deformation.
    QDeformation { lambda: f64 },
    /// `table[k] = f²(k+1)`; levels past the table reuse the last entry.
    Table(Vec<f64>),
}

/// The E-function families.
#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// `E(n) = n`, the ordinary boson.
    Identity,
    /// `E(n) = Π_p (α_p n + β_p)` for n ≥ 1.
    Polynomial { alphas: Vec<f64>, betas: Vec<f64> },
    FOscillator { f_squared: FSquared },
    /// `E(n) = sinh(λn)/sinh λ`, `λ = ln q`.
    QDeformed { lambda: f64 },
    /// `E(n) = α₁α₂n² + α₂β₁n`.
    Su11 { alpha1: f64, alpha2: f64, beta1: f64 },
    /// `E(n+2) = (n+1)(n+½−ε)(n+3/2−ε)`, `E(0) = E(1) = 0`.
    SusyCubic { epsilon: f64 },
    /// `E(n+2) = w + n`, `E(0) = E(1) = 0`.
    Distorted { w: f64 },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Identity => "identity",
            Variant::Polynomial { .. } => "polynomial",
            Variant::FOscillator { .. } => "f_oscillator",
            Variant::QDeformed { .. } => "q_deformed",
            Variant::Su11 { .. } => "su11",
            Variant::SusyCubic { .. } => "susy_cubic",
            Variant::Distorted { .. } => "distorted",
        }
    }
}

/// Polynomial factorization `E(n) = γ Π (n + δ_p)` of a polynomial-family spec.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialForm {
    pub gamma: f64,
    pub deltas: Vec<f64>,
}

/// A validated, immutable E-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraDef", into = "AlgebraDef")]
pub struct AlgebraSpec {
    variant: Variant,
    ladder_base: usize,
}

/// `⟨n−1|â_E|n⟩ = √E(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderElement {
    pub n: usize,
    pub value: f64,
}

fn ln_sinh(a: f64) -> f64 {
    // a > 0
    a + (0.5 * (1.0 - (-2.0 * a).exp())).ln()
}

impl AlgebraSpec {
    pub fn new(variant: Variant) -> Result<Self> {
        validate_parameters(&variant)?;
        let mut spec = Self {
            variant,
            ladder_base: 0,
        };
        let mut base = 0;
        for n in 1..=VALIDATION_RANGE {
            let e = spec.e_of_n(n);
            if e < 0.0 || e.is_nan() {
                return Err(Error::NegativeE { n, value: e });
            }
            if e == 0.0 {
                base = n;
            }
        }
        spec.ladder_base = base;
        Ok(spec)
    }

    pub fn identity() -> Self {
        Self::new(Variant::Identity).expect("identity is valid")
    }

    pub fn polynomial(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        Self::new(Variant::Polynomial { alphas, betas })
    }

    pub fn f_oscillator(f_squared: FSquared) -> Result<Self> {
        Self::new(Variant::FOscillator { f_squared })
    }

    pub fn q_deformed(lambda: f64) -> Result<Self> {
        Self::new(Variant::QDeformed { lambda })
    }

    pub fn su11(alpha1: f64, alpha2: f64, beta1: f64) -> Result<Self> {
        Self::new(Variant::Su11 {
            alpha1,
            alpha2,
            beta1,
        })
    }

    pub fn susy_cubic(epsilon: f64) -> Result<Self> {
        Self::new(Variant::SusyCubic { epsilon })
    }

    pub fn distorted(w: f64) -> Result<Self> {
        Self::new(Variant::Distorted { w })
    }

    /// The registered example algebras, one per family.
    pub fn presets() -> Vec<(&'static str, AlgebraSpec)> {
        vec![
            ("identity", Self::identity()),
            (
                "polynomial",
                Self::polynomial(vec![1.0, 1.0, 1.0], vec![0.0, 0.5, 2.0]).unwrap(),
            ),
            (
                "f_oscillator",
                Self::f_oscillator(FSquared::QDeformation { lambda: 0.3 }).unwrap(),
            ),
            ("q_deformed", Self::q_deformed(0.2).unwrap()),
            ("su11", Self::su11(1.0, 1.0, 1.0).unwrap()),
            ("susy_cubic", Self::susy_cubic(-0.5).unwrap()),
            ("distorted", Self::distorted(0.5).unwrap()),
        ]
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    /// Highest level with E(n) = 0. Coherent states live on the chain
    /// `|ladder_base⟩, |ladder_base+1⟩, …`, which `â_E` maps into itself.
    pub fn ladder_base(&self) -> usize {
        self.ladder_base
    }

    /// E(n).
    pub fn e_of_n(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        match &self.variant {
            Variant::Identity => nf,
            Variant::Polynomial { alphas, betas } => alphas
                .iter()
                .zip(betas)
                .map(|(a, b)| a * nf + b)
                .product(),
            Variant::FOscillator { f_squared } => match f_squared {
                FSquared::QDeformation { lambda } => q_e(*lambda, n),
                FSquared::Table(t) => nf * t[(n - 1).min(t.len() - 1)],
            },
            Variant::QDeformed { lambda } => q_e(*lambda, n),
            Variant::Su11 {
                alpha1,
                alpha2,
                beta1,
            } => alpha1 * alpha2 * nf * nf + alpha2 * beta1 * nf,
            Variant::SusyCubic { epsilon } => {
                if n < 2 {
                    0.0
                } else {
                    let m = nf - 2.0;
                    (m + 1.0) * (m + 0.5 - epsilon) * (m + 1.5 - epsilon)
                }
            }
            Variant::Distorted { w } => {
                if n < 2 {
                    0.0
                } else {
                    w + nf - 2.0
                }
            }
        }
    }

    /// ln E(n); `-∞` where E vanishes. Stays finite where E(n) itself overflows.
    pub fn ln_e_of_n(&self, n: usize) -> f64 {
        match &self.variant {
            Variant::QDeformed { lambda }
            | Variant::FOscillator {
                f_squared: FSquared::QDeformation { lambda },
            } if n > 0 && *lambda != 0.0 => {
                let a = lambda.abs();
                ln_sinh(a * n as f64) - ln_sinh(a)
            }
            _ => self.e_of_n(n).ln(),
        }
    }

    /// `γ Π(n + δ_p)` factorization, for Identity, Polynomial and Su11.
    pub fn polynomial_form(&self) -> Option<PolynomialForm> {
        let (alphas, betas): (Vec<f64>, Vec<f64>) = match &self.variant {
            Variant::Identity => (vec![1.0], vec![0.0]),
            Variant::Polynomial { alphas, betas } => (alphas.clone(), betas.clone()),
            Variant::Su11 {
                alpha1,
                alpha2,
                beta1,
            } => (vec![*alpha1, *alpha2], vec![*beta1, 0.0]),
            _ => return None,
        };
        Some(PolynomialForm {
            gamma: alphas.iter().product(),
            deltas: betas.iter().zip(&alphas).map(|(b, a)| b / a).collect(),
        })
    }

    /// ln E(n)! as the direct sum Σ_{k=1}^{n} ln E(k).
    pub fn log_e_factorial_direct(&self, n: usize) -> Result<f64> {
        let mut acc = 0.0;
        for k in 1..=n {
            let e = self.e_of_n(k);
            if e == 0.0 {
                return Err(Error::ZeroDivisor { n: k });
            }
            acc += self.ln_e_of_n(k);
        }
        Ok(acc)
    }

    /// ln E(n)!, with `E(0)! = 1`.
    ///
    /// Polynomial families with every `δ_p > −1` use
    /// `E(n)! = γ^n Π Γ(n+1+δ_p)/Γ(1+δ_p)`.
    pub fn log_e_factorial(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        if n <= self.ladder_base {
            return Err(Error::ZeroDivisor {
                n: self.ladder_base,
            });
        }
        if let Some(form) = self.polynomial_form() {
            if form.gamma > 0.0 && form.deltas.iter().all(|d| *d > -1.0) {
                let nf = n as f64;
                let mut acc = nf * form.gamma.ln();
                for d in &form.deltas {
                    acc += log_gamma(nf + 1.0 + d)? - log_gamma(1.0 + d)?;
                }
                return Ok(acc);
            }
        }
        self.log_e_factorial_direct(n)
    }

    /// ln Π_{j=1}^{k} E(base + j): the factorial along the ladder chain that
    /// starts at [`ladder_base`](Self::ladder_base). Equals ln E(k)! when the
    /// base is 0.
    pub fn log_ladder_factorial(&self, k: usize) -> f64 {
        if self.ladder_base == 0 {
            if let Ok(v) = self.log_e_factorial(k) {
                return v;
            }
        }
        (1..=k).map(|j| self.ln_e_of_n(self.ladder_base + j)).sum()
    }

    /// √E(n) for n = 1..=cutoff.
    pub fn ladder_elements(&self, cutoff: usize) -> Result<Vec<LadderElement>> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
        }
        (1..=cutoff)
            .map(|n| {
                let e = self.e_of_n(n);
                if e < 0.0 || e.is_nan() {
                    Err(Error::NegativeE { n, value: e })
                } else {
                    Ok(LadderElement { n, value: e.sqrt() })
                }
            })
            .collect()
    }

    /// Eigenvalue of `[â_E, â_E†]` on |n⟩.
    pub fn commutator_diagonal(&self, n: usize) -> f64 {
        self.e_of_n(n + 1) - self.e_of_n(n)
    }

    /// Levels n ≤ cutoff annihilated by `â_E`.
    pub fn annihilated_levels(&self, cutoff: usize) -> BTreeSet<usize> {
        (0..=cutoff).filter(|&n| self.e_of_n(n) == 0.0).collect()
    }

    /// Truncated matrices of `â_E` and `â_E†` over levels 0..=cutoff.
    pub fn operators(&self, cutoff: usize) -> Result<TruncatedOperators> {
        let elems = self.ladder_elements(cutoff)?;
        let dim = cutoff + 1;
        let mut a = DMatrix::zeros(dim, dim);
        for el in &elems {
            a[(el.n - 1, el.n)] = el.value;
        }
        let a_dag = a.transpose();
        let number = DMatrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 });
        Ok(TruncatedOperators {
            annihilation: a,
            creation: a_dag,
            number,
        })
    }

    /// `K₀ = α₁α₂n̂ + ½(α₂β₁ + α₁α₂)` for Su11 specs.
    pub fn su11_k0(&self, cutoff: usize) -> Option<DMatrix<f64>> {
        match self.variant {
            Variant::Su11 {
                alpha1,
                alpha2,
                beta1,
            } => Some(DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
                if i == j {
                    alpha1 * alpha2 * i as f64 + 0.5 * (alpha2 * beta1 + alpha1 * alpha2)
                } else {
                    0.0
                }
            })),
            _ => None,
        }
    }
}

fn q_e(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        n as f64
    } else {
        (lambda * n as f64).sinh() / lambda.sinh()
    }
}

fn validate_parameters(variant: &Variant) -> Result<()> {
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name} = {v} must be finite")))
        }
    };
    match variant {
        Variant::Identity => Ok(()),
        Variant::Polynomial { alphas, betas } => {
            if alphas.is_empty() || alphas.len() != betas.len() {
                return Err(Error::InvalidParameter(format!(
                    "polynomial needs equally many alphas and betas (got {} and {})",
                    alphas.len(),
                    betas.len()
                )));
            }
            for (a, b) in alphas.iter().zip(betas) {
                finite("alpha", *a)?;
                finite("beta", *b)?;
                if *a == 0.0 {
                    return Err(Error::InvalidParameter("alpha_p must be non-zero".into()));
                }
            }
            Ok(())
        }
        Variant::FOscillator { f_squared } => match f_squared {
            FSquared::QDeformation { lambda } => finite("lambda", *lambda),
            FSquared::Table(t) => {
                if t.is_empty() {
                    return Err(Error::InvalidParameter("f_squared table is empty".into()));
                }
                if let Some(v) = t.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidParameter(format!(
                        "f_squared table entry {v} must be finite and non-negative"
                    )));
                }
                if *t.last().unwrap() <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "last f_squared table entry must be positive".into(),
                    ));
                }
                Ok(())
            }
        },
        Variant::QDeformed { lambda } => finite("lambda", *lambda),
        Variant::Su11 {
            alpha1,
            alpha2,
            beta1,
        } => {
            finite("alpha1", *alpha1)?;
            finite("alpha2", *alpha2)?;
            finite("beta1", *beta1)?;
            if *alpha1 == 0.0 || *alpha2 == 0.0 {
                return Err(Error::InvalidParameter("alpha1, alpha2 must be non-zero".into()));
            }
            Ok(())
        }
        Variant::SusyCubic { epsilon } => {
            finite("epsilon", *epsilon)?;
            if *epsilon >= 0.5 {
                return Err(Error::InvalidParameter(format!(
                    "epsilon = {epsilon} must lie below 1/2"
                )));
            }
            Ok(())
        }
        Variant::Distorted { w } => {
            finite("w", *w)?;
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("w = {w} must be non-negative")));
            }
            Ok(())
        }
    }
}

/// Matrices over levels 0..=cutoff. Products that raise the level past the
/// cutoff are wrong in the last row/column (the truncation boundary).
#[derive(Debug, Clone)]
pub struct TruncatedOperators {
    pub annihilation: DMatrix<f64>,
    pub creation: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

impl TruncatedOperators {
    pub fn cutoff(&self) -> usize {
        self.number.nrows() - 1
    }
}

/// Largest entrywise deviation over the leading `cutoff × cutoff` block,
/// i.e. with the truncation-boundary row and column excluded.
pub fn interior_deviation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let dim = a.nrows() - 1;
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    worst
}

/// On-disk description of an algebra: `{"variant": ..., "params": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDef {
    pub variant: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

fn get_f64(params: &Map<String, Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidParameter(format!("missing numeric parameter `{key}`")))
}

fn get_vec(params: &Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    let arr = params
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidParameter(format!("missing array parameter `{key}`")))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::InvalidParameter(format!("non-numeric entry in `{key}`")))
        })
        .collect()
}

impl TryFrom<AlgebraDef> for AlgebraSpec {
    type Error = Error;

    fn try_from(def: AlgebraDef) -> Result<Self> {
        let p = &def.params;
        let variant = match def.variant.as_str() {
            "identity" => Variant::Identity,
            "polynomial" => Variant::Polynomial {
                alphas: get_vec(p, "alphas")?,
                betas: get_vec(p, "betas")?,
            },
            "f_oscillator" => {
                let f_squared = match p.get("f_squared") {
                    Some(Value::String(name)) if name == "q_deformation" => {
                        FSquared::QDeformation {
                            lambda: get_f64(p, "lambda")?,
                        }
                    }
                    Some(Value::Array(_)) => FSquared::Table(get_vec(p, "f_squared")?),
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "f_squared must be \"q_deformation\" or a table, got {other:?}"
                        )))
                    }
                };
                Variant::FOscillator { f_squared }
            }
            "q_deformed" => Variant::QDeformed {
                lambda: get_f64(p, "lambda")?,
            },
            "su11" => Variant::Su11 {
                alpha1: get_f64(p, "alpha1")?,
                alpha2: get_f64(p, "alpha2")?,
                beta1: get_f64(p, "beta1")?,
            },
            "susy_cubic" => Variant::SusyCubic {
                epsilon: get_f64(p, "epsilon")?,
            },
            "distorted" => Variant::Distorted {
                w: get_f64(p, "w")?,
            },
            other => {
                return Err(Error::InvalidParameter(format!("unknown variant `{other}`")));
            }
        };
        AlgebraSpec::new(variant)
    }
}

impl From<AlgebraSpec> for AlgebraDef {
    fn from(spec: AlgebraSpec) -> Self {
        let params = match &spec.variant {
            Variant::Identity => json!({}),
            Variant::Polynomial { alphas, betas } => json!({ "alphas": alphas, "betas": betas }),
            Variant::FOscillator { f_squared } => match f_squared {
                FSquared::QDeformation { lambda } => {
                    json!({ "f_squared": "q_deformation", "lambda": lambda })
                }
                FSquared::Table(t) => json!({ "f_squared": t }),
            },
            Variant::QDeformed { lambda } => json!({ "lambda": lambda }),
            Variant::Su11 {
                alpha1,
                alpha2,
                beta1,
            } => json!({ "alpha1": alpha1, "alpha2": alpha2, "beta1": beta1 }),
            Variant::SusyCubic { epsilon } => json!({ "epsilon": epsilon }),
            Variant::Distorted { w } => json!({ "w": w }),
        };
        AlgebraDef {
            variant: spec.variant.name().to_string(),
            params: match params {
                Value::Object(m) => m,
                _ => unreachable!(),
            },
        }
    }
}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra definitions always serialize")
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
