//! The `verify` command: moment, oracle-equivalence and invariant checks.
//!
//! Every check runs regardless of earlier failures; the report carries one
//! row per check and the process exits nonzero iff any row failed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map};

use nlcs::algebra::{interior_deviation, AlgebraSpec};
use nlcs::beamsplitter::{bs_oracle, joint_coherent, joint_fock, joint_su11, JointDistribution, TwoModeState};
use nlcs::completeness::verify_moments;
use nlcs::states::{coherent_state_with, TruncatedState};
use nlcs::Error;

use crate::output::{Cell, Document, Table};
use crate::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
}

struct Check {
    name: String,
    value: Option<f64>,
    tolerance: f64,
    status: Status,
    detail: String,
}

/// Outcome of one check body: a measured deviation, or a reason to skip.
enum Measured {
    Value(f64, String),
    Skip(String),
}

fn check<F>(name: String, tolerance: f64, body: F) -> Check
where
    F: FnOnce() -> Result<Measured, String>,
{
    match body() {
        Ok(Measured::Value(v, detail)) => Check {
            name,
            value: Some(v),
            tolerance,
            status: if v <= tolerance { Status::Pass } else { Status::Fail },
            detail,
        },
        Ok(Measured::Skip(detail)) => Check {
            name,
            value: None,
            tolerance,
            status: Status::Skipped,
            detail,
        },
        Err(detail) => Check {
            name,
            value: None,
            tolerance,
            status: Status::Fail,
            detail,
        },
    }
}

fn es(e: Error) -> String {
    e.to_string()
}

fn split(state: &TruncatedState) -> JointDistribution {
    bs_oracle(&TwoModeState::with_vacuum(state)).probabilities()
}

fn moments_check(spec: &AlgebraSpec, name: &str, quad_tol: f64) -> Check {
    let (n_max, tol) = if *spec == AlgebraSpec::identity() { (15, 1e-8) } else { (10, 1e-6) };
    check(format!("moments/{name}"), tol, || {
        let rep = match verify_moments(spec, n_max, quad_tol) {
            Err(Error::Unsupported(why)) => return Ok(Measured::Skip(why)),
            other => other.map_err(es)?,
        };
        let unsupported = rep.entries.iter().filter(|e| !e.supported).count();
        if unsupported == rep.entries.len() {
            return Ok(Measured::Skip("density not evaluable for any moment".into()));
        }
        let detail = if unsupported > 0 {
            format!("n <= {n_max}; {unsupported} moments unsupported")
        } else {
            format!("n <= {n_max}")
        };
        Ok(Measured::Value(rep.max_relative_error, detail))
    })
}

fn residual_check(spec: &AlgebraSpec, name: &str, cfg: &RunConfig) -> Check {
    check(format!("eigen_residual/{name}"), 1e-8, || {
        let opts = cfg.state_options();
        let worst = cfg
            .grid()
            .par_iter()
            .map(|&r| {
                let z = Complex64::from_polar(r, 0.7);
                let st = coherent_state_with(spec, z, opts).map_err(|e| format!("|z| = {r}: {e}"))?;
                Ok(st.eigen_residual(spec, z))
            })
            .collect::<Result<Vec<f64>, String>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Measured::Value(worst, format!("{} grid points", cfg.steps)))
    })
}

fn relations_check(spec: &AlgebraSpec, name: &str) -> Check {
    check(format!("algebra_relations/{name}"), 1e-12, || {
        let cutoff = 30;
        let ops = spec.operators(cutoff).map_err(es)?;
        let (a, ad, n) = (&ops.annihilation, &ops.creation, &ops.number);
        let scale = 1.0 + ad.abs().max() * ad.abs().max();
        let e = DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| if i == j { spec.e_of_n(i) } else { 0.0 });
        let grading = interior_deviation(&(n * a - a * n), &(-a));
        let product = interior_deviation(&(ad * a), &e);
        Ok(Measured::Value(grading.max(product) / scale, "relative to 1 + max|a†|²".into()))
    })
}

fn channel_q_check(spec: &AlgebraSpec, name: &str, cfg: &RunConfig) -> Check {
    check(format!("channel_q_halving/{name}"), 1e-9, || {
        let mut worst = 0.0f64;
        for r in [1.0, 2.0, 4.0] {
            let st = coherent_state_with(spec, Complex64::new(r, 0.0), cfg.state_options()).map_err(es)?;
            let s = st.statistics();
            if s.mean == 0.0 {
                continue;
            }
            let (h, v) = split(&st).marginal_statistics();
            worst = worst.max((h.mandel_q - s.mandel_q / 2.0).abs());
            worst = worst.max((v.mandel_q - s.mandel_q / 2.0).abs());
        }
        Ok(Measured::Value(worst, "|z| in {1, 2, 4}".into()))
    })
}

fn conservation_check(spec: &AlgebraSpec, name: &str, cfg: &RunConfig) -> Check {
    check(format!("number_conservation/{name}"), 1e-12, || {
        let st = coherent_state_with(spec, Complex64::new(4.0, 0.0), cfg.state_options()).map_err(es)?;
        let p_in = st.photon_distribution();
        let p_out = split(&st).total_number_distribution();
        let tv = 0.5 * p_in.iter().zip(&p_out).map(|(a, b)| (a - b).abs()).sum::<f64>();
        Ok(Measured::Value(tv, "total variation at |z| = 4".into()))
    })
}

fn oracle_checks(cfg: &RunConfig) -> Vec<Check> {
    let identity = AlgebraSpec::identity();
    let su11 = AlgebraSpec::su11(1.0, 1.0, 1.0).expect("valid parameters");
    let opts = cfg.state_options();
    vec![
        check("oracle/fock".into(), 1e-9, || {
            let worst = (0..=40usize)
                .into_par_iter()
                .map(|n| joint_fock(n).max_abs_diff(&split(&TruncatedState::number(n, n))))
                .reduce(|| 0.0, f64::max);
            Ok(Measured::Value(worst, "n <= 40".into()))
        }),
        check("oracle/coherent".into(), 1e-9, || {
            let mut worst = 0.0f64;
            for r in [1.0, 2.0, 4.0] {
                let z = Complex64::new(r, 0.0);
                let closed = joint_coherent(z, opts.tol).map_err(es)?;
                let st = coherent_state_with(&identity, z, opts).map_err(es)?;
                worst = worst.max(closed.max_abs_diff(&split(&st)));
            }
            Ok(Measured::Value(worst, "|z| in {1, 2, 4}".into()))
        }),
        check("oracle/su11".into(), 1e-9, || {
            let mut worst = 0.0f64;
            for r in [1.0, 4.0, 6.0] {
                let z = Complex64::new(r, 0.0);
                let closed = joint_su11(z, opts.tol).map_err(es)?;
                let st = coherent_state_with(&su11, z, opts).map_err(es)?;
                worst = worst.max(closed.max_abs_diff(&split(&st)));
            }
            Ok(Measured::Value(worst, "|z| in {1, 4, 6}".into()))
        }),
        check("oracle/unitarity".into(), 1e-12, || {
            let t = 60;
            let mut a = DMatrix::from_element(t + 1, t + 1, Complex64::new(0.0, 0.0));
            for n in 0..=t {
                for m in 0..=(t - n) {
                    let phase = 1.3 * n as f64 + 0.7 * (m * m) as f64;
                    a[(n, m)] = Complex64::new(phase.sin(), (2.1 * phase).cos());
                }
            }
            let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let psi = TwoModeState::from_amplitudes(a / Complex64::new(norm, 0.0), 0.0).map_err(es)?;
            let dev = (bs_oracle(&psi).norm_sqr() - psi.norm_sqr()).abs();
            Ok(Measured::Value(dev, "cutoff_total = 60".into()))
        }),
    ]
}

fn g2_reference_check() -> Check {
    check("g2/fock".into(), 1e-10, || {
        let mut worst = 0.0f64;
        for n in 1..=20usize {
            let (h, _) = joint_fock(n).marginal_statistics();
            let g = h.g2().map_err(es)?;
            worst = worst.max((g - (1.0 - 1.0 / n as f64)).abs());
        }
        Ok(Measured::Value(worst, "channel g2 of BS|n,0> against 1 - 1/n, n <= 20".into()))
    })
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
    }
}

/// Runs every check and returns the report with the overall verdict.
pub fn run(cfg: &RunConfig) -> (Document, bool) {
    let algebras: Vec<(String, AlgebraSpec)> = match &cfg.algebra {
        Some(spec) => vec![(spec.variant().name().to_string(), spec.clone())],
        None => vec![
            ("identity".into(), AlgebraSpec::identity()),
            ("su11".into(), AlgebraSpec::su11(1.0, 1.0, 1.0).expect("valid parameters")),
        ],
    };
    let mut checks = Vec::new();
    for (name, spec) in &algebras {
        checks.push(moments_check(spec, name, cfg.tol));
        checks.push(residual_check(spec, name, cfg));
        checks.push(relations_check(spec, name));
        checks.push(channel_q_check(spec, name, cfg));
        checks.push(conservation_check(spec, name, cfg));
    }
    checks.extend(oracle_checks(cfg));
    checks.push(g2_reference_check());

    let passed = checks.iter().all(|c| c.status != Status::Fail);
    let mut table = Table::new(["check", "value", "tolerance", "status", "detail"]);
    for c in &checks {
        table.rows.push(vec![
            Cell::Text(c.name.clone()),
            c.value.into(),
            c.tolerance.into(),
            status_name(c.status).into(),
            // commas would break the CSV column count
            Cell::Text(c.detail.replace(',', ";")),
        ]);
    }
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let mut extra = Map::new();
    extra.insert(
        "summary".into(),
        json!({
            "passed": passed,
            "pass": count(Status::Pass),
            "fail": count(Status::Fail),
            "skipped": count(Status::Skipped),
        }),
    );
    let alg = cfg.algebra.as_ref();
    let doc = Document {
        meta: cfg.meta("verify", alg),
        table,
        extra,
    };
    (doc, passed)
}
