//! `nlcs`: emits figure data for nonlinear coherent states and runs the
//! verification suites.

mod output;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use nlcs::algebra::AlgebraSpec;
use nlcs::beamsplitter::{
    channel_report, factorization_test, joint_coherent, joint_fock, joint_su11, split_marginal,
    JointDistribution, DEFAULT_SEPARABILITY_THRESHOLD,
};
use nlcs::completeness::verify_moments;
use nlcs::states::{coherent_state_with, PhotonStatistics, StateOptions, DEFAULT_CUTOFF_CAP};

use output::{gnuplot_script, Cell, Document, Format, Table};

const TOOL: &str = concat!("nlcs ", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "nlcs", version, about = "Nonlinear coherent states: figure data and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Algebra definition file, or the name of a built-in preset.
    #[arg(long, global = true)]
    algebra: Option<String>,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    z_min: f64,
    #[arg(long, global = true, default_value_t = 30.0, allow_negative_numbers = true)]
    z_max: f64,
    /// Number of grid points, both ends included.
    #[arg(long, global = true, default_value_t = 300)]
    steps: usize,
    /// Truncation and quadrature tolerance, in (0, 1e-3].
    #[arg(long, global = true, default_value_t = 1e-12, allow_negative_numbers = true)]
    tol: f64,
    /// Fixed number of Fock levels instead of the adaptive cutoff.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Photon distribution, mean and Mandel Q over the |z| grid.
    StateScan {
        /// Fock levels whose probabilities are emitted.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
        levels: Vec<usize>,
    },
    /// Joint output distribution of the beam splitter and channel statistics.
    Joint {
        #[arg(long, value_enum)]
        input: JointInput,
        /// Photon number for fock, |z| otherwise.
        #[arg(long)]
        param: f64,
    },
    /// Moment, oracle and invariant checks; exit status 1 on any failure.
    Verify,
    /// Channel g² over the |z| grid (over integer n in [z-min, z-max] for fock).
    G2Scan {
        #[arg(long, value_enum, default_value_t = G2Input::Algebra)]
        input: G2Input,
    },
    /// Closure-measure moments against E(n)!.
    Moments {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum JointInput {
    Fock,
    Coherent,
    Su11,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum G2Input {
    Algebra,
    Fock,
    Coherent,
}

/// Failures split by exit status.
enum Failure {
    Config(String),
    Compute(String),
}

type Outcome<T> = std::result::Result<T, Failure>;

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

/// Validated run configuration.
struct RunConfig {
    algebra: Option<AlgebraSpec>,
    z_min: f64,
    z_max: f64,
    steps: usize,
    tol: f64,
    cutoff: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
}

impl RunConfig {
    fn from_args(c: &Common) -> Outcome<Self> {
        if !(c.z_min >= 0.0 && c.z_min.is_finite()) {
            return Err(config(format!("--z-min must be a finite value ≥ 0, got {}", c.z_min)));
        }
        if !(c.z_max >= c.z_min && c.z_max.is_finite()) {
            return Err(config(format!("--z-max must be finite and ≥ --z-min, got {}", c.z_max)));
        }
        if c.steps < 1 {
            return Err(config("--steps must be at least 1"));
        }
        if !(c.tol > 0.0 && c.tol <= 1e-3) {
            return Err(config(format!("--tol must lie in (0, 1e-3], got {}", c.tol)));
        }
        if c.cutoff == Some(0) {
            return Err(config("--cutoff must be at least 1"));
        }
        let algebra = c.algebra.as_deref().map(load_algebra).transpose()?;
        Ok(Self {
            algebra,
            z_min: c.z_min,
            z_max: c.z_max,
            steps: c.steps,
            tol: c.tol,
            cutoff: c.cutoff,
            out: c.out.clone(),
            format: c.format,
        })
    }

    fn require_algebra(&self) -> Outcome<&AlgebraSpec> {
        self.algebra.as_ref().ok_or_else(|| config("this command needs --algebra"))
    }

    fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.z_min];
        }
        let h = (self.z_max - self.z_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.z_max } else { self.z_min + h * i as f64 })
            .collect()
    }

    fn state_options(&self) -> StateOptions {
        StateOptions {
            tol: self.tol,
            cap: DEFAULT_CUTOFF_CAP,
            cutoff: self.cutoff,
        }
    }

    fn meta(&self, command: &str, algebra: Option<&AlgebraSpec>) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!(TOOL));
        m.insert("command".into(), json!(command));
        let alg = algebra.map_or(Value::Null, |a| serde_json::to_value(a).expect("serializable"));
        m.insert("algebra".into(), alg);
        m.insert("tol".into(), json!(self.tol));
        m.insert("cutoff".into(), self.cutoff.map_or(json!("adaptive"), |c| json!(c)));
        m.insert("z_grid".into(), json!([self.z_min, self.z_max, self.steps]));
        m
    }
}

fn load_algebra(arg: &str) -> Outcome<AlgebraSpec> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("{arg}: {e}")))?;
        return AlgebraSpec::from_json(&text).map_err(|e| config(format!("{arg}: {e}")));
    }
    AlgebraSpec::presets()
        .into_iter()
        .find(|(name, _)| *name == arg)
        .map(|(_, spec)| spec)
        .ok_or_else(|| config(format!("{arg}: no such file or preset")))
}

/// Evaluates `f` on every grid point in parallel and returns rows in grid
/// order; the first failing point (by index) is reported.
fn scan<F>(points: &[f64], f: F) -> Outcome<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> std::result::Result<Vec<Cell>, String> + Sync,
{
    let results: Vec<_> = points.par_iter().map(|&z| f(z).map_err(|e| (z, e))).collect();
    results
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|(z, e)| Failure::Compute(format!("failed at |z| = {z}: {e}")))
}

fn statistics_cells(s: &PhotonStatistics) -> [Cell; 3] {
    [s.mean.into(), s.variance.into(), s.mandel_q.into()]
}

fn state_scan(cfg: &RunConfig, levels: &[usize]) -> Outcome<(Document, Vec<String>, Vec<String>)> {
    let spec = cfg.require_algebra()?;
    let opts = cfg.state_options();
    let mut table = Table::new(["z".to_string()]);
    table.columns.extend(levels.iter().map(|n| format!("P{n}")));
    table.columns.extend(["mean", "variance", "mandel_q", "cutoff", "tail_bound"].map(String::from));
    table.rows = scan(&cfg.grid(), |z| {
        let st = coherent_state_with(spec, Complex64::new(z, 0.0), opts).map_err(|e| e.to_string())?;
        let p = st.photon_distribution();
        let mut row: Vec<Cell> = vec![z.into()];
        row.extend(levels.iter().map(|&n| Cell::Real(p.get(n).copied().unwrap_or(0.0))));
        row.extend(statistics_cells(&st.statistics()));
        row.push(st.cutoff().into());
        row.push(st.tail_bound().into());
        Ok(row)
    })?;
    let p_columns = (2..2 + levels.len()).map(|c| format!("using 1:{c} with lines")).collect();
    let settings = vec!["set xlabel '|z|'".to_string()];
    let doc = Document {
        meta: cfg.meta("state-scan", Some(spec)),
        table,
        extra: Map::new(),
    };
    Ok((doc, settings, p_columns))
}

fn joint(cfg: &RunConfig, input: JointInput, param: f64) -> Outcome<(Document, Vec<String>, Vec<String>)> {
    if !(param >= 0.0 && param.is_finite()) {
        return Err(config(format!("--param must be finite and ≥ 0, got {param}")));
    }
    let z = Complex64::new(param, 0.0);
    let dist: JointDistribution = match input {
        JointInput::Fock => {
            if param.fract() != 0.0 || param > 100_000.0 {
                return Err(config(format!("--param must be a photon number for fock, got {param}")));
            }
            joint_fock(param as usize)
        }
        JointInput::Coherent => joint_coherent(z, cfg.tol).map_err(|e| Failure::Compute(e.to_string()))?,
        JointInput::Su11 => joint_su11(z, cfg.tol).map_err(|e| Failure::Compute(e.to_string()))?,
    };
    let mut extra = Map::new();
    let input_name = input.to_possible_value().expect("named").get_name().to_string();
    extra.insert("input".into(), json!({ "kind": input_name, "param": param }));
    extra.insert("cutoff_total".into(), json!(dist.cutoff_total()));
    let report = match channel_report(&dist) {
        Ok(r) => serde_json::to_value(r).expect("serializable"),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    extra.insert("channel_report".into(), report);
    let fact = factorization_test(&dist, DEFAULT_SEPARABILITY_THRESHOLD);
    extra.insert("factorization".into(), serde_json::to_value(fact).expect("serializable"));
    let mut table = Table::new(["n", "m", "p"]);
    table.rows = dist.rows().into_iter().map(|(n, m, p)| vec![n.into(), m.into(), p.into()]).collect();
    let settings = vec![
        "set xlabel 'n (horizontal)'".to_string(),
        "set ylabel 'm (vertical)'".to_string(),
        "set size ratio -1".to_string(),
    ];
    let clauses = vec!["using 1:2:3 with points pointtype 5 palette notitle".to_string()];
    let doc = Document {
        meta: cfg.meta("joint", None),
        table,
        extra,
    };
    Ok((doc, settings, clauses))
}

fn g2_scan(cfg: &RunConfig, input: G2Input) -> Outcome<(Document, Vec<String>, Vec<String>)> {
    let settings = vec!["set ylabel 'g2'".to_string()];
    let clauses = vec!["using 1:2 with lines".to_string(), "using 1:3 with points".to_string()];
    if input == G2Input::Fock {
        let lo = cfg.z_min.ceil().max(1.0) as usize;
        let hi = cfg.z_max.floor() as usize;
        let mut table = Table::new(["n", "g2_channel", "g2_input"]);
        for n in lo..=hi {
            let r = channel_report(&joint_fock(n)).map_err(|e| Failure::Compute(format!("n = {n}: {e}")))?;
            let g_in = PhotonStatistics::from_distribution(&indicator(n)).g2().ok();
            table.rows.push(vec![n.into(), r.g2_horizontal.into(), g_in.into()]);
        }
        let doc = Document {
            meta: cfg.meta("g2-scan", None),
            table,
            extra: Map::new(),
        };
        let mut settings = settings;
        settings.push("set xlabel 'n'".to_string());
        return Ok((doc, settings, clauses));
    }
    let spec = match input {
        G2Input::Coherent => AlgebraSpec::identity(),
        _ => cfg.require_algebra()?.clone(),
    };
    let opts = cfg.state_options();
    let mut table = Table::new(["z", "g2_channel", "g2_input", "mean"]);
    table.rows = scan(&cfg.grid(), |z| {
        let st = coherent_state_with(&spec, Complex64::new(z, 0.0), opts).map_err(|e| e.to_string())?;
        let p = st.photon_distribution();
        let channel = PhotonStatistics::from_distribution(&split_marginal(&p));
        let input = st.statistics();
        Ok(vec![z.into(), channel.g2().ok().into(), input.g2().ok().into(), input.mean.into()])
    })?;
    let mut settings = settings;
    settings.push("set xlabel '|z|'".to_string());
    let doc = Document {
        meta: cfg.meta("g2-scan", Some(&spec)),
        table,
        extra: Map::new(),
    };
    Ok((doc, settings, clauses))
}

fn indicator(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[n] = 1.0;
    p
}

fn moments(cfg: &RunConfig, n_max: usize) -> Outcome<(Document, Vec<String>, Vec<String>)> {
    let spec = cfg.require_algebra()?;
    let rep = verify_moments(spec, n_max, cfg.tol).map_err(|e| match e {
        nlcs::Error::Unsupported(_) => config(e),
        other => Failure::Compute(other.to_string()),
    })?;
    let mut table = Table::new(["n", "quadrature", "target", "relative_error", "supported"]);
    for e in &rep.entries {
        table.rows.push(vec![
            e.n.into(),
            e.quadrature_value.into(),
            e.target_log.exp().into(),
            e.relative_error.into(),
            Cell::Int(e.supported as u64),
        ]);
    }
    let mut extra = Map::new();
    extra.insert("max_relative_error".into(), json!(rep.max_relative_error));
    let doc = Document {
        meta: cfg.meta("moments", Some(spec)),
        table,
        extra,
    };
    let settings = vec!["set xlabel 'n'".to_string(), "set logscale y".to_string()];
    let clauses = vec!["using 1:4 with linespoints".to_string()];
    Ok((doc, settings, clauses))
}

fn emit(cfg: &RunConfig, doc: &Document, plot: Option<(Vec<String>, Vec<String>)>, stem: &str) -> Outcome<()> {
    let text = doc.render(cfg.format);
    let Some(path) = &cfg.out else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error, p: &Path| Failure::Compute(format!("{}: {e}", p.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io(e, parent))?;
    }
    std::fs::write(path, text).map_err(|e| io(e, path))?;
    if let (Some((settings, clauses)), Format::Csv) = (plot, cfg.format) {
        let dir = path.parent().unwrap_or(Path::new(".")).join("gnuplot");
        std::fs::create_dir_all(&dir).map_err(|e| io(e, &dir))?;
        let name = path.file_stem().map_or(stem.into(), |s| s.to_string_lossy().into_owned());
        let script_name = format!("{name}.gp");
        let script = dir.join(&script_name);
        let body = gnuplot_script(path, &script_name, &settings, &clauses);
        std::fs::write(&script, body).map_err(|e| io(e, &script))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<bool> {
    let cfg = RunConfig::from_args(&cli.common)?;
    let (doc, settings, clauses, stem) = match &cli.command {
        Command::StateScan { levels } => {
            let (d, s, c) = state_scan(&cfg, levels)?;
            (d, s, c, "state_scan")
        }
        Command::Joint { input, param } => {
            let (d, s, c) = joint(&cfg, *input, *param)?;
            (d, s, c, "joint")
        }
        Command::G2Scan { input } => {
            let (d, s, c) = g2_scan(&cfg, *input)?;
            (d, s, c, "g2_scan")
        }
        Command::Moments { n_max } => {
            let (d, s, c) = moments(&cfg, *n_max)?;
            (d, s, c, "moments")
        }
        Command::Verify => {
            let (doc, passed) = verify::run(&cfg);
            emit(&cfg, &doc, None, "verify")?;
            return Ok(passed);
        }
    };
    emit(&cfg, &doc, Some((settings, clauses)), stem)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
