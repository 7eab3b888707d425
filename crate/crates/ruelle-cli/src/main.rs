//! Batch front-end: every library module as a subcommand with
//! reproducible configs and CSV/JSON outputs.
//!
//! Flags override config-file fields which override defaults. Data goes to
//! files only; errors go to stderr as one JSON object and a nonzero exit.
//! Each run writes a `<output>.meta.json` sidecar recording the tool
//! version, the seed and the SHA-256 of every input file, so identical
//! configs produce byte-identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use ruelle::calculus::{dlog_lambda, gibbs_derivative, gram_matrix, variance_metric};
use ruelle::equilibria::{
    constrained_equilibrium, entropy_surface, prescribe, ConstraintProblem,
};
use ruelle::flow::flow_trace;
use ruelle::geometry2::{grid_scan, Quantity, Region};
use ruelle::gibbs::{gibbs_measure, pressure, MarkovMeasure};
use ruelle::sft::FnTable;
use ruelle::transfer::normalize;
use ruelle::wasserstein::{roughness_scan, Topology};

#[derive(Parser)]
#[command(name = "ruelle", version, about = "Transfer-operator calculus on full shifts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a potential (column-stochastic transfer matrix).
    Normalize(CommonArgs),
    /// Gibbs measure of a potential, as Markov-measure JSON.
    Gibbs(CommonArgs),
    /// Entropy of a measure (or of the Gibbs measure of a potential).
    Entropy(CommonArgs),
    /// Pressure log λ of a potential.
    Pressure(CommonArgs),
    /// Variance metric: Gram matrix over a family, or a single pairing.
    Metric(MetricArgs),
    /// First derivatives: d(log λ) along ζ, or the Gibbs-map derivative.
    Derivative(MetricArgs),
    /// Solve rv(μ_{B+Σaφ}) = target for the coefficients.
    Prescribe(ProblemArgs),
    /// Constrained equilibrium state (target 0).
    Equilibrium(ProblemArgs),
    /// Pressure gradient-flow trace over a time grid.
    Flow(FlowArgs),
    /// Entropy surface over a rotation-vector grid.
    Surface(SurfaceArgs),
    /// Grid scan of the two-symbol model quantities.
    Geom2(Geom2Args),
    /// Wasserstein scaling scan of a potential perturbation.
    W2scan(W2Args),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Potential (FnTable JSON).
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Markov-measure JSON (alternative input for `entropy`).
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Recorded in the metadata sidecar.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    potential: Option<PathBuf>,
    /// JSON array of FnTables (Gram-matrix mode).
    #[arg(long)]
    phi: Option<PathBuf>,
    /// Direction table (pairwise mode / derivative direction).
    #[arg(long)]
    zeta: Option<PathBuf>,
    /// Second direction (pairwise mode) or test function (derivative).
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem file: {"B": FnTable, "Phi": [FnTable, ...], "target": [..]}.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Coefficients CSV.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Measure JSON (default: <output>.measure.json).
    #[arg(long)]
    measure_output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial potential A₀.
    #[arg(long)]
    a0: Option<PathBuf>,
    /// Driving potential B.
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem file providing B and Phi (target ignored).
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Grid file: JSON array of rotation vectors.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// One-dimensional sweep bounds (alternative to --grid).
    #[arg(long)]
    w0: Option<f64>,
    #[arg(long)]
    w1: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Geom2Args {
    #[arg(long)]
    config: Option<PathBuf>,
    /// One of: entropy, K, Ktilde, E, G.
    #[arg(long)]
    quantity: Option<String>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    x1: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    y1: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Default: geom2_<quantity>_<step>.csv.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct W2Args {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long)]
    zeta: Option<PathBuf>,
    /// Largest perturbation size; the grid decreases geometrically.
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_factor: Option<f64>,
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long)]
    level: Option<u32>,
    /// interval or circle.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

/// A CLI failure with a machine-readable code.
struct Failure {
    code: String,
    message: String,
}

impl Failure {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Failure { code: code.into(), message: message.into() }
    }
}

impl From<ruelle::Error> for Failure {
    fn from(e: ruelle::Error) -> Self {
        let code = match &e {
            ruelle::Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            ruelle::Error::AlphabetMismatch(..) => "AlphabetMismatch",
            ruelle::Error::MemoryBelowTable { .. } => "MemoryBelowTable",
            ruelle::Error::MemoryOverflow(..) => "MemoryOverflow",
            ruelle::Error::NonConvergence(..) => "NonConvergence",
            ruelle::Error::NotMeanZero(..) => "NotMeanZero",
            ruelle::Error::StepTooSmall(..) => "StepTooSmall",
            ruelle::Error::DependentConstraints(..) => "DependentConstraints",
            ruelle::Error::TargetOutsideRotationSet { .. } => "TargetOutsideRotationSet",
            ruelle::Error::BoundaryValue(..) => "BoundaryValue",
            ruelle::Error::LevelMismatch(..) => "LevelMismatch",
            ruelle::Error::LevelTooLarge(..) => "LevelTooLarge",
            ruelle::Error::InvalidInput(..) => "InvalidInput",
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new("Io", e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new("Json", e.to_string())
    }
}

/// Tracks input files and their hashes for the metadata sidecar.
struct Run {
    command: &'static str,
    seed: Option<u64>,
    inputs: Vec<(String, String)>,
    config: Map<String, Value>,
}

impl Run {
    fn new(command: &'static str, config: &Option<PathBuf>, seed: Option<u64>) -> Result<Self, Failure> {
        let mut run = Run { command, seed, inputs: Vec::new(), config: Map::new() };
        if let Some(path) = config {
            let bytes = fs::read(path)?;
            run.note_input(path, &bytes);
            run.config = serde_json::from_slice(&bytes)?;
        }
        Ok(run)
    }

    fn note_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push((path.display().to_string(), hex));
    }

    /// flag > config file > caller default
    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| {
            self.config.get(key).and_then(Value::as_str).map(PathBuf::from)
        })
    }

    fn f64(&self, flag: Option<f64>, key: &str) -> Option<f64> {
        flag.or_else(|| self.config.get(key).and_then(Value::as_f64))
    }

    fn u64(&self, flag: Option<u64>, key: &str) -> Option<u64> {
        flag.or_else(|| self.config.get(key).and_then(Value::as_u64))
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone()
            .or_else(|| self.config.get(key).and_then(Value::as_str).map(String::from))
    }

    fn require_path(&self, flag: &Option<PathBuf>, key: &str) -> Result<PathBuf, Failure> {
        self.path(flag, key)
            .ok_or_else(|| Failure::new("MissingArgument", format!("--{key} (or config field \"{key}\") is required")))
    }

    fn require_f64(&self, flag: Option<f64>, key: &str) -> Result<f64, Failure> {
        self.f64(flag, key)
            .ok_or_else(|| Failure::new("MissingArgument", format!("--{key} is required")))
    }

    fn load_table(&mut self, path: &Path) -> Result<FnTable, Failure> {
        let bytes = fs::read(path)?;
        self.note_input(path, &bytes);
        Ok(serde_json::from_slice(&bytes)?)
    }

    fn load_tables(&mut self, path: &Path) -> Result<Vec<FnTable>, Failure> {
        let bytes = fs::read(path)?;
        self.note_input(path, &bytes);
        Ok(serde_json::from_slice(&bytes)?)
    }

    fn load_measure(&mut self, path: &Path) -> Result<MarkovMeasure, Failure> {
        let bytes = fs::read(path)?;
        self.note_input(path, &bytes);
        Ok(serde_json::from_slice(&bytes)?)
    }

    fn load_problem(&mut self, path: &Path) -> Result<ConstraintProblem, Failure> {
        let bytes = fs::read(path)?;
        self.note_input(path, &bytes);
        Ok(serde_json::from_slice(&bytes)?)
    }

    /// Writes the metadata sidecar next to the primary output.
    fn write_meta(&self, output: &Path, extra: Map<String, Value>) -> Result<(), Failure> {
        let mut inputs = Map::new();
        for (path, digest) in &self.inputs {
            inputs.insert(path.clone(), Value::String(digest.clone()));
        }
        let mut meta = Map::new();
        meta.insert("command".into(), json!(self.command));
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        meta.insert("seed".into(), match self.seed {
            Some(s) => json!(s),
            None => Value::Null,
        });
        meta.insert("inputs".into(), Value::Object(inputs));
        for (k, v) in extra {
            meta.insert(k, v);
        }
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".meta.json");
        let path = output.with_file_name(name);
        write_text(&path, &format!("{}\n", serde_json::to_string_pretty(&Value::Object(meta))?))
    }
}

/// 17 significant digits, '.' decimal separator.
fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_text(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content.as_bytes())?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    write_text(path, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Normalize(a) => cmd_normalize(a),
        Cmd::Gibbs(a) => cmd_gibbs(a),
        Cmd::Entropy(a) => cmd_entropy(a),
        Cmd::Pressure(a) => cmd_pressure(a),
        Cmd::Metric(a) => cmd_metric(a),
        Cmd::Derivative(a) => cmd_derivative(a),
        Cmd::Prescribe(a) => cmd_prescribe(a, false),
        Cmd::Equilibrium(a) => cmd_prescribe(a, true),
        Cmd::Flow(a) => cmd_flow(a),
        Cmd::Surface(a) => cmd_surface(a),
        Cmd::Geom2(a) => cmd_geom2(a),
        Cmd::W2scan(a) => cmd_w2scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::to_string(&json!({"error": f.code, "message": f.message}))
                    .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", f.code))
            );
            ExitCode::FAILURE
        }
    }
}

fn cmd_normalize(a: CommonArgs) -> Result<(), Failure> {
    let mut run = Run::new("normalize", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let output = run.require_path(&a.output, "output")?;
    let table = run.load_table(&potential)?;
    let normalized = normalize(&table)?;
    write_json(&output, &normalized)?;
    run.write_meta(&output, Map::new())
}

fn cmd_gibbs(a: CommonArgs) -> Result<(), Failure> {
    let mut run = Run::new("gibbs", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let output = run.require_path(&a.output, "output")?;
    let table = run.load_table(&potential)?;
    let mu = gibbs_measure(&table)?;
    write_json(&output, &mu)?;
    run.write_meta(&output, Map::new())
}

fn cmd_entropy(a: CommonArgs) -> Result<(), Failure> {
    let mut run = Run::new("entropy", &a.config, a.seed)?;
    let output = run.require_path(&a.output, "output")?;
    let mu = match (run.path(&a.measure, "measure"), run.path(&a.potential, "potential")) {
        (Some(path), _) => run.load_measure(&path)?,
        (None, Some(path)) => gibbs_measure(&run.load_table(&path)?)?,
        (None, None) => {
            return Err(Failure::new("MissingArgument", "need --measure or --potential"))
        }
    };
    write_json(&output, &json!({ "entropy": mu.entropy() }))?;
    run.write_meta(&output, Map::new())
}

fn cmd_pressure(a: CommonArgs) -> Result<(), Failure> {
    let mut run = Run::new("pressure", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let output = run.require_path(&a.output, "output")?;
    let table = run.load_table(&potential)?;
    write_json(&output, &json!({ "pressure": pressure(&table)? }))?;
    run.write_meta(&output, Map::new())
}

fn cmd_metric(a: MetricArgs) -> Result<(), Failure> {
    let mut run = Run::new("metric", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let output = run.require_path(&a.output, "output")?;
    let base = run.load_table(&potential)?;
    if let Some(phi_path) = run.path(&a.phi, "phi") {
        let phis = run.load_tables(&phi_path)?;
        let gram = gram_matrix(&base, &phis)?;
        let mut csv = String::from("i,j,value\n");
        for i in 0..gram.dim() {
            for j in 0..gram.dim() {
                csv.push_str(&format!("{i},{j},{}\n", sig17(gram.matrix().get(i, j))));
            }
        }
        write_text(&output, &csv)?;
        let mut extra = Map::new();
        extra.insert("min_eigenvalue".into(), json!(gram.min_eigenvalue()));
        run.write_meta(&output, extra)
    } else {
        let zeta_path = run.require_path(&a.zeta, "zeta")?;
        let eta_path = run.require_path(&a.eta, "eta")?;
        let zeta = run.load_table(&zeta_path)?;
        let eta = run.load_table(&eta_path)?;
        let value = variance_metric(&base, &zeta, &eta)?;
        write_json(&output, &json!({ "value": value }))?;
        run.write_meta(&output, Map::new())
    }
}

fn cmd_derivative(a: MetricArgs) -> Result<(), Failure> {
    let mut run = Run::new("derivative", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let zeta_path = run.require_path(&a.zeta, "zeta")?;
    let output = run.require_path(&a.output, "output")?;
    let base = run.load_table(&potential)?;
    let zeta = run.load_table(&zeta_path)?;
    let (kind, value) = match run.path(&a.eta, "eta") {
        Some(eta_path) => {
            let phi = run.load_table(&eta_path)?;
            ("gibbs_map", gibbs_derivative(&base, &zeta, &phi)?)
        }
        None => ("dlog_lambda", dlog_lambda(&base, &zeta)?),
    };
    write_json(&output, &json!({ "kind": kind, "value": value }))?;
    run.write_meta(&output, Map::new())
}

fn cmd_prescribe(a: ProblemArgs, equilibrium: bool) -> Result<(), Failure> {
    let mut run = Run::new(if equilibrium { "equilibrium" } else { "prescribe" }, &a.config, a.seed)?;
    let problem_path = run.require_path(&a.problem, "problem")?;
    let output = run.require_path(&a.output, "output")?;
    let problem = run.load_problem(&problem_path)?;
    let measure_output = run.path(&a.measure_output, "measure_output").unwrap_or_else(|| {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".measure.json");
        output.with_file_name(name)
    });

    let mut extra = Map::new();
    let (coefficients, measure) = if equilibrium {
        let eq = constrained_equilibrium(&problem.base, &problem.observables)?;
        extra.insert("value".into(), json!(eq.value));
        (eq.coefficients, eq.measure)
    } else {
        let target = if problem.target.is_empty() {
            vec![0.0; problem.observables.len()]
        } else {
            problem.target.clone()
        };
        let coeff = prescribe(&problem.base, &problem.observables, &target)?;
        let mut pot = problem.base.clone();
        for (phi, &c) in problem.observables.iter().zip(&coeff) {
            pot = pot.add(&phi.scale(c))?;
        }
        (coeff, gibbs_measure(&pot)?)
    };

    let mut csv = String::from("k,a_k\n");
    for (k, c) in coefficients.iter().enumerate() {
        csv.push_str(&format!("{k},{}\n", sig17(*c)));
    }
    write_text(&output, &csv)?;
    write_json(&measure_output, &measure)?;
    run.write_meta(&output, extra)
}

fn cmd_flow(a: FlowArgs) -> Result<(), Failure> {
    let mut run = Run::new("flow", &a.config, a.seed)?;
    let a0_path = run.require_path(&a.a0, "a0")?;
    let b_path = run.require_path(&a.b, "b")?;
    let output = run.require_path(&a.output, "output")?;
    let t0 = run.f64(a.t0, "t0").unwrap_or(0.0);
    let t1 = run.require_f64(a.t1, "t1")?;
    let step = run.require_f64(a.step, "step")?;
    if step.is_nan() || step <= 0.0 {
        return Err(Failure::new("InvalidInput", "step must be positive"));
    }
    let a0 = run.load_table(&a0_path)?;
    let b = run.load_table(&b_path)?;
    let count = ((t1 - t0) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| t0 + i as f64 * step).collect();
    let rows = flow_trace(&a0, &b, &grid)?;
    let mut csv = String::from("t,pressure,entropy,metric_norm\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            sig17(r.t),
            sig17(r.pressure),
            sig17(r.entropy),
            sig17(r.metric_norm)
        ));
    }
    write_text(&output, &csv)?;
    run.write_meta(&output, Map::new())
}

fn cmd_surface(a: SurfaceArgs) -> Result<(), Failure> {
    let mut run = Run::new("surface", &a.config, a.seed)?;
    let problem_path = run.require_path(&a.problem, "problem")?;
    let output = run.require_path(&a.output, "output")?;
    let problem = run.load_problem(&problem_path)?;
    let k = problem.observables.len();

    let grid: Vec<Vec<f64>> = if let Some(grid_path) = run.path(&a.grid, "grid") {
        let bytes = fs::read(&grid_path)?;
        run.note_input(&grid_path, &bytes);
        serde_json::from_slice(&bytes)?
    } else {
        if k != 1 {
            return Err(Failure::new(
                "MissingArgument",
                "need --grid for families with more than one observable",
            ));
        }
        let w0 = run.require_f64(a.w0, "w0")?;
        let w1 = run.require_f64(a.w1, "w1")?;
        let step = run.require_f64(a.step, "step")?;
        let count = ((w1 - w0) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| vec![w0 + i as f64 * step]).collect()
    };

    let rows = entropy_surface(&problem.base, &problem.observables, &grid)?;
    let mut header: Vec<String> = (1..=k).map(|i| format!("w{i}")).collect();
    header.push("status".into());
    header.push("H".into());
    header.extend((1..=k).map(|i| format!("a{i}")));
    let mut csv = header.join(",");
    csv.push('\n');
    for row in rows {
        let mut cells: Vec<String> = row.w.iter().map(|v| sig17(*v)).collect();
        match row.point {
            Some(p) => {
                cells.push("ok".into());
                cells.push(sig17(p.entropy));
                cells.extend(p.coefficients.iter().map(|v| sig17(*v)));
            }
            None => {
                cells.push("outside".into());
                cells.push("nan".into());
                cells.extend((0..k).map(|_| "nan".to_string()));
            }
        }
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    write_text(&output, &csv)?;
    run.write_meta(&output, Map::new())
}

fn cmd_geom2(a: Geom2Args) -> Result<(), Failure> {
    let run = Run::new("geom2", &a.config, a.seed)?;
    let quantity_name = run
        .string(&a.quantity, "quantity")
        .ok_or_else(|| Failure::new("MissingArgument", "--quantity is required"))?;
    let quantity = match quantity_name.as_str() {
        "entropy" => Quantity::Entropy,
        "K" => Quantity::K,
        "Ktilde" => Quantity::KTilde,
        "E" => Quantity::E,
        "G" => Quantity::G,
        other => {
            return Err(Failure::new(
                "InvalidInput",
                format!("unknown quantity {other}; use entropy, K, Ktilde, E or G"),
            ))
        }
    };
    let step = run.require_f64(a.step, "step")?;
    let region = Region {
        x0: run.require_f64(a.x0, "x0")?,
        x1: run.require_f64(a.x1, "x1")?,
        y0: run.require_f64(a.y0, "y0")?,
        y1: run.require_f64(a.y1, "y1")?,
    };
    let output = run
        .path(&a.output, "output")
        .unwrap_or_else(|| PathBuf::from(format!("geom2_{quantity_name}_{step}.csv")));
    let rows = grid_scan(region, step, quantity)?;
    let mut csv = String::from("x,y,value\n");
    for (x, y, v) in rows {
        csv.push_str(&format!("{},{},{}\n", sig17(x), sig17(y), sig17(v)));
    }
    write_text(&output, &csv)?;
    run.write_meta(&output, Map::new())
}

fn cmd_w2scan(a: W2Args) -> Result<(), Failure> {
    let mut run = Run::new("w2scan", &a.config, a.seed)?;
    let potential = run.require_path(&a.potential, "potential")?;
    let zeta_path = run.require_path(&a.zeta, "zeta")?;
    let output = run.require_path(&a.output, "output")?;
    let t_start = run.f64(a.t_start, "t_start").unwrap_or(0.1);
    let t_factor = run.f64(a.t_factor, "t_factor").unwrap_or(0.5);
    let t_count = run.u64(a.t_count.map(|v| v as u64), "t_count").unwrap_or(8) as usize;
    let level = run.u64(a.level.map(u64::from), "level").unwrap_or(10) as u32;
    if t_factor.is_nan() || t_factor <= 0.0 || t_factor >= 1.0 {
        return Err(Failure::new("InvalidInput", "t_factor must lie in (0,1)"));
    }
    let topology_name = run.string(&a.topology, "topology").unwrap_or_else(|| "circle".into());
    let topology = match topology_name.as_str() {
        "interval" => Topology::Interval,
        "circle" => Topology::Circle,
        other => {
            return Err(Failure::new(
                "InvalidInput",
                format!("unknown topology {other}; use interval or circle"),
            ))
        }
    };
    let base = run.load_table(&potential)?;
    let zeta = run.load_table(&zeta_path)?;
    let grid: Vec<f64> = (0..t_count).map(|i| t_start * t_factor.powi(i as i32)).collect();
    let rows = roughness_scan(&base, &zeta, &grid, level, topology)?;
    let mut csv = String::from("# exploratory: continuum claims not asserted\n");
    csv.push_str("t,w1,w2,local_exponent,level,topology\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{level},{topology_name}\n",
            sig17(r.t),
            sig17(r.w1),
            sig17(r.w2),
            if r.local_exponent.is_nan() { "nan".to_string() } else { sig17(r.local_exponent) },
        ));
    }
    write_text(&output, &csv)?;
    run.write_meta(&output, Map::new())
}
