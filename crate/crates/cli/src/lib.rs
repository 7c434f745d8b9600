//! Benchmark harness: runs solver × problem × initial-guess grids, emits
//! machine-readable results (CSV or JSON) with a timing sidecar, and drives
//! the diagnostic probes.
//!
//! Data rows are deterministic byte-for-byte for a fixed spec and seed;
//! wall-clock times and timestamps go to the metadata sidecar so they never
//! perturb the payload.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use nalgebra::DVector;
use serde::Serialize;

use qmnewt::baseline::run_fd_newton;
use qmnewt::diagnostics::approximation_scaling_probe;
use qmnewt::problems::{self, IgTag, Problem};
use qmnewt::solver::{run, NewtonMode, RunReport, RunStatus, Safeguard, SolverConfig};
use qmnewt::{KktCoupling, ModelVariant, StepVariant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// A sweep that violates its asserted monotone trend still emits its data,
/// then exits with this status.
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// At least one grid cell failed (not converged/max-iter).
    Failure(String),
    /// The mu-sweep monotonicity assertion failed.
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILURE,
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Assertion(_) => EXIT_ASSERTION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failure(m) | CliError::Assertion(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl std::error::Error for CliError {}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// The quadratic-model method (configured by model/step/safeguard).
    Qm,
    /// Finite-difference Newton comparator.
    FdNewton,
}

/// Output encoding for result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One benchmark request: the problem/IG grid plus solver configuration.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub problems: Vec<String>,
    pub igs: Vec<IgTag>,
    pub dim: Option<usize>,
    pub lambda: f64,
    pub mu: f64,
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    pub repetitions: usize,
    pub jobs: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            problems: vec![],
            igs: vec![IgTag::Ig1],
            dim: None,
            lambda: 1.0,
            mu: 1e-2,
            algorithm: Algorithm::Qm,
            config: SolverConfig::default(),
            repetitions: 1,
            jobs: 1,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.problems.is_empty() {
            return Err(CliError::Usage("at least one problem is required".into()));
        }
        if self.igs.is_empty() {
            return Err(CliError::Usage("at least one initial guess is required".into()));
        }
        if self.repetitions == 0 {
            return Err(CliError::Usage("repetitions must be >= 1".into()));
        }
        Ok(())
    }

    fn variant_label(&self) -> String {
        match self.algorithm {
            Algorithm::FdNewton => "fd-newton".to_string(),
            Algorithm::Qm => {
                let model = match self.config.model_variant {
                    ModelVariant::Full => "full",
                    ModelVariant::Simplified => "simplified",
                };
                let step = match self.config.step_variant {
                    StepVariant::NewtonDirect => "newton",
                    StepVariant::Sr1 => "sr1",
                    StepVariant::Bfgs => "bfgs",
                };
                let guard = match self.config.safeguard {
                    Safeguard::Pure => "pure",
                    Safeguard::Backtrack => "backtrack",
                };
                format!("{model}-{step}-{guard}")
            }
        }
    }
}

/// One deterministic result row; wall time lives in the sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunRow {
    pub problem: String,
    pub ig: String,
    pub rep: usize,
    pub variant: String,
    pub status: String,
    pub iters: usize,
    pub f_final: f64,
    pub grad_norm_final: f64,
    /// ‖x − x*‖∞ when a minimizer is on record (claimed-only ones included).
    pub err_x: Option<f64>,
    pub e1_inf_final: f64,
    pub e2_inf_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub seed: u64,
    pub variant: String,
    pub wall_times: Vec<f64>,
    pub total_wall_time: f64,
    pub failures: Vec<String>,
}

const RUN_HEADER: &str =
    "problem,ig,rep,variant,status,iters,f_final,grad_norm_final,err_x,e1_inf_final,e2_inf_final";

fn fmt_float(v: f64) -> String {
    // 17 significant digits, lossless for f64
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn run_rows_to_csv(rows: &[RunRow]) -> String {
    let mut out = String::from(RUN_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.ig,
            r.rep,
            r.variant,
            r.status,
            r.iters,
            fmt_float(r.f_final),
            fmt_float(r.grad_norm_final),
            fmt_opt(r.err_x),
            fmt_float(r.e1_inf_final),
            fmt_float(r.e2_inf_final),
        );
    }
    out
}

fn human_table(rows: &[RunRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<4} {:>3} {:<26} {:<12} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "problem", "ig", "rep", "variant", "status", "iters", "f", "|g|", "err_x", "E1", "E2"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:<4} {:>3} {:<26} {:<12} {:>6} {:>10.3e} {:>10.3e} {:>10} {:>10.3e} {:>10.3e}",
            r.problem,
            r.ig,
            r.rep,
            r.variant,
            r.status,
            r.iters,
            r.f_final,
            r.grad_norm_final,
            r.err_x.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into()),
            r.e1_inf_final,
            r.e2_inf_final,
        );
    }
    out
}

fn lookup(spec: &BenchSpec, name: &str) -> Result<Problem, CliError> {
    problems::by_name(name, spec.dim, spec.lambda, spec.mu).map_err(|e| CliError::Usage(e.to_string()))
}

fn make_row(spec: &BenchSpec, problem: &Problem, ig: IgTag, rep: usize) -> (RunRow, f64, Option<String>) {
    let x0 = problems::initial_guess(ig, problem.dim);
    let mut cfg = spec.config.clone();
    cfg.seed = spec.config.seed.wrapping_add(rep as u64);
    let started = Instant::now();
    let result: Result<RunReport, _> = match spec.algorithm {
        Algorithm::Qm => run(problem, &x0, &cfg),
        Algorithm::FdNewton => run_fd_newton(problem, &x0, &cfg),
    };
    let wall = started.elapsed().as_secs_f64();
    match result {
        Ok(report) => {
            let err_x = problem
                .known_xstar
                .as_ref()
                .map(|xs| (&report.x_star - xs).amax());
            let failure = match report.status {
                RunStatus::Converged | RunStatus::MaxIter => None,
                _ => Some(format!(
                    "{} {} rep{}: {}",
                    problem.name,
                    ig.label(),
                    rep,
                    report.failure.clone().unwrap_or_else(|| report.status.label().into())
                )),
            };
            let row = RunRow {
                problem: problem.name.clone(),
                ig: ig.label().to_string(),
                rep,
                variant: spec.variant_label(),
                status: report.status.label().to_string(),
                iters: report.iterations.len(),
                f_final: report.f_star,
                grad_norm_final: report.final_grad_norm(),
                err_x,
                e1_inf_final: report.final_e1_inf(),
                e2_inf_final: report.final_e2_inf(),
            };
            (row, wall, failure)
        }
        Err(e) => {
            let row = RunRow {
                problem: problem.name.clone(),
                ig: ig.label().to_string(),
                rep,
                variant: spec.variant_label(),
                status: "error".to_string(),
                iters: 0,
                f_final: f64::NAN,
                grad_norm_final: f64::NAN,
                err_x: None,
                e1_inf_final: f64::NAN,
                e2_inf_final: f64::NAN,
            };
            (row, wall, Some(format!("{} {} rep{}: {e}", problem.name, ig.label(), rep)))
        }
    }
}

/// Executes the grid (problems × IGs × repetitions), in spec order, using up
/// to `jobs` worker threads. Returns rows in spec order regardless of
/// completion order.
pub fn execute_grid(spec: &BenchSpec) -> Result<(Vec<RunRow>, RunMeta), CliError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for name in &spec.problems {
        let problem = lookup(spec, name)?;
        for &ig in &spec.igs {
            for rep in 0..spec.repetitions {
                cells.push((problem.clone(), ig, rep));
            }
        }
    }

    let total = cells.len();
    let results: Mutex<Vec<Option<(RunRow, f64, Option<String>)>>> =
        Mutex::new(vec![None; total]);
    let next = AtomicUsize::new(0);
    let workers = spec.jobs.max(1).min(total.max(1));
    let started = Instant::now();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= total {
                    break;
                }
                let (problem, ig, rep) = &cells[idx];
                let outcome = make_row(spec, problem, *ig, *rep);
                let mut guard = results.lock().expect("worker poisoned the results");
                guard[idx] = Some(outcome);
            });
        }
    });

    let collected = results.into_inner().expect("results intact");
    let mut rows = Vec::with_capacity(total);
    let mut wall_times = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for slot in collected {
        let (row, wall, failure) = slot.expect("every cell executed");
        rows.push(row);
        wall_times.push(wall);
        if let Some(f) = failure {
            failures.push(f);
        }
    }
    let meta = RunMeta {
        command: "run".into(),
        seed: spec.config.seed,
        variant: spec.variant_label(),
        wall_times,
        total_wall_time: started.elapsed().as_secs_f64(),
        failures,
    };
    Ok((rows, meta))
}

fn write_output(
    out: &Option<PathBuf>,
    format: OutputFormat,
    csv_payload: &str,
    json_payload: &serde_json::Value,
    human: &str,
    meta: &serde_json::Value,
) -> Result<(), CliError> {
    match out {
        None => {
            print!("{human}");
            Ok(())
        }
        Some(path) => {
            match format {
                OutputFormat::Csv => {
                    std::fs::write(path, csv_payload).map_err(io_err)?;
                    let sidecar = sidecar_path(path);
                    std::fs::write(
                        &sidecar,
                        serde_json::to_string_pretty(meta).expect("meta serializes") + "\n",
                    )
                    .map_err(io_err)?;
                }
                OutputFormat::Json => {
                    let mut doc = serde_json::Map::new();
                    doc.insert("meta".into(), meta.clone());
                    doc.insert("rows".into(), json_payload.clone());
                    std::fs::write(
                        path,
                        serde_json::to_string_pretty(&serde_json::Value::Object(doc))
                            .expect("doc serializes")
                            + "\n",
                    )
                    .map_err(io_err)?;
                }
            }
            Ok(())
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// `run` subcommand: execute the grid and write rows.
pub fn cmd_run(spec: &BenchSpec) -> Result<(), CliError> {
    let (rows, meta) = execute_grid(spec)?;
    let csv = run_rows_to_csv(&rows);
    let json_rows = serde_json::to_value(&rows).expect("rows serialize");
    let meta_json = serde_json::to_value(&meta).expect("meta serializes");
    write_output(&spec.out, spec.format, &csv, &json_rows, &human_table(&rows), &meta_json)?;
    if meta.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(meta.failures.join("; ")))
    }
}

/// One residual-table row: ℰ values at the requested checkpoints, with
/// `not_reached` markers past the end of the run.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub problem: String,
    pub ig: String,
    pub cells: Vec<Option<(f64, f64)>>,
}

pub fn residual_rows_to_csv(checkpoints: &[usize], rows: &[ResidualRow]) -> String {
    let mut header = String::from("problem,ig");
    for c in checkpoints {
        let _ = write!(header, ",e1_{c},e2_{c}");
    }
    let mut out = header;
    out.push('\n');
    for r in rows {
        let mut line = format!("{},{}", r.problem, r.ig);
        for cell in &r.cells {
            match cell {
                Some((e1, e2)) => {
                    let _ = write!(line, ",{},{}", fmt_float(*e1), fmt_float(*e2));
                }
                None => line.push_str(",not_reached,not_reached"),
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// ℰ at a checkpoint, read as the window-max of the 11 iterations around it
/// (restart passes report zero residuals, so the pointwise value at an exact
/// index measures scheduling luck rather than decay).
pub fn checkpoint_residuals(report: &RunReport, k: usize) -> Option<(f64, f64)> {
    if k >= report.iterations.len() {
        return None;
    }
    let lo = k.saturating_sub(5);
    let hi = (k + 5).min(report.iterations.len() - 1);
    let mut e1 = 0.0f64;
    let mut e2 = 0.0f64;
    for r in &report.iterations[lo..=hi] {
        e1 = e1.max(r.e1_inf);
        e2 = e2.max(r.e2_inf);
    }
    Some((e1, e2))
}

/// `residual-table` subcommand.
pub fn cmd_residual_table(spec: &BenchSpec, checkpoints: &[usize]) -> Result<(), CliError> {
    spec.validate()?;
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("checkpoints must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    let mut wall_times = Vec::new();
    let started = Instant::now();
    for name in &spec.problems {
        let problem = lookup(spec, name)?;
        for &ig in &spec.igs {
            let x0 = problems::initial_guess(ig, problem.dim);
            let t0 = Instant::now();
            let report = run(&problem, &x0, &spec.config)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            wall_times.push(t0.elapsed().as_secs_f64());
            let cells = checkpoints
                .iter()
                .map(|&c| checkpoint_residuals(&report, c))
                .collect();
            rows.push(ResidualRow {
                problem: problem.name.clone(),
                ig: ig.label().to_string(),
                cells,
            });
        }
    }
    let csv = residual_rows_to_csv(checkpoints, &rows);
    let json_rows = serde_json::to_value(&rows).expect("rows serialize");
    let meta = serde_json::json!({
        "command": "residual-table",
        "seed": spec.config.seed,
        "checkpoints": checkpoints,
        "wall_times": wall_times,
        "total_wall_time": started.elapsed().as_secs_f64(),
    });
    let human = {
        let mut s = String::new();
        let _ = writeln!(s, "{:<12} {:<4} {}", "problem", "ig",
            checkpoints.iter().map(|c| format!("{:>10} {:>10}", format!("E1@{c}"), format!("E2@{c}"))).collect::<Vec<_>>().join(" "));
        for r in &rows {
            let mut line = format!("{:<12} {:<4}", r.problem, r.ig);
            for cell in &r.cells {
                match cell {
                    Some((e1, e2)) => line.push_str(&format!(" {e1:>10.3e} {e2:>10.3e}")),
                    None => line.push_str(&format!(" {:>10} {:>10}", "n/r", "n/r")),
                }
            }
            let _ = writeln!(s, "{line}");
        }
        s
    };
    write_output(&spec.out, spec.format, &csv, &json_rows, &human, &meta)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub radius: f64,
    pub grad_err: f64,
    pub hess_err: f64,
}

/// `probe` subcommand: approximation-order measurement on an analytic
/// problem.
pub fn cmd_probe(
    problem_name: &str,
    center: Option<Vec<f64>>,
    radii: &[f64],
    seed: u64,
    out: &Option<PathBuf>,
    format: OutputFormat,
) -> Result<(), CliError> {
    if radii.is_empty() {
        return Err(CliError::Usage("radii must be non-empty and strictly decreasing".into()));
    }
    let problem = problems::by_name(problem_name, None, 1.0, 1e-2)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if !problem.has_grad() || !problem.has_hess() {
        return Err(CliError::Usage(format!(
            "problem '{problem_name}' lacks the analytic derivatives the probe needs"
        )));
    }
    let center = match center {
        Some(c) if c.len() == problem.dim => DVector::from_vec(c),
        Some(c) => {
            return Err(CliError::Usage(format!(
                "--center has {} coordinates, problem needs {}",
                c.len(),
                problem.dim
            )))
        }
        None => DVector::zeros(problem.dim),
    };
    let report = approximation_scaling_probe(&problem, &center, radii, seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let rows: Vec<ProbeRow> = report
        .per_radius
        .iter()
        .map(|r| ProbeRow { radius: r.radius, grad_err: r.grad_err, hess_err: r.hess_err })
        .collect();
    let mut csv = String::from("radius,grad_err,hess_err\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", fmt_float(r.radius), fmt_float(r.grad_err), fmt_float(r.hess_err));
    }
    let meta = serde_json::json!({
        "command": "probe",
        "problem": problem.name,
        "seed": seed,
        "grad_slope": report.grad_slope,
        "hess_slope": report.hess_slope,
        "floor_detected": report.floor_detected,
    });
    let mut human = String::new();
    for r in &rows {
        let _ = writeln!(human, "radius {:>9.3e}: grad_err {:>10.3e}  hess_err {:>10.3e}", r.radius, r.grad_err, r.hess_err);
    }
    if report.floor_detected {
        let _ = writeln!(human, "floor-detected: errors at the float floor, slopes not meaningful");
    } else {
        let _ = writeln!(
            human,
            "grad_slope {:.3}  hess_slope {:.3}",
            report.grad_slope.unwrap_or(f64::NAN),
            report.hess_slope.unwrap_or(f64::NAN)
        );
    }
    print!("{human}");
    let json_rows = serde_json::to_value(&rows).expect("rows serialize");
    if out.is_some() {
        write_output(out, format, &csv, &json_rows, "", &meta)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub x_inf_median: f64,
    pub repetitions: usize,
}

/// Protocol for the relaxation sweep (see README): unconstrained
/// relaxation, backtracking safeguard, x₀ = 0.05·𝟙, median of ‖x*‖∞ over
/// the repetitions.
pub fn mu_sweep_rows(
    mus: &[f64],
    lambda: f64,
    repetitions: usize,
    base_seed: u64,
    max_iter: usize,
) -> Result<Vec<SweepRow>, CliError> {
    if mus.is_empty() {
        return Err(CliError::Usage("at least one mu is required".into()));
    }
    if mus.iter().any(|m| *m <= 0.0) {
        return Err(CliError::Usage("mus must be positive".into()));
    }
    if mus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage("mus must be strictly descending".into()));
    }
    let mut rows = Vec::with_capacity(mus.len());
    for &mu in mus {
        let mut problem = problems::nonsmooth_p4_relaxed(lambda, mu)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        problem.box_bounds = None;
        let x0 = DVector::from_element(problem.dim, 0.05);
        let mut values = Vec::with_capacity(repetitions);
        for rep in 0..repetitions {
            let cfg = SolverConfig {
                max_iter,
                safeguard: Safeguard::Backtrack,
                seed: base_seed.wrapping_add(rep as u64),
                ..SolverConfig::default()
            };
            let report = run(&problem, &x0, &cfg).map_err(|e| CliError::Failure(e.to_string()))?;
            values.push(report.x_star.amax());
        }
        values.sort_by(|a, b| a.total_cmp(b));
        let mid = values.len() / 2;
        let median = if values.len() % 2 == 0 {
            0.5 * (values[mid - 1] + values[mid])
        } else {
            values[mid]
        };
        rows.push(SweepRow { mu, x_inf_median: median, repetitions });
    }
    Ok(rows)
}

/// `mu-sweep` subcommand: emits ‖x*‖∞ per µ and asserts the monotone
/// decrease when more than one µ is given.
pub fn cmd_mu_sweep(
    mus: &[f64],
    lambda: f64,
    repetitions: usize,
    base_seed: u64,
    max_iter: usize,
    out: &Option<PathBuf>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let rows = mu_sweep_rows(mus, lambda, repetitions, base_seed, max_iter)?;
    let mut csv = String::from("mu,x_inf_median,repetitions\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", fmt_float(r.mu), fmt_float(r.x_inf_median), r.repetitions);
    }
    let mut human = String::new();
    for r in &rows {
        let _ = writeln!(human, "mu {:>9.1e}: |x*|inf median {:>11.3e} over {} runs", r.mu, r.x_inf_median, r.repetitions);
    }
    print!("{human}");
    let meta = serde_json::json!({
        "command": "mu-sweep",
        "seed": base_seed,
        "lambda": lambda,
        "protocol": "unprojected relaxation, backtrack, x0 = 0.05, median over repetitions",
    });
    let json_rows = serde_json::to_value(&rows).expect("rows serialize");
    if out.is_some() {
        write_output(out, format, &csv, &json_rows, "", &meta)?;
    }
    if rows.len() > 1 {
        let monotone = rows.windows(2).all(|w| w[1].x_inf_median < w[0].x_inf_median);
        if !monotone {
            return Err(CliError::Assertion(
                "the sweep is not strictly decreasing; full data emitted above".into(),
            ));
        }
    }
    Ok(())
}

/// Parses comma-separated enum-ish flags used by the binary.
pub mod parse {
    use super::*;

    pub fn problem_list(s: &str) -> Vec<String> {
        s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
    }

    pub fn ig_list(s: &str) -> Result<Vec<IgTag>, CliError> {
        s.split(',')
            .map(|t| {
                IgTag::parse(t.trim())
                    .ok_or_else(|| CliError::Usage(format!("unknown initial guess '{t}' (IG1|IG2|IG3)")))
            })
            .collect()
    }

    pub fn float_list(s: &str) -> Result<Vec<f64>, CliError> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("'{t}' is not a number")))
            })
            .collect()
    }

    pub fn usize_list(s: &str) -> Result<Vec<usize>, CliError> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("'{t}' is not an integer")))
            })
            .collect()
    }

    pub fn model_variant(s: &str) -> Result<ModelVariant, CliError> {
        match s {
            "full" => Ok(ModelVariant::Full),
            "simplified" => Ok(ModelVariant::Simplified),
            _ => Err(CliError::Usage(format!("unknown model '{s}' (full|simplified)"))),
        }
    }

    pub fn step_variant(s: &str) -> Result<StepVariant, CliError> {
        match s {
            "newton" => Ok(StepVariant::NewtonDirect),
            "sr1" => Ok(StepVariant::Sr1),
            "bfgs" => Ok(StepVariant::Bfgs),
            _ => Err(CliError::Usage(format!("unknown step '{s}' (newton|sr1|bfgs)"))),
        }
    }

    pub fn safeguard(s: &str) -> Result<Safeguard, CliError> {
        match s {
            "pure" => Ok(Safeguard::Pure),
            "backtrack" => Ok(Safeguard::Backtrack),
            _ => Err(CliError::Usage(format!("unknown safeguard '{s}' (pure|backtrack)"))),
        }
    }

    pub fn kkt_coupling(s: &str) -> Result<KktCoupling, CliError> {
        match s {
            "printed" => Ok(KktCoupling::Printed),
            "full" => Ok(KktCoupling::Full),
            _ => Err(CliError::Usage(format!("unknown kkt coupling '{s}' (printed|full)"))),
        }
    }

    pub fn newton_mode(s: &str) -> Result<NewtonMode, CliError> {
        match s {
            "damped" => Ok(NewtonMode::Damped),
            "pure" => Ok(NewtonMode::Pure),
            _ => Err(CliError::Usage(format!("unknown newton mode '{s}' (damped|pure)"))),
        }
    }

    pub fn algorithm(s: &str) -> Result<Algorithm, CliError> {
        match s {
            "qm" => Ok(Algorithm::Qm),
            "fd-newton" => Ok(Algorithm::FdNewton),
            _ => Err(CliError::Usage(format!("unknown variant '{s}' (qm|fd-newton)"))),
        }
    }

    pub fn output_format(s: &str) -> Result<OutputFormat, CliError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (csv|json)"))),
        }
    }
}

/// Default seed resolution: flag beats the `QMNEWT_SEED` environment
/// variable, which beats the built-in default of 1.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Ok(env) = std::env::var("QMNEWT_SEED") {
        if let Ok(v) = env.parse::<u64>() {
            return v;
        }
    }
    1
}
