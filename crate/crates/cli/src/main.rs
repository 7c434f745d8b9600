//! `qmnewt`: benchmark CLI for the model-based Newton solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmnewt_cli::{
    cmd_mu_sweep, cmd_probe, cmd_residual_table, cmd_run, parse, resolve_seed, Algorithm,
    BenchSpec, CliError, OutputFormat,
};

#[derive(Parser)]
#[command(name = "qmnewt", version, about = "Model-based Newton solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Model update: full | simplified
    #[arg(long, default_value = "simplified")]
    model: String,
    /// Step rule: newton | sr1 | bfgs
    #[arg(long, default_value = "newton")]
    step: String,
    /// Safeguard: pure | backtrack
    #[arg(long, default_value = "backtrack")]
    safeguard: String,
    /// Gradient-norm stopping tolerance
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// RNG seed (QMNEWT_SEED overrides the default; this flag wins)
    #[arg(long)]
    seed: Option<u64>,
    /// Initial scatter radius (default: 1e-2 · max(1, |x0|))
    #[arg(long)]
    init_spread: Option<f64>,
    /// Multiplier system for the full model: printed | full
    #[arg(long, default_value = "printed")]
    kkt_coupling: String,
    /// Newton solve: damped | pure
    #[arg(long, default_value = "damped")]
    newton: String,
}

impl SolverFlags {
    fn to_config(&self) -> Result<qmnewt::SolverConfig, CliError> {
        Ok(qmnewt::SolverConfig {
            epsilon: self.eps,
            max_iter: self.max_iter,
            model_variant: parse::model_variant(&self.model)?,
            step_variant: parse::step_variant(&self.step)?,
            safeguard: parse::safeguard(&self.safeguard)?,
            init_spread: self.init_spread,
            seed: resolve_seed(self.seed),
            kkt_coupling: parse::kkt_coupling(&self.kkt_coupling)?,
            newton_mode: parse::newton_mode(&self.newton)?,
            gmres_tol: 1e-10,
            gmres_max_iter: 200,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// Problem name(s), comma-separated (see README for the roster)
    #[arg(long)]
    problem: String,
    /// Dimension override for scalable problems
    #[arg(long)]
    dim: Option<usize>,
    /// Initial guesses, comma-separated: IG1, IG2, IG3
    #[arg(long, default_value = "IG1")]
    ig: String,
    /// Algorithm: qm | fd-newton
    #[arg(long, default_value = "qm")]
    variant: String,
    /// Cardinality weight for the p4 family
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Relaxation parameter for p4relaxed
    #[arg(long, default_value_t = 1e-2)]
    mu: f64,
    /// Repetitions per (problem, IG) cell; seeds increment per repetition
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Worker threads for the grid
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file (stdout table when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct ResidualTableArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value = "IG1")]
    ig: String,
    /// Iteration checkpoints, comma-separated ascending
    #[arg(long, default_value = "200,300,400,500")]
    checkpoints: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-2)]
    mu: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct ProbeArgs {
    /// Problem with analytic derivatives (e.g. expsin, rosenbrock, woods)
    #[arg(long)]
    problem: String,
    /// Strictly decreasing radii, comma-separated (at least 5)
    #[arg(long)]
    radii: String,
    /// Ball center, comma-separated (defaults to the origin)
    #[arg(long)]
    center: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct MuSweepArgs {
    /// Strictly descending relaxation parameters
    #[arg(long, default_value = "1e-1,1e-2,1e-3")]
    mus: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Runs per µ; the median ‖x*‖∞ is reported
    #[arg(long, default_value_t = 15)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 600)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver × problem × initial-guess grid
    Run(RunArgs),
    /// Dropped-constraint residuals at iteration checkpoints
    ResidualTable(ResidualTableArgs),
    /// Approximation-order probe on shrinking sample balls
    Probe(ProbeArgs),
    /// Relaxation sweep for the cardinality problem
    MuSweep(MuSweepArgs),
}

fn build_spec(
    problem: &str,
    ig: &str,
    dim: Option<usize>,
    lambda: f64,
    mu: f64,
    variant: Algorithm,
    reps: usize,
    jobs: usize,
    out: Option<PathBuf>,
    format: OutputFormat,
    solver: &SolverFlags,
) -> Result<BenchSpec, CliError> {
    Ok(BenchSpec {
        problems: parse::problem_list(problem),
        igs: parse::ig_list(ig)?,
        dim,
        lambda,
        mu,
        algorithm: variant,
        config: solver.to_config()?,
        repetitions: reps,
        jobs,
        format,
        out,
    })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let spec = build_spec(
                &args.problem,
                &args.ig,
                args.dim,
                args.lambda,
                args.mu,
                parse::algorithm(&args.variant)?,
                args.reps,
                args.jobs,
                args.out.clone(),
                parse::output_format(&args.format)?,
                &args.solver,
            )?;
            cmd_run(&spec)
        }
        Command::ResidualTable(args) => {
            let spec = build_spec(
                &args.problem,
                &args.ig,
                args.dim,
                args.lambda,
                args.mu,
                Algorithm::Qm,
                1,
                1,
                args.out.clone(),
                parse::output_format(&args.format)?,
                &args.solver,
            )?;
            let checkpoints = parse::usize_list(&args.checkpoints)?;
            cmd_residual_table(&spec, &checkpoints)
        }
        Command::Probe(args) => {
            let radii = parse::float_list(&args.radii)?;
            let center = args.center.as_deref().map(parse::float_list).transpose()?;
            cmd_probe(
                &args.problem,
                center,
                &radii,
                resolve_seed(args.seed),
                &args.out,
                parse::output_format(&args.format)?,
            )
        }
        Command::MuSweep(args) => {
            let mus = parse::float_list(&args.mus)?;
            cmd_mu_sweep(
                &mus,
                args.lambda,
                args.reps,
                resolve_seed(args.seed),
                args.max_iter,
                &args.out,
                parse::output_format(&args.format)?,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
