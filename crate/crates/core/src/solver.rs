//! Iterative driver: scatter-based initialization, per-iteration model
//! update (full or simplified), Newton or quasi-Newton step, optional
//! backtracking safeguard, and run reporting.
//!
//! One run is strictly sequential; distinct runs share no state and may
//! execute concurrently.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{constraint_residuals, DiagnosticsError, ResidualRecord};
use crate::linalg::{bfgs_inverse_update, solve_damped, sr1_inverse_update, LinalgError};
use crate::model_full::{full_update, KktCoupling, ModelError};
use crate::model_simplified::{simplified_update, update_nu};
use crate::problems::Problem;
use crate::state::{ModelState, Point, QuadraticModel, StateError};

/// Consecutive step halvings the backtracking safeguard may take.
pub const MAX_BACKTRACKS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    Full,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepVariant {
    NewtonDirect,
    Sr1,
    Bfgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Safeguard {
    /// Take the computed step unconditionally (the literal iteration).
    Pure,
    /// Halve the step while the objective increases, up to
    /// [`MAX_BACKTRACKS`] times.
    Backtrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NewtonMode {
    /// `(G + λI) d = g` with the smallest workable λ from a doubling ladder.
    Damped,
    /// Plain `G d = g`; a singular model Hessian fails the run.
    Pure,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid config: {0}")]
    Config(&'static str),
    #[error("initialization failed: objective non-finite after {tries} resampling attempts")]
    Initialization { tries: usize },
    #[error("initial point has dimension {got}, problem needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<DiagnosticsError> for SolverError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Model(m) => SolverError::Model(m),
            DiagnosticsError::State(s) => SolverError::State(s),
            _ => SolverError::Config("diagnostics failure"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Gradient-norm stopping tolerance on the model gradient.
    pub epsilon: f64,
    pub max_iter: usize,
    pub model_variant: ModelVariant,
    pub step_variant: StepVariant,
    pub safeguard: Safeguard,
    /// Scatter radius for the initial window; `None` resolves to
    /// `1e-2 · max(1, ‖x₀‖)` at run time.
    pub init_spread: Option<f64>,
    pub seed: u64,
    pub kkt_coupling: KktCoupling,
    pub newton_mode: NewtonMode,
    pub gmres_tol: f64,
    pub gmres_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-8,
            max_iter: 2000,
            model_variant: ModelVariant::Simplified,
            step_variant: StepVariant::NewtonDirect,
            safeguard: Safeguard::Backtrack,
            init_spread: None,
            seed: 1,
            kkt_coupling: KktCoupling::Printed,
            newton_mode: NewtonMode::Damped,
            gmres_tol: 1e-10,
            gmres_max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0) {
            return Err(SolverError::Config("epsilon must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(SolverError::Config("max_iter must be >= 1"));
        }
        if let Some(s) = self.init_spread {
            if !(s > 0.0) {
                return Err(SolverError::Config("init_spread must be > 0"));
            }
        }
        if !(self.gmres_tol > 0.0) {
            return Err(SolverError::Config("gmres_tol must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Objective at the iterate the model was built on.
    pub f: f64,
    /// ‖g⁽ᵏ⁾‖₂ of the freshly updated model at its anchor.
    pub grad_norm: f64,
    /// Norm of the accepted displacement (0 for stalled iterations).
    pub step_norm: f64,
    pub nu: f64,
    pub e1_inf: f64,
    pub e2_inf: f64,
    pub lambda_used: f64,
    /// Rejected trial steps before acceptance; `MAX_BACKTRACKS + 1` marks a
    /// stalled iteration.
    pub backtracks: u32,
    pub stalled: bool,
    pub rescattered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIter,
    DegenerateGeometry,
    NumericalFailure,
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIter => "max_iter",
            RunStatus::DegenerateGeometry => "degenerate_geometry",
            RunStatus::NumericalFailure => "numerical_failure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub iterations: Vec<IterationRecord>,
    pub status: RunStatus,
    pub x_star: DVector<f64>,
    pub f_star: f64,
    /// Best objective value seen at any accepted iterate.
    pub f_best: f64,
    pub wall_time: f64,
    /// Per-iteration dropped-constraint residuals (aligned with
    /// `iterations`), kept for the decay checks.
    pub residual_trace: Vec<ResidualRecord>,
    /// Step norms ‖σᵢ‖ matching each residual record's index range.
    pub sigma_norm_trace: Vec<Vec<f64>>,
    pub failure: Option<String>,
}

impl RunReport {
    pub fn final_grad_norm(&self) -> f64 {
        self.iterations.last().map(|r| r.grad_norm).unwrap_or(f64::NAN)
    }

    pub fn final_e1_inf(&self) -> f64 {
        self.iterations.last().map(|r| r.e1_inf).unwrap_or(0.0)
    }

    pub fn final_e2_inf(&self) -> f64 {
        self.iterations.last().map(|r| r.e2_inf).unwrap_or(0.0)
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Builds the initial window: `n` points scattered at radius `spread` around
/// `x₀`, with `x₀` itself as the newest point. The model starts from the
/// identity Hessian and the minimum-norm gradient fit of the window's
/// function differences (`σⱼᵀ g = Δfⱼ`), ν = 1.
pub fn initialize(
    problem: &Problem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<ModelState, SolverError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    initialize_with_rng(problem, x0, cfg, &mut rng)
}

fn initialize_with_rng(
    problem: &Problem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ModelState, SolverError> {
    let n = problem.dim;
    if x0.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut anchor = x0.clone();
    problem.project(&mut anchor);
    let f_anchor = problem.eval(&anchor);
    if !f_anchor.is_finite() {
        return Err(SolverError::Initialization { tries: 0 });
    }
    let spread = cfg.init_spread.unwrap_or_else(|| 1e-2 * anchor.norm().max(1.0));

    let mut window = Vec::with_capacity(n + 1);
    let mut fvals = Vec::with_capacity(n + 1);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..10 {
            let mut x = &anchor + random_unit(rng, n) * spread;
            problem.project(&mut x);
            let f = problem.eval(&x);
            if f.is_finite() {
                accepted = Some((x, f));
                break;
            }
        }
        let (x, f) = accepted.ok_or(SolverError::Initialization { tries: 10 })?;
        window.push(Point::new(x)?);
        fvals.push(f);
    }
    window.push(Point::new(anchor.clone())?);
    fvals.push(f_anchor);

    // Minimum-norm least-squares fit of the n difference equations.
    let mut steps = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for j in 1..=n {
        let s = window[j].coords() - window[j - 1].coords();
        steps.row_mut(j - 1).copy_from(&s.transpose());
        rhs[j - 1] = fvals[j] - fvals[j - 1];
    }
    let svd = steps.svd(true, true);
    let smax = svd.singular_values.max();
    let grad = svd
        .solve(&rhs, 1e-12 * smax.max(1e-300))
        .map_err(|_| SolverError::Config("gradient fit failed"))?
        .column(0)
        .into_owned();

    let model = QuadraticModel::identity(grad, anchor);
    let prev = model.clone();
    Ok(ModelState::new(window, fvals, model, prev, 0)?)
}

/// Whether [`Solver::step`] hit the stopping test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continue,
    Converged,
}

/// Driver state for one run. Construct with [`Solver::new`], advance with
/// [`Solver::step`], or use the [`run`] convenience wrapper.
pub struct Solver<'a> {
    problem: &'a Problem,
    cfg: SolverConfig,
    state: ModelState,
    rng: ChaCha8Rng,
    inv_hess: DMatrix<f64>,
    warmed_up: bool,
    prev_iterate: Option<(DVector<f64>, DVector<f64>)>,
    stall_radius: Option<f64>,
    spread: f64,
    last_residuals: Option<(ResidualRecord, Vec<f64>)>,
    /// The model was just (re)built from scattered points; the next pass
    /// steps on it directly without an update, like the initialization pass.
    fresh_model: bool,
    /// (f, stalled, grad_norm, step_norm) for recent iterations, for the
    /// no-progress check and its restart scale.
    recent: Vec<(f64, bool, f64, f64)>,
    /// Sequential pass counter (stalled passes do not advance the window's
    /// own iteration index, but records stay uniquely numbered).
    passes: usize,
}

/// Iterations without relative f-progress before the model is restarted.
const NO_PROGRESS_WINDOW: usize = 10;

/// Relative f-decrease over the window below which the model counts as
/// wedged.
const NO_PROGRESS_RTOL: f64 = 1e-4;


/// Scatter radii never shrink below this times the iterate scale (a quarter
/// of √eps): far above per-coordinate ulps, yet small enough that the
/// difference-fit floor ~‖∇²f‖·radius sits below the default ε.
const RADIUS_FLOOR: f64 = 3.725290298461914e-9; // sqrt(f64::EPSILON) / 4

impl<'a> Solver<'a> {
    pub fn new(
        problem: &'a Problem,
        x0: &DVector<f64>,
        cfg: SolverConfig,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let state = initialize_with_rng(problem, x0, &cfg, &mut rng)?;
        let n = problem.dim;
        let spread = cfg.init_spread.unwrap_or_else(|| 1e-2 * x0.norm().max(1.0));
        Ok(Solver {
            problem,
            cfg,
            state,
            rng,
            inv_hess: DMatrix::identity(n, n),
            warmed_up: false,
            prev_iterate: None,
            stall_radius: None,
            spread,
            last_residuals: None,
            fresh_model: true,
            recent: Vec::new(),
            passes: 0,
        })
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    /// Residuals computed during the most recent step, with the matching
    /// step norms.
    pub fn take_last_residuals(&mut self) -> Option<(ResidualRecord, Vec<f64>)> {
        self.last_residuals.take()
    }

    fn geometry_degenerate(&self) -> bool {
        let n = self.state.step_count();
        let norms: Vec<f64> =
            (1..=n).map(|j| self.state.sigma(j).expect("in range").norm()).collect();
        let newest = norms[n - 1];
        let newest_threshold = 1e-12 * self.state.newest().coords().norm().max(1.0);
        if newest <= newest_threshold {
            return true;
        }
        match self.cfg.model_variant {
            ModelVariant::Simplified => false,
            ModelVariant::Full => {
                let max = norms.iter().copied().fold(0.0f64, f64::max);
                let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
                min <= 1e-12 * max
            }
        }
    }

    /// Rebuilds every non-newest window point around the current iterate.
    fn rescatter(&mut self, radius: f64) -> Result<(), SolverError> {
        let n = self.state.step_count();
        let anchor = self.state.newest().coords().clone();
        for pos in 0..n {
            let mut accepted = None;
            for _ in 0..10 {
                let mut x = &anchor + random_unit(&mut self.rng, self.problem.dim) * radius;
                self.problem.project(&mut x);
                let f = self.problem.eval(&x);
                if f.is_finite() && (&x - &anchor).norm() > 0.0 {
                    accepted = Some((x, f));
                    break;
                }
            }
            let (x, f) = accepted.ok_or(SolverError::Initialization { tries: 10 })?;
            self.state.replace_point(pos, Point::new(x)?, f)?;
        }
        Ok(())
    }

    /// Rebuilds the sample set around the current iterate and restarts the
    /// model from it: fresh scatter, identity Hessian, difference-fit
    /// gradient, ν = 1. This is the initialization pass replayed in place;
    /// the iterate itself never moves, so descent stays monotone.
    fn restart(&mut self, radius: f64) -> Result<(), SolverError> {
        self.rescatter(radius)?;
        let grad = self.difference_fit_gradient()?;
        let anchor = self.state.newest().coords().clone();
        let model = QuadraticModel::identity(grad, anchor);
        let prev = model.clone();
        self.state = ModelState::new(
            self.state.window().to_vec(),
            self.state.fvals().to_vec(),
            model,
            prev,
            self.state.iter_index(),
        )?;
        self.inv_hess = DMatrix::identity(self.problem.dim, self.problem.dim);
        self.warmed_up = false;
        self.prev_iterate = None;
        self.fresh_model = true;
        Ok(())
    }

    /// Restart after a stalled (fully backtracked) step, shrinking the
    /// scatter radius with each consecutive stall.
    fn stall_restart(&mut self, step_scale: f64) -> Result<(), SolverError> {
        let floor = RADIUS_FLOOR * self.state.newest().coords().norm().max(1.0);
        let radius = match self.stall_radius {
            Some(r) => (r * 0.25).max(floor),
            None => step_scale.min(self.spread).max(floor),
        };
        self.stall_radius = Some(radius);
        self.restart(radius)
    }

    /// Minimum-norm gradient fit of the window's function differences
    /// (`σⱼᵀ g = Δfⱼ`), the initialization rule replayed. Serves as an
    /// independent check when the model gradient reaches the stopping
    /// tolerance: the orthogonality constraints can project the model
    /// gradient to zero while the window data still shows descent. The fit
    /// deliberately ignores the model Hessian — the update constraints tie
    /// G to the same window differences, so a curvature-corrected fit would
    /// just reproduce the model gradient instead of checking it.
    fn difference_fit_gradient(&self) -> Result<DVector<f64>, SolverError> {
        let m = self.state.step_count();
        let dim = self.problem.dim;
        let mut steps = DMatrix::zeros(m, dim);
        let mut rhs = DVector::zeros(m);
        for j in 1..=m {
            let s = self.state.sigma(j)?;
            rhs[j - 1] = self.state.delta_f(j)?;
            steps.row_mut(j - 1).copy_from(&s.transpose());
        }
        let svd = steps.svd(true, true);
        let smax = svd.singular_values.max();
        let grad = svd
            .solve(&rhs, 1e-12 * smax.max(1e-300))
            .map_err(|_| SolverError::Config("gradient refit failed"))?
            .column(0)
            .into_owned();
        Ok(grad)
    }

    /// One iteration: model update (skipped on a freshly restarted model),
    /// stopping test, step, window management.
    pub fn step(&mut self) -> Result<(IterationRecord, StepOutcome), SolverError> {
        let k = self.passes;
        self.passes += 1;
        let f_here = self.state.newest_f();
        let mut fresh = std::mem::take(&mut self.fresh_model);

        let mut record = IterationRecord {
            k,
            f: f_here,
            grad_norm: 0.0,
            step_norm: 0.0,
            nu: self.state.model().nu,
            e1_inf: 0.0,
            e2_inf: 0.0,
            lambda_used: 0.0,
            backtracks: 0,
            stalled: false,
            rescattered: fresh && k > 0,
        };

        if !fresh {
            self.state.rotate_models();
            if self.geometry_degenerate() {
                // The window cannot support an update; rebuild it in place
                // and step on the fresh model this pass.
                let radius = self.stall_radius.unwrap_or(self.spread);
                self.restart(radius)?;
                self.fresh_model = false; // consumed right here
                record.rescattered = true;
                record.nu = self.state.model().nu;
                fresh = true;
            }
        }

        if fresh {
            self.last_residuals = Some((
                ResidualRecord {
                    e1: DVector::zeros(0),
                    e2: DVector::zeros(0),
                    e1_inf: 0.0,
                    e2_inf: 0.0,
                },
                Vec::new(),
            ));
        } else {
            let nu_now = self.state.model().nu;
            let (delta_g, delta_hess, nu_next) = match self.cfg.model_variant {
                ModelVariant::Simplified => {
                    let (dg, dh) = simplified_update(&self.state)?;
                    let nu = update_nu(nu_now, &dg, &dh);
                    (dg, dh, nu)
                }
                ModelVariant::Full => {
                    match full_update(
                        &self.state,
                        self.cfg.kkt_coupling,
                        self.cfg.gmres_tol,
                        self.cfg.gmres_max_iter,
                    ) {
                        Ok((dg, dh)) => (dg, dh, nu_now),
                        Err(ModelError::SolveFailed { .. }) => {
                            // Ill-conditioned window: rebuild it instead of
                            // aborting the run.
                            let radius = self.stall_radius.unwrap_or(self.spread);
                            self.restart(radius)?;
                            self.fresh_model = false;
                            record.rescattered = true;
                            record.nu = self.state.model().nu;
                            let dim = self.problem.dim;
                            (DVector::zeros(dim), DMatrix::zeros(dim, dim), self.state.model().nu)
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            };
            let residuals = constraint_residuals(&self.state, &delta_g, &delta_hess)?;
            let sigma_norms: Vec<f64> = (1..self.state.step_count())
                .map(|j| self.state.sigma(j).expect("in range").norm())
                .collect();
            self.state.commit_update(&delta_g, &delta_hess, nu_next)?;
            record.nu = nu_next;
            record.e1_inf = residuals.e1_inf;
            record.e2_inf = residuals.e2_inf;
            self.last_residuals = Some((residuals, sigma_norms));
        }

        let grad_norm = self.state.model().grad.norm();
        record.grad_norm = grad_norm;

        if grad_norm < self.cfg.epsilon {
            let refit = self.difference_fit_gradient()?;
            if refit.norm() < self.cfg.epsilon {
                return Ok((record, StepOutcome::Converged));
            }
            // The window differences contradict the vanishing model
            // gradient (the orthogonality constraint can project it to
            // zero); restart the gradient from the fit and keep going.
            record.grad_norm = refit.norm();
            self.state.replace_gradient(refit)?;
        }

        let model = self.state.model().clone();
        let direction = match self.cfg.step_variant {
            StepVariant::NewtonDirect => match self.cfg.newton_mode {
                NewtonMode::Damped => {
                    let n = model.dim() as f64;
                    let trace_abs: f64 = (0..model.dim()).map(|i| model.hess[(i, i)].abs()).sum();
                    let lambda0 = (1e-8 * trace_abs / n).max(1e-12);
                    let (d, lambda) = solve_damped(&model.hess, &model.grad, lambda0)?;
                    record.lambda_used = lambda;
                    d
                }
                NewtonMode::Pure => {
                    model.hess.clone().lu().solve(&model.grad).ok_or_else(|| {
                        LinalgError::NumericalFailure {
                            context: "singular model Hessian in pure Newton mode".into(),
                            residual: f64::INFINITY,
                        }
                    })?
                }
            },
            StepVariant::Sr1 | StepVariant::Bfgs => {
                if self.warmed_up {
                    if let Some((x_prev, g_prev)) = self.prev_iterate.take() {
                        let p = self.state.newest().coords() - &x_prev;
                        let q = &model.grad - &g_prev;
                        if p.norm() > 0.0 {
                            let updated = match self.cfg.step_variant {
                                StepVariant::Sr1 => sr1_inverse_update(&self.inv_hess, &p, &q),
                                _ => bfgs_inverse_update(&self.inv_hess, &p, &q),
                            };
                            if let Ok(b) = updated {
                                self.inv_hess = b;
                            }
                        }
                    }
                    &self.inv_hess * &model.grad
                } else {
                    // Steepest-descent warm-up move.
                    model.grad.clone()
                }
            }
        };
        self.prev_iterate = Some((self.state.newest().coords().clone(), model.grad.clone()));

        let x_here = self.state.newest().coords().clone();
        let trial = |t: f64| {
            let mut x = &x_here - &direction * t;
            self.problem.project(&mut x);
            let f = self.problem.eval(&x);
            (x, f)
        };
        let accepted = match self.cfg.safeguard {
            Safeguard::Pure => {
                let (x, f) = trial(1.0);
                if !f.is_finite() {
                    return Err(SolverError::State(StateError::NonFinite {
                        context: "objective at the new iterate",
                    }));
                }
                Some((x, f))
            }
            Safeguard::Backtrack => {
                let mut found = None;
                let mut t = 1.0;
                for attempt in 0..=MAX_BACKTRACKS {
                    let (x, f) = trial(t);
                    if f.is_finite() && f <= f_here {
                        record.backtracks = attempt;
                        found = Some((x, f));
                        break;
                    }
                    t *= 0.5;
                }
                found
            }
        };

        match accepted {
            Some((x_new, f_new)) => {
                let step_norm = (&x_new - &x_here).norm();
                if step_norm <= 1e-15 * x_here.norm().max(1.0) {
                    // Displacement below float resolution: treat as a stall
                    // so the window never degenerates.
                    record.stalled = true;
                    record.backtracks = MAX_BACKTRACKS + 1;
                    self.stall_restart(direction.norm())?;
                } else {
                    record.step_norm = step_norm;
                    self.state.push_point(Point::new(x_new)?, f_new)?;
                    self.warmed_up = true;
                    self.stall_radius = None;
                }
            }
            None => {
                // The ladder found no decrease. On the first failure of an
                // episode, resample and refit (the smooth endgame: the
                // stopping test certifies convergence from the fresh
                // window). If restarts are not helping, probe deeper along
                // the same direction before shrinking further: kinks can
                // need trial steps far below ‖d‖·2⁻³⁰, down at the
                // objective's own float resolution.
                let mut deep = None;
                if self.stall_radius.is_some() {
                    let dir_norm = direction.norm();
                    let floor = 1e-24 * x_here.norm().max(1.0);
                    let mut t = 0.5f64.powi(MAX_BACKTRACKS as i32 + 1);
                    while t * dir_norm > floor {
                        let (x, f) = trial(t);
                        if f.is_finite() && f < f_here {
                            deep = Some((x, f));
                            break;
                        }
                        t *= 0.5;
                    }
                }
                match deep {
                    Some((x_new, f_new)) => {
                        let step_norm = (&x_new - &x_here).norm();
                        record.backtracks = MAX_BACKTRACKS;
                        record.step_norm = step_norm;
                        self.state.push_point(Point::new(x_new)?, f_new)?;
                        self.warmed_up = true;
                        // Mid-episode progress: keep the episode's scale so
                        // the certification ladder is not restarted.
                    }
                    None => {
                        record.stalled = true;
                        record.backtracks = MAX_BACKTRACKS + 1;
                        self.stall_restart(
                            direction.norm() * 0.5f64.powi(MAX_BACKTRACKS as i32),
                        )?;
                    }
                }
            }
        }

        // A stall-free stretch without any f-progress means the model has
        // wedged itself (typically junk curvature); rebuild it at scatter
        // scale. Only the safeguarded mode gets this rescue so the pure
        // iteration stays literal.
        if self.cfg.safeguard == Safeguard::Backtrack {
            self.recent.push((f_here, record.stalled, record.grad_norm, record.step_norm));
            if self.recent.len() > NO_PROGRESS_WINDOW {
                self.recent.remove(0);
                let any_stall = self.recent.iter().any(|(_, s, _, _)| *s);
                let f_old = self.recent[0].0;
                let f_now = self.state.newest_f();
                let progress = f_old - f_now;
                // Only fire away from the convergence endgame (tiny model
                // gradients are the stopping test's business).
                let gradient_large = record.grad_norm > 1e3 * self.cfg.epsilon;
                if !any_stall
                    && !self.fresh_model
                    && gradient_large
                    && progress < NO_PROGRESS_RTOL * f_old.abs().max(f_now.abs()).max(1e-12)
                {
                    // Probe at the scale the iteration is actually moving:
                    // the median recent step norm tracks the local feature
                    // size (facet width on minimax objectives).
                    let mut steps: Vec<f64> =
                        self.recent.iter().map(|(_, _, _, sn)| *sn).collect();
                    steps.sort_by(|a, b| a.total_cmp(b));
                    let med = steps[steps.len() / 2];
                    let floor =
                        RADIUS_FLOOR * self.state.newest().coords().norm().max(1.0);
                    let radius = med.clamp(floor, self.spread);
                    self.restart(radius)?;
                    self.recent.clear();
                }
            }
        }
        Ok((record, StepOutcome::Continue))
    }
}

/// Runs the driver to convergence, iteration cap, or failure.
pub fn run(
    problem: &Problem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RunReport, SolverError> {
    let start = Instant::now();
    let mut solver = Solver::new(problem, x0, cfg.clone())?;
    let mut iterations = Vec::new();
    let mut residual_trace = Vec::new();
    let mut sigma_norm_trace = Vec::new();
    let mut status = RunStatus::MaxIter;
    let mut failure = None;
    let mut f_best = solver.state.newest_f();

    for _ in 0..cfg.max_iter {
        match solver.step() {
            Ok((record, outcome)) => {
                f_best = f_best.min(record.f);
                if let Some((rec, norms)) = solver.take_last_residuals() {
                    residual_trace.push(rec);
                    sigma_norm_trace.push(norms);
                }
                let done = outcome == StepOutcome::Converged;
                iterations.push(record);
                if done {
                    status = RunStatus::Converged;
                    break;
                }
            }
            Err(err) => {
                status = match &err {
                    SolverError::Model(ModelError::DegenerateGeometry { .. }) => {
                        RunStatus::DegenerateGeometry
                    }
                    _ => RunStatus::NumericalFailure,
                };
                failure = Some(err.to_string());
                break;
            }
        }
    }

    let x_star = solver.state.newest().coords().clone();
    let f_star = solver.state.newest_f();
    f_best = f_best.min(f_star);
    Ok(RunReport {
        iterations,
        status,
        x_star,
        f_star,
        f_best,
        wall_time: start.elapsed().as_secs_f64(),
        residual_trace,
        sigma_norm_trace,
        failure,
    })
}
