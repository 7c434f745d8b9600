//! Finite-difference Newton comparator.
//!
//! Central-difference gradient and Hessian with the damped solve and the
//! same safeguard options as the main driver. Produces the same report shape
//! so benchmark rows are directly comparable; the model-residual columns are
//! zero since no quadratic model is maintained.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::linalg::solve_damped;
use crate::problems::Problem;
use crate::solver::{
    IterationRecord, RunReport, RunStatus, Safeguard, SolverConfig, SolverError, MAX_BACKTRACKS,
};

fn fd_step(xi: f64) -> f64 {
    1e-6 * xi.abs().max(1.0)
}

// Second differences lose ~half the working precision to cancellation, so
// the Hessian uses a wider stencil than the gradient.
fn fd_step_hess(xi: f64) -> f64 {
    1e-4 * xi.abs().max(1.0)
}

/// Central-difference gradient with the per-coordinate step
/// `1e-6 · max(1, |xᵢ|)`.
pub fn fd_gradient(problem: &Problem, x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(n, |i, _| {
        let h = fd_step(x[i]);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        (problem.eval(&xp) - problem.eval(&xm)) / (2.0 * h)
    })
}

/// Central second differences, symmetrized.
pub fn fd_hessian(problem: &Problem, x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let f0 = problem.eval(x);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let hi = fd_step_hess(x[i]);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += hi;
        xm[i] -= hi;
        h[(i, i)] = (problem.eval(&xp) - 2.0 * f0 + problem.eval(&xm)) / (hi * hi);
        for j in 0..i {
            let hj = fd_step_hess(x[j]);
            let mut xpp = x.clone();
            let mut xpm = x.clone();
            let mut xmp = x.clone();
            let mut xmm = x.clone();
            xpp[i] += hi;
            xpp[j] += hj;
            xpm[i] += hi;
            xpm[j] -= hj;
            xmp[i] -= hi;
            xmp[j] += hj;
            xmm[i] -= hi;
            xmm[j] -= hj;
            let v = (problem.eval(&xpp) - problem.eval(&xpm) - problem.eval(&xmp)
                + problem.eval(&xmm))
                / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Newton iteration on finite-difference derivatives. Honors `epsilon`,
/// `max_iter`, and `safeguard` from the config; the model-specific fields are
/// ignored.
pub fn run_fd_newton(
    problem: &Problem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RunReport, SolverError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut x = x0.clone();
    problem.project(&mut x);
    let mut f = problem.eval(&x);
    if !f.is_finite() {
        return Err(SolverError::Initialization { tries: 0 });
    }
    let mut iterations = Vec::new();
    let mut status = RunStatus::MaxIter;
    let mut failure = None;
    let mut f_best = f;

    for k in 0..cfg.max_iter {
        let grad = fd_gradient(problem, &x);
        let grad_norm = grad.norm();
        let mut record = IterationRecord {
            k,
            f,
            grad_norm,
            step_norm: 0.0,
            nu: 1.0,
            e1_inf: 0.0,
            e2_inf: 0.0,
            lambda_used: 0.0,
            backtracks: 0,
            stalled: false,
            rescattered: false,
        };
        if grad_norm < cfg.epsilon {
            iterations.push(record);
            status = RunStatus::Converged;
            break;
        }
        let hess = fd_hessian(problem, &x);
        let n = x.len() as f64;
        let trace_abs: f64 = (0..x.len()).map(|i| hess[(i, i)].abs()).sum();
        let lambda0 = (1e-8 * trace_abs / n).max(1e-12);
        let (direction, lambda) = match solve_damped(&hess, &grad, lambda0) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e.to_string());
                status = RunStatus::NumericalFailure;
                iterations.push(record);
                break;
            }
        };
        record.lambda_used = lambda;

        let mut accepted = None;
        match cfg.safeguard {
            Safeguard::Pure => {
                let mut xt = &x - &direction;
                problem.project(&mut xt);
                let ft = problem.eval(&xt);
                if ft.is_finite() {
                    accepted = Some((xt, ft));
                }
            }
            Safeguard::Backtrack => {
                let mut t = 1.0;
                for attempt in 0..=MAX_BACKTRACKS {
                    let mut xt = &x - &direction * t;
                    problem.project(&mut xt);
                    let ft = problem.eval(&xt);
                    if ft.is_finite() && ft <= f {
                        record.backtracks = attempt;
                        accepted = Some((xt, ft));
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
        match accepted {
            Some((xt, ft)) => {
                record.step_norm = (&xt - &x).norm();
                x = xt;
                f = ft;
                f_best = f_best.min(f);
                iterations.push(record);
            }
            None => {
                // No descent along the damped Newton direction at any trial
                // length: report the current point.
                record.stalled = true;
                record.backtracks = MAX_BACKTRACKS + 1;
                iterations.push(record);
                status = RunStatus::MaxIter;
                break;
            }
        }
    }

    Ok(RunReport {
        iterations,
        status,
        x_star: x,
        f_star: f,
        f_best,
        wall_time: start.elapsed().as_secs_f64(),
        residual_trace: Vec::new(),
        sigma_norm_trace: Vec::new(),
        failure,
    })
}
