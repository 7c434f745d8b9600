//! Model-based Newton solver for smooth and nonsmooth unconstrained
//! optimization.
//!
//! The method maintains a quadratic surrogate over a sliding window of
//! iterates and refines it each iteration by the least-norm change
//! satisfying interpolation/orthogonality conditions on the window steps —
//! either all `2n` of them (a small KKT system solved by restarted GMRES) or
//! just the newest pair, which has a closed-form rank-one answer. Newton
//! steps on the surrogate drive the iteration; no derivatives of the
//! objective are ever evaluated.
//!
//! Module map:
//! - [`state`]: point window, step/gap bookkeeping, quadratic-model storage;
//! - [`linalg`]: GMRES, damped solves, rank-one inverse updates;
//! - [`model_full`]: the 2n-constraint least-norm update;
//! - [`model_simplified`]: the 2-constraint closed-form update and the ν rule;
//! - [`solver`]: the iterative driver;
//! - [`baseline`]: a finite-difference Newton comparator;
//! - [`diagnostics`]: dropped-constraint residuals and the approximation-order
//!   probe;
//! - [`problems`]: the benchmark objective registry.
//!
//! # Example
//!
//! ```
//! use nalgebra::DVector;
//! use qmnewt::{problems, run, SolverConfig};
//!
//! let problem = problems::chained_rosenbrock(2).unwrap();
//! let x0 = DVector::from_row_slice(&[-1.2, 1.0]);
//! let report = run(&problem, &x0, &SolverConfig::default()).unwrap();
//! assert!(report.f_best < 1e-8);
//! ```

pub mod baseline;
pub mod diagnostics;
pub mod linalg;
pub mod model_full;
pub mod model_simplified;
pub mod problems;
pub mod solver;
pub mod state;
pub mod testing;

pub use diagnostics::{
    approximation_scaling_probe, constraint_residuals, residual_decay_check, DecayReport,
    ProbeReport, ResidualRecord,
};
pub use model_full::{
    apply_full_update, assemble_kkt, compute_epsilon, compute_rho_hat, full_update, phi_objective,
    solve_multipliers, ConstraintData, KktCoupling, KktSystem, ModelError, MultiplierSolution,
};
pub use model_simplified::{simplified_multipliers, simplified_rhs, simplified_update, update_nu};
pub use problems::{initial_guess, IgTag, Problem, Smoothness};
pub use solver::{
    initialize, run, IterationRecord, ModelVariant, NewtonMode, RunReport, RunStatus, Safeguard,
    Solver, SolverConfig, SolverError, StepVariant,
};
pub use state::{ModelState, Point, QuadraticModel};
