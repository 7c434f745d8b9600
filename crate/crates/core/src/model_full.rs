//! The 2n-constraint least-norm model update.
//!
//! Each iteration refines the quadratic model by the smallest change
//! `(Δg, ΔG)` — in the norm `Φ = ½‖Δg‖² + (ν/2)‖ΔG‖²_F` — subject to two
//! constraint families over the window steps: curvature interpolation
//! `σᵢᵀ ΔG σᵢ = ρ̂ᵢ` and step-orthogonality
//! `σᵢᵀ Δg − σᵢᵀ ΔG (τ_k − τᵢ) = εᵢ`. The multipliers of the associated KKT
//! system are obtained with restarted GMRES (dense LU as fallback) and mapped
//! back to the update.
//!
//! Two couplings of the multiplier system are provided: [`KktCoupling::Printed`]
//! reproduces the published block system literally (diagonal H₁/H₂), while
//! [`KktCoupling::Full`] uses the dense coupling implied by the derivation,
//! posed over symmetric `ΔG` so the solved update satisfies the constraints
//! exactly. All weights are identity (Λ = M = V = W = I).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{gmres, GmresStatus, LinalgError};
use crate::state::{ModelState, StateError};

/// Steps whose norm falls below this fraction of the largest window step make
/// the KKT system numerically singular and are rejected.
pub const STEP_DEGENERACY_RTOL: f64 = 1e-12;

/// Direct-solve fallback is accepted only below this relative residual.
const FALLBACK_RESIDUAL_CAP: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("degenerate window geometry: min step norm {min_step:.3e} <= {threshold:.3e}")]
    DegenerateGeometry { min_step: f64, threshold: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("multiplier system solve failed; best relative residual {residual:.3e}")]
    SolveFailed { residual: f64 },
}

/// Which multiplier system [`assemble_kkt`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KktCoupling {
    /// Block system exactly as published: diagonal H₁/H₂ (the multiplier
    /// index stays fixed inside the row sums).
    #[default]
    Printed,
    /// Dense derivation-consistent coupling (A and Bᵀ blocks) posed over
    /// symmetric ΔG; the solved update satisfies all 2n constraints.
    Full,
}

/// Right-hand-side data of the two constraint families.
#[derive(Debug, Clone)]
pub struct ConstraintData {
    pub eps: DVector<f64>,
    pub rho_hat: DVector<f64>,
}

/// Assembled 2n × 2n multiplier system `[[H₁, −2B], [−H₂, 2D]] (η; θ) = rhs`.
///
/// In printed mode `h1`/`h2` are diagonal; in full mode they hold the dense
/// A and Bᵀ blocks.
#[derive(Debug, Clone)]
pub struct KktSystem {
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub coupling: KktCoupling,
}

impl KktSystem {
    pub fn n(&self) -> usize {
        self.h1.nrows()
    }

    /// Dense 2n × 2n system matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.h1);
        m.view_mut((0, n), (n, n)).copy_from(&(-2.0 * &self.b));
        m.view_mut((n, 0), (n, n)).copy_from(&(-&self.h2));
        m.view_mut((n, n), (n, n)).copy_from(&(2.0 * &self.d));
        m
    }
}

/// Lagrange multipliers of the KKT system: `eta` for the curvature family,
/// `theta` for the orthogonality family.
#[derive(Debug, Clone)]
pub struct MultiplierSolution {
    pub eta: DVector<f64>,
    pub theta: DVector<f64>,
    /// Relative residual achieved by the linear solve.
    pub rel_residual: f64,
    /// True when GMRES did not converge and the dense fallback produced the
    /// solution.
    pub used_fallback: bool,
}

/// Orthogonality right-hand sides
/// `εᵢ = σᵢᵀ G⁽ᵏ⁻¹⁾ (τ_k − τᵢ) − σᵢᵀ g⁽ᵏ⁻¹⁾_{k−1}` for every window step.
pub fn compute_epsilon(state: &ModelState) -> Result<DVector<f64>, ModelError> {
    let n = state.step_count();
    let prev = state.prev_model();
    let g_prev = prev.gradient_at(state.second_newest().coords());
    let mut eps = DVector::zeros(n);
    for j in 1..=n {
        let s = state.sigma(j)?;
        let t = state.tau_gap(j)?;
        eps[j - 1] = s.dot(&(&prev.hess * &t)) - s.dot(&g_prev);
    }
    Ok(eps)
}

/// Curvature right-hand sides
/// `ρ̂ᵢ = 2σᵢᵀ g⁽ᵏ⁻¹⁾_{i−1} − 2σᵢᵀ g⁽ᵏ⁻¹⁾_{k−1} − 2Δfᵢ − σᵢᵀ G⁽ᵏ⁻¹⁾ σᵢ`,
/// with the transported gradients `g⁽ᵏ⁻¹⁾_{i−1} = g⁽ᵏ⁻¹⁾(x_{i−1})`.
pub fn compute_rho_hat(state: &ModelState) -> Result<DVector<f64>, ModelError> {
    let n = state.step_count();
    let prev = state.prev_model();
    let g_prev = prev.gradient_at(state.second_newest().coords());
    let mut rho_hat = DVector::zeros(n);
    for j in 1..=n {
        let s = state.sigma(j)?;
        let g_at_prev_point = prev.gradient_at(state.window()[j - 1].coords());
        rho_hat[j - 1] = 2.0 * s.dot(&g_at_prev_point)
            - 2.0 * s.dot(&g_prev)
            - 2.0 * state.delta_f(j)?
            - s.dot(&(&prev.hess * &s));
    }
    Ok(rho_hat)
}

/// Convenience wrapper computing both right-hand-side families.
pub fn constraint_data(state: &ModelState) -> Result<ConstraintData, ModelError> {
    Ok(ConstraintData { eps: compute_epsilon(state)?, rho_hat: compute_rho_hat(state)? })
}

fn check_geometry(sigmas: &[DVector<f64>]) -> Result<(), ModelError> {
    let max_step = sigmas.iter().map(|s| s.norm()).fold(0.0f64, f64::max);
    let min_step = sigmas.iter().map(|s| s.norm()).fold(f64::INFINITY, f64::min);
    let threshold = STEP_DEGENERACY_RTOL * max_step;
    if max_step == 0.0 || min_step <= threshold {
        return Err(ModelError::DegenerateGeometry { min_step, threshold });
    }
    Ok(())
}

/// Builds the 2n × 2n multiplier system for the requested coupling, with
/// `ν = state.model().nu` and identity weights.
pub fn assemble_kkt(
    state: &ModelState,
    eps: &DVector<f64>,
    rho_hat: &DVector<f64>,
    coupling: KktCoupling,
) -> Result<KktSystem, ModelError> {
    let n = state.step_count();
    let nu = state.model().nu;
    let sigmas = state.sigmas();
    let gaps = state.tau_gaps();
    check_geometry(&sigmas)?;

    let ss = DMatrix::from_fn(n, n, |i, j| sigmas[i].dot(&sigmas[j]));
    let a = DMatrix::from_fn(n, n, |i, j| ss[(i, j)] * ss[(i, j)]);
    let b = DMatrix::from_fn(n, n, |i, j| ss[(i, j)] * gaps[j].dot(&sigmas[i]));
    let d = match coupling {
        KktCoupling::Printed => {
            DMatrix::from_fn(n, n, |i, j| nu * ss[(i, j)] + ss[(i, j)] * gaps[i].dot(&gaps[j]))
        }
        KktCoupling::Full => DMatrix::from_fn(n, n, |i, j| {
            nu * ss[(i, j)]
                + 0.5 * (ss[(i, j)] * gaps[i].dot(&gaps[j])
                    + sigmas[i].dot(&gaps[j]) * sigmas[j].dot(&gaps[i]))
        }),
    };
    let (h1, h2) = match coupling {
        KktCoupling::Printed => {
            let h1 = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| a.row(i).sum()));
            let h2 = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| b.row(i).sum()));
            (h1, h2)
        }
        KktCoupling::Full => (a, b.transpose()),
    };

    let mut rhs = DVector::zeros(2 * n);
    for i in 0..n {
        rhs[i] = 2.0 * nu * rho_hat[i];
        rhs[n + i] = 2.0 * nu * eps[i];
    }
    Ok(KktSystem { h1, h2, b, d, rhs, coupling })
}

/// Solves the multiplier system with restarted GMRES (restart `min(2n, 30)`),
/// falling back to a dense LU solve with partial pivoting when GMRES
/// stagnates or fails to converge.
pub fn solve_multipliers(
    system: &KktSystem,
    tol: f64,
    max_iter: usize,
) -> Result<MultiplierSolution, ModelError> {
    let n = system.n();
    let mat = system.matrix();
    let restart = (2 * n).min(30).max(1);
    let report = gmres(|v| &mat * v, &system.rhs, tol, restart, max_iter);

    let (x, rel_residual, used_fallback) = if report.status == GmresStatus::Converged {
        (report.x, report.rel_residual, false)
    } else {
        let rhs_norm = system.rhs.norm();
        let residual_of = |x: &DVector<f64>| {
            if rhs_norm == 0.0 { 0.0 } else { (&mat * x - &system.rhs).norm() / rhs_norm }
        };
        let plain = mat
            .clone()
            .lu()
            .solve(&system.rhs)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .map(|x| { let r = residual_of(&x); (x, r) });
        // Row equilibration rescues badly scaled windows (steps of very
        // different magnitudes make the block rows span many orders).
        let equilibrated = || {
            let nn = 2 * n;
            let mut scaled = mat.clone();
            let mut rhs = system.rhs.clone();
            for i in 0..nn {
                let norm = scaled.row(i).norm();
                if norm > 0.0 {
                    for j in 0..nn {
                        scaled[(i, j)] /= norm;
                    }
                    rhs[i] /= norm;
                }
            }
            scaled
                .lu()
                .solve(&rhs)
                .filter(|x| x.iter().all(|v| v.is_finite()))
                .map(|x| { let r = residual_of(&x); (x, r) })
        };
        let best = match plain {
            Some((x, r)) if r <= FALLBACK_RESIDUAL_CAP => Some((x, r)),
            plain => match (plain, equilibrated()) {
                (Some((xa, ra)), Some((xb, rb))) => {
                    Some(if rb < ra { (xb, rb) } else { (xa, ra) })
                }
                (a, b) => a.or(b),
            },
        };
        match best {
            Some((x, r)) if r <= FALLBACK_RESIDUAL_CAP => (x, r, true),
            Some((_, r)) => return Err(ModelError::SolveFailed { residual: r }),
            None => return Err(ModelError::SolveFailed { residual: report.rel_residual }),
        }
    };

    Ok(MultiplierSolution {
        eta: x.rows(0, n).into_owned(),
        theta: x.rows(n, n).into_owned(),
        rel_residual,
        used_fallback,
    })
}

/// Maps multipliers to the model update with identity weights:
///
/// `Δg = Σ θᵢ σᵢ`,
/// `ΔG = 1/(2ν) Σ [ηᵢ σᵢσᵢᵀ − θᵢ (σᵢ(τ_k−τᵢ)ᵀ + (τ_k−τᵢ)σᵢᵀ)]`.
///
/// The Hessian update is symmetric by construction (the stationarity map is
/// taken over symmetric ΔG); a final averaging scrubs rounding noise.
pub fn apply_full_update(
    state: &ModelState,
    mult: &MultiplierSolution,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = state.step_count();
    let dim = state.dim();
    let nu = state.model().nu;
    let sigmas = state.sigmas();
    let gaps = state.tau_gaps();

    let mut delta_g = DVector::zeros(dim);
    let mut delta_hess = DMatrix::zeros(dim, dim);
    for i in 0..n {
        delta_g.axpy(mult.theta[i], &sigmas[i], 1.0);
        delta_hess += mult.eta[i] * &sigmas[i] * sigmas[i].transpose();
        let cross = &sigmas[i] * gaps[i].transpose();
        delta_hess -= mult.theta[i] * (&cross + cross.transpose());
    }
    delta_hess /= 2.0 * nu;
    let sym = (&delta_hess + delta_hess.transpose()) * 0.5;
    (delta_g, sym)
}

/// Update objective `Φ = ½‖Δg‖² + (ν/2)‖ΔG‖²_F` (identity weights).
pub fn phi_objective(delta_g: &DVector<f64>, delta_hess: &DMatrix<f64>, nu: f64) -> f64 {
    0.5 * delta_g.norm_squared() + 0.5 * nu * delta_hess.norm_squared()
}

/// Full pipeline: right-hand sides → KKT assembly → multiplier solve →
/// update map.
pub fn full_update(
    state: &ModelState,
    coupling: KktCoupling,
    gmres_tol: f64,
    gmres_max_iter: usize,
) -> Result<(DVector<f64>, DMatrix<f64>), ModelError> {
    let data = constraint_data(state)?;
    let system = assemble_kkt(state, &data.eps, &data.rho_hat, coupling)?;
    let mult = solve_multipliers(&system, gmres_tol, gmres_max_iter)?;
    Ok(apply_full_update(state, &mult))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Point, QuadraticModel};
    use approx::assert_relative_eq;

    fn state_with_prev(
        points: &[&[f64]],
        fvals: &[f64],
        prev_grad: &[f64],
        prev_hess: DMatrix<f64>,
        nu: f64,
    ) -> ModelState {
        let n = points[0].len();
        let pts: Vec<Point> = points.iter().map(|p| Point::from_slice(p).unwrap()).collect();
        let anchor_prev = DVector::from_row_slice(points[points.len() - 2]);
        let anchor_cur = DVector::from_row_slice(points[points.len() - 1]);
        let prev = QuadraticModel::new(
            DVector::from_row_slice(prev_grad),
            prev_hess.clone(),
            nu,
            anchor_prev,
        )
        .unwrap();
        let model = QuadraticModel::new(DVector::zeros(n), prev_hess, nu, anchor_cur).unwrap();
        ModelState::new(pts, fvals.to_vec(), model, prev, n).unwrap()
    }

    #[test]
    fn epsilon_first_term_vanishes_at_newest() {
        // With the gap zero at i = k, ε_k = −σ_kᵀ g^(k−1)_{k−1}.
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[2.0, 3.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let eps = compute_epsilon(&st).unwrap();
        let sigma_k = st.sigma(2).unwrap();
        assert_relative_eq!(eps[1], -sigma_k.dot(&st.prev_model().grad), epsilon = 1e-15);
    }

    #[test]
    fn epsilon_zero_previous_model() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[0.0, 0.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let eps = compute_epsilon(&st).unwrap();
        assert_eq!(eps, DVector::zeros(2));
    }

    #[test]
    fn epsilon_worked_two_dimensional_case() {
        // Window (0,0) → (1,0) → (1,1), G = I, g^(k−1)_{k−1} = (1,1):
        // ε₁ = σ₁ᵀ(τ_k − τ₁) − σ₁ᵀ(g + G(x₁ − x_{k−1})) and x₁ = x_{k−1},
        // so ε = (0 − 1, 0 − 1) = (−1, −1).
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[1.0, 1.0],
            DMatrix::identity(2, 2),
            1.0,
        );
        let eps = compute_epsilon(&st).unwrap();
        assert_relative_eq!(eps, DVector::from_row_slice(&[-1.0, -1.0]), epsilon = 1e-14);
    }

    #[test]
    fn rho_hat_zero_model_zero_differences() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[5.0, 5.0, 5.0],
            &[0.0, 0.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let rho = compute_rho_hat(&st).unwrap();
        assert_eq!(rho, DVector::zeros(2));
    }

    #[test]
    fn rho_hat_newest_term_telescopes() {
        // At i = k the transported gradient equals g^(k−1)_{k−1}, so with
        // G = 0 the whole expression collapses to −2Δf_k.
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.25, 1.0],
            &[3.0, -2.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let rho = compute_rho_hat(&st).unwrap();
        assert_relative_eq!(rho[1], -2.0 * (1.0 - 0.25), epsilon = 1e-15);
    }

    #[test]
    fn assemble_orthonormal_steps_give_identity_a_block() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[0.0, 0.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let data = constraint_data(&st).unwrap();
        let sys = assemble_kkt(&st, &data.eps, &data.rho_hat, KktCoupling::Full).unwrap();
        assert_relative_eq!(sys.h1, DMatrix::identity(2, 2), epsilon = 1e-15);
        let printed = assemble_kkt(&st, &data.eps, &data.rho_hat, KktCoupling::Printed).unwrap();
        assert_relative_eq!(printed.h1, DMatrix::identity(2, 2), epsilon = 1e-15);
        assert_eq!(printed.h1[(0, 1)], 0.0);
    }

    #[test]
    fn assemble_scalar_window_hand_blocks() {
        // n = 1: H1 = ‖σ‖⁴, B = 0 (the gap at the newest step vanishes),
        // D = ν‖σ‖².
        let nu = 2.5;
        let st = state_with_prev(&[&[1.0], &[3.0]], &[0.0, 4.0], &[0.5], DMatrix::zeros(1, 1), nu);
        let data = constraint_data(&st).unwrap();
        for coupling in [KktCoupling::Printed, KktCoupling::Full] {
            let sys = assemble_kkt(&st, &data.eps, &data.rho_hat, coupling).unwrap();
            assert_relative_eq!(sys.h1[(0, 0)], 16.0, epsilon = 1e-12); // ‖σ‖⁴, σ = 2
            assert_relative_eq!(sys.b[(0, 0)], 0.0, epsilon = 1e-15);
            assert_relative_eq!(sys.d[(0, 0)], nu * 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn assemble_is_linear_in_nu() {
        let mk = |nu: f64| {
            state_with_prev(
                &[&[0.0, 0.1], &[1.0, 0.3], &[1.4, 1.2]],
                &[0.0, -0.5, 0.25],
                &[0.7, -0.2],
                DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]),
                nu,
            )
        };
        let s1 = mk(1.0);
        let s2 = mk(2.0);
        let d1 = constraint_data(&s1).unwrap();
        let d2 = constraint_data(&s2).unwrap();
        assert_relative_eq!(d1.eps, d2.eps, epsilon = 1e-15); // rhs data is ν-free
        let k1 = assemble_kkt(&s1, &d1.eps, &d1.rho_hat, KktCoupling::Printed).unwrap();
        let k2 = assemble_kkt(&s2, &d2.eps, &d2.rho_hat, KktCoupling::Printed).unwrap();
        assert_relative_eq!(k2.rhs, &k1.rhs * 2.0, epsilon = 1e-14);
        assert_relative_eq!(k2.h1, k1.h1, epsilon = 1e-14);
        assert_relative_eq!(k2.b, k1.b, epsilon = 1e-14);
        // D's ν-term doubles, the gap term does not: D(2ν) − D(ν) = ν·(σᵢᵀσⱼ).
        let ss = DMatrix::from_fn(2, 2, |i, j| {
            s1.sigma(i + 1).unwrap().dot(&s1.sigma(j + 1).unwrap())
        });
        assert_relative_eq!(&k2.d - &k1.d, ss, epsilon = 1e-12);
    }

    #[test]
    fn assemble_rejects_zero_step() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[0.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[0.0, 0.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let data = constraint_data(&st).unwrap();
        assert!(matches!(
            assemble_kkt(&st, &data.eps, &data.rho_hat, KktCoupling::Full),
            Err(ModelError::DegenerateGeometry { .. })
        ));
    }

    #[test]
    fn solve_multipliers_identity_and_diagonal() {
        let sys = KktSystem {
            h1: DMatrix::identity(1, 1),
            h2: DMatrix::zeros(1, 1),
            b: DMatrix::zeros(1, 1),
            d: DMatrix::from_element(1, 1, 0.5),
            rhs: DVector::from_row_slice(&[1.0, 0.0]),
            coupling: KktCoupling::Full,
        };
        let sol = solve_multipliers(&sys, 1e-12, 100).unwrap();
        assert_relative_eq!(sol.eta[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.theta[0], 0.0, epsilon = 1e-12);

        let sys = KktSystem {
            h1: DMatrix::from_element(1, 1, 2.0),
            h2: DMatrix::zeros(1, 1),
            b: DMatrix::zeros(1, 1),
            d: DMatrix::from_element(1, 1, 2.0),
            rhs: DVector::from_row_slice(&[2.0, 4.0]),
            coupling: KktCoupling::Full,
        };
        let sol = solve_multipliers(&sys, 1e-12, 100).unwrap();
        assert_relative_eq!(sol.eta[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.theta[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_multipliers_matches_dense_lu() {
        let st = state_with_prev(
            &[&[0.1, -0.3, 0.6], &[0.9, 0.2, 0.1], &[1.2, 1.1, -0.4], &[0.3, 0.8, 0.9]],
            &[1.0, 0.2, -0.7, 0.4],
            &[0.5, -0.1, 0.8],
            DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, -0.3, 0.0, -0.3, 1.5]),
            1.0,
        );
        let data = constraint_data(&st).unwrap();
        let sys = assemble_kkt(&st, &data.eps, &data.rho_hat, KktCoupling::Full).unwrap();
        let sol = solve_multipliers(&sys, 1e-12, 400).unwrap();
        let direct = sys.matrix().lu().solve(&sys.rhs).unwrap();
        for i in 0..3 {
            assert_relative_eq!(sol.eta[i], direct[i], epsilon = 1e-9, max_relative = 1e-9);
            assert_relative_eq!(sol.theta[i], direct[3 + i], epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn apply_zero_multipliers_gives_zero_update() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0.0, 0.0, 0.0],
            &[1.0, 1.0],
            DMatrix::identity(2, 2),
            1.0,
        );
        let mult = MultiplierSolution {
            eta: DVector::zeros(2),
            theta: DVector::zeros(2),
            rel_residual: 0.0,
            used_fallback: false,
        };
        let (dg, dh) = apply_full_update(&st, &mult);
        assert_eq!(dg, DVector::zeros(2));
        assert_eq!(dh, DMatrix::zeros(2, 2));
    }

    #[test]
    fn apply_scalar_window_newest_gap_vanishes() {
        let st = state_with_prev(
            &[&[0.0, 0.0], &[2.0, 0.0]],
            &[0.0, 0.0],
            &[0.0, 0.0],
            DMatrix::zeros(2, 2),
            1.0,
        );
        let mult = MultiplierSolution {
            eta: DVector::from_row_slice(&[0.0]),
            theta: DVector::from_row_slice(&[1.0]),
            rel_residual: 0.0,
            used_fallback: false,
        };
        let (dg, dh) = apply_full_update(&st, &mult);
        assert_relative_eq!(dg, DVector::from_row_slice(&[2.0, 0.0]), epsilon = 1e-15);
        assert_relative_eq!(dh, DMatrix::zeros(2, 2), epsilon = 1e-15);
    }

    #[test]
    fn phi_objective_values() {
        assert_eq!(phi_objective(&DVector::zeros(2), &DMatrix::zeros(2, 2), 3.0), 0.0);
        assert_eq!(
            phi_objective(&DVector::from_row_slice(&[3.0, 4.0]), &DMatrix::zeros(2, 2), 1.0),
            12.5
        );
        assert_eq!(
            phi_objective(&DVector::zeros(2), &DMatrix::identity(2, 2), 2.0),
            2.0
        );
    }
}
