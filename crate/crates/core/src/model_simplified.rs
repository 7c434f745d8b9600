//! The relaxed two-constraint model update and the ν adaptation rule.
//!
//! Keeping only the newest step's pair of constraints makes the least-norm
//! problem separable and closed-form: the gradient change is the minimum-norm
//! solution of `σ_kᵀ Δg = ε̂_k` and the Hessian change the minimum-Frobenius
//! rank-one solution of `½σ_kᵀ ΔG σ_k = ρ̌_k`. No linear system is solved.

use nalgebra::{DMatrix, DVector};

use crate::model_full::ModelError;
use crate::state::ModelState;

/// ν is kept inside this range however the adaptation rule drives it.
pub const NU_CLAMP: (f64, f64) = (1e-6, 1e6);

/// Right-hand sides of the two retained constraints:
/// `ρ̌_k = −Δf_k − ½σ_kᵀ G⁽ᵏ⁻¹⁾ σ_k` and `ε̂_k = −σ_kᵀ g⁽ᵏ⁻¹⁾_{k−1}`.
#[derive(Debug, Clone, Copy)]
pub struct SimplifiedRhs {
    pub rho_check: f64,
    pub eps_hat: f64,
}

fn newest_step(state: &ModelState) -> Result<DVector<f64>, ModelError> {
    let sigma = state.sigma(state.step_count())?;
    let threshold = 1e-12 * state.newest().coords().norm().max(1.0);
    let norm = sigma.norm();
    if norm <= threshold {
        return Err(ModelError::DegenerateGeometry { min_step: norm, threshold });
    }
    Ok(sigma)
}

pub fn simplified_rhs(state: &ModelState) -> Result<SimplifiedRhs, ModelError> {
    let n = state.step_count();
    let sigma = newest_step(state)?;
    let prev = state.prev_model();
    let g_prev = prev.gradient_at(state.second_newest().coords());
    let rho_check = -state.delta_f(n)? - 0.5 * sigma.dot(&(&prev.hess * &sigma));
    let eps_hat = -sigma.dot(&g_prev);
    Ok(SimplifiedRhs { rho_check, eps_hat })
}

/// Closed-form multipliers of the two-constraint problem:
/// `η_k = −(4Δf_k + 2σ_kᵀGσ_k)/‖σ_k‖⁴`, `θ_k = −σ_kᵀg/‖σ_k‖²`.
pub fn simplified_multipliers(state: &ModelState) -> Result<(f64, f64), ModelError> {
    let n = state.step_count();
    let sigma = newest_step(state)?;
    let prev = state.prev_model();
    let g_prev = prev.gradient_at(state.second_newest().coords());
    let s2 = sigma.norm_squared();
    let eta = -(4.0 * state.delta_f(n)? + 2.0 * sigma.dot(&(&prev.hess * &sigma))) / (s2 * s2);
    let theta = -sigma.dot(&g_prev) / s2;
    Ok((eta, theta))
}

/// Rank-one update pair `Δg* = θ_k σ_k`, `ΔG* = ½ η_k σ_k σ_kᵀ`.
///
/// Both relaxed constraints hold exactly: `σᵀΔg* = ε̂` and
/// `½σᵀΔG*σ = ρ̌` for every ν, since ν only rescales the ΔG part of the
/// objective and the two constraints separate.
pub fn simplified_update(state: &ModelState) -> Result<(DVector<f64>, DMatrix<f64>), ModelError> {
    let (eta, theta) = simplified_multipliers(state)?;
    let sigma = newest_step(state)?;
    let delta_g = &sigma * theta;
    let delta_hess = &sigma * sigma.transpose() * (0.5 * eta);
    Ok((delta_g, delta_hess))
}

/// Multiplicative ν adaptation: grow by 1.1 when the gradient change
/// dominates (`‖Δg‖² ≥ 1.1‖ΔG‖²_F`), keep ν inside the `[0.9, 1.1]` band,
/// shrink by 0.9 otherwise. The result is clamped to [`NU_CLAMP`].
pub fn update_nu(nu: f64, delta_g: &DVector<f64>, delta_hess: &DMatrix<f64>) -> f64 {
    let g2 = delta_g.norm_squared();
    let h2 = delta_hess.norm_squared();
    let scaled = if g2 >= 1.1 * h2 {
        1.1 * nu
    } else if g2 >= 0.9 * h2 {
        nu
    } else {
        0.9 * nu
    };
    scaled.clamp(NU_CLAMP.0, NU_CLAMP.1)
}
