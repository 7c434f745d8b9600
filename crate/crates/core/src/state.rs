//! Point-history window and quadratic-model state shared by both update
//! variants.
//!
//! The solver keeps the last `n + 1` iterates so that every step
//! `σ_i = x_i − x_{i−1}` inside the window is computable, together with the
//! cached objective values and the current/previous quadratic models. All
//! update formulas consume only differences of window points; no base point
//! is stored.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative tolerance on model-Hessian symmetry enforced by state
/// transitions.
pub const SYMMETRY_RTOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("window index {index} outside valid range {lo}..={hi}")]
    IndexOutOfWindow { index: usize, lo: usize, hi: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("model Hessian is not symmetric (relative asymmetry {asymmetry:.3e})")]
    AsymmetricHessian { asymmetry: f64 },
    #[error("window needs at least {expected} points (the driver keeps n+1), got {got}")]
    BadWindowLength { expected: usize, got: usize },
    #[error("balance parameter must be positive, got {0}")]
    NonPositiveNu(f64),
}

/// A candidate or accepted iterate. All coordinates are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(DVector<f64>);

impl Point {
    pub fn new(coords: DVector<f64>) -> Result<Self, StateError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(StateError::NonFinite { context: "point coordinates" });
        }
        Ok(Point(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, StateError> {
        Self::new(DVector::from_row_slice(coords))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

/// Quadratic surrogate `Q(x) = f(anchor) + gradᵀ(x − anchor) + ½(x − anchor)ᵀ hess (x − anchor)`.
///
/// `grad` is the model gradient at `anchor` (the newest window point at the
/// time the model was built); gradients elsewhere are obtained by exact
/// transport through `hess`. Keeping the anchor explicit makes the model
/// well-defined even after window points are resampled.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
    /// Balance parameter trading gradient-change norm against
    /// Hessian-change norm in the update objective. Always positive.
    pub nu: f64,
    pub anchor: DVector<f64>,
}

impl QuadraticModel {
    pub fn new(
        grad: DVector<f64>,
        hess: DMatrix<f64>,
        nu: f64,
        anchor: DVector<f64>,
    ) -> Result<Self, StateError> {
        let n = grad.len();
        if hess.nrows() != n || hess.ncols() != n {
            return Err(StateError::DimensionMismatch { expected: n, got: hess.nrows() });
        }
        if anchor.len() != n {
            return Err(StateError::DimensionMismatch { expected: n, got: anchor.len() });
        }
        if nu <= 0.0 {
            return Err(StateError::NonPositiveNu(nu));
        }
        let asym = hessian_asymmetry(&hess);
        if asym > SYMMETRY_RTOL {
            return Err(StateError::AsymmetricHessian { asymmetry: asym });
        }
        Ok(QuadraticModel { grad, hess, nu, anchor })
    }

    /// Fresh model with identity Hessian, as used at initialization.
    pub fn identity(grad: DVector<f64>, anchor: DVector<f64>) -> Self {
        let n = grad.len();
        QuadraticModel { grad, hess: DMatrix::identity(n, n), nu: 1.0, anchor }
    }

    /// Model gradient transported from the anchor: `grad + hess·(x − anchor)`.
    pub fn gradient_at(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.grad + &self.hess * (x - &self.anchor)
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

/// Relative Frobenius asymmetry `‖H − Hᵀ‖_F / max(1, ‖H‖_F)`.
pub fn hessian_asymmetry(hess: &DMatrix<f64>) -> f64 {
    let skew = hess - hess.transpose();
    skew.norm() / hess.norm().max(1.0)
}

/// Model gradient of `model` (anchored at `x_anchor`) evaluated at `x`.
///
/// Free-function form of [`QuadraticModel::gradient_at`] with an explicit
/// anchor, for callers that transport a bare `(g, G)` pair.
pub fn model_gradient_at(
    model: &QuadraticModel,
    x_anchor: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<DVector<f64>, StateError> {
    let n = model.dim();
    if x_anchor.len() != n || x.len() != n {
        return Err(StateError::DimensionMismatch {
            expected: n,
            got: if x_anchor.len() != n { x_anchor.len() } else { x.len() },
        });
    }
    Ok(&model.grad + &model.hess * (x - x_anchor))
}

/// Sliding window of the last `n + 1` iterates together with cached objective
/// values and the current/previous quadratic models.
///
/// Window position `0` is the oldest point, position `n` the newest. The
/// steps `σ_j = window[j] − window[j−1]` exist for `j ∈ 1..=n`.
#[derive(Debug, Clone)]
pub struct ModelState {
    window: Vec<Point>,
    fvals: Vec<f64>,
    model: QuadraticModel,
    prev_model: QuadraticModel,
    iter_index: usize,
}

impl ModelState {
    /// Builds a state from a full window. `points` are oldest → newest; the
    /// driver always keeps exactly `dim + 1` of them so that every window
    /// step is computable, but shorter windows (fewer constraints than
    /// dimensions) are valid states too.
    pub fn new(
        points: Vec<Point>,
        fvals: Vec<f64>,
        model: QuadraticModel,
        prev_model: QuadraticModel,
        iter_index: usize,
    ) -> Result<Self, StateError> {
        let n = model.dim();
        if points.len() < 2 {
            return Err(StateError::BadWindowLength { expected: 2, got: points.len() });
        }
        if fvals.len() != points.len() {
            return Err(StateError::BadWindowLength { expected: points.len(), got: fvals.len() });
        }
        if points.iter().any(|p| p.dim() != n) {
            return Err(StateError::DimensionMismatch { expected: n, got: 0 });
        }
        if fvals.iter().any(|f| !f.is_finite()) {
            return Err(StateError::NonFinite { context: "cached objective values" });
        }
        if prev_model.dim() != n {
            return Err(StateError::DimensionMismatch { expected: n, got: prev_model.dim() });
        }
        Ok(ModelState { window: points, fvals, model, prev_model, iter_index })
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Number of steps in the window (= problem dimension n).
    pub fn step_count(&self) -> usize {
        self.window.len() - 1
    }

    pub fn window(&self) -> &[Point] {
        &self.window
    }

    pub fn fvals(&self) -> &[f64] {
        &self.fvals
    }

    pub fn model(&self) -> &QuadraticModel {
        &self.model
    }

    pub fn prev_model(&self) -> &QuadraticModel {
        &self.prev_model
    }

    pub fn iter_index(&self) -> usize {
        self.iter_index
    }

    pub fn newest(&self) -> &Point {
        self.window.last().expect("window is never empty")
    }

    pub fn newest_f(&self) -> f64 {
        *self.fvals.last().expect("window is never empty")
    }

    /// Second-newest window point (the previous model's natural anchor).
    pub fn second_newest(&self) -> &Point {
        &self.window[self.window.len() - 2]
    }

    /// Step `σ_j = x_j − x_{j−1}` for window position `j ∈ 1..=n`.
    pub fn sigma(&self, j: usize) -> Result<DVector<f64>, StateError> {
        let n = self.step_count();
        if j < 1 || j > n {
            return Err(StateError::IndexOutOfWindow { index: j, lo: 1, hi: n });
        }
        Ok(self.window[j].coords() - self.window[j - 1].coords())
    }

    /// Gap from window position `j` to the newest point, `x_k − x_j`.
    ///
    /// Equal to `τ_k − τ_j` for any choice of base point, so no base is ever
    /// stored.
    pub fn tau_gap(&self, j: usize) -> Result<DVector<f64>, StateError> {
        let n = self.step_count();
        if j > n {
            return Err(StateError::IndexOutOfWindow { index: j, lo: 0, hi: n });
        }
        Ok(self.newest().coords() - self.window[j].coords())
    }

    /// All window steps `σ_1..σ_n`, oldest first.
    pub fn sigmas(&self) -> Vec<DVector<f64>> {
        (1..=self.step_count()).map(|j| self.sigma(j).expect("in range")).collect()
    }

    /// All gaps `x_k − x_j` for `j = 1..=n` (matching [`Self::sigmas`]
    /// indices; the gap for the newest step is the zero vector).
    pub fn tau_gaps(&self) -> Vec<DVector<f64>> {
        (1..=self.step_count()).map(|j| self.tau_gap(j).expect("in range")).collect()
    }

    /// Objective difference `Δf_j = f(x_j) − f(x_{j−1})` for `j ∈ 1..=n`.
    pub fn delta_f(&self, j: usize) -> Result<f64, StateError> {
        let n = self.step_count();
        if j < 1 || j > n {
            return Err(StateError::IndexOutOfWindow { index: j, lo: 1, hi: n });
        }
        Ok(self.fvals[j] - self.fvals[j - 1])
    }

    /// Drops the oldest point, appends `x_new`, and bumps the iteration
    /// counter. The models are left untouched; callers update them
    /// separately.
    pub fn push_point(&mut self, x_new: Point, f_new: f64) -> Result<(), StateError> {
        if !f_new.is_finite() {
            return Err(StateError::NonFinite { context: "objective value at new point" });
        }
        if x_new.dim() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), got: x_new.dim() });
        }
        self.window.remove(0);
        self.window.push(x_new);
        self.fvals.remove(0);
        self.fvals.push(f_new);
        self.iter_index += 1;
        Ok(())
    }

    /// Replaces the window point at `pos` (and its cached value). Used by the
    /// resampling paths; the models stay valid because their anchors are
    /// stored explicitly.
    pub fn replace_point(&mut self, pos: usize, x: Point, f: f64) -> Result<(), StateError> {
        if pos >= self.window.len() {
            return Err(StateError::IndexOutOfWindow {
                index: pos,
                lo: 0,
                hi: self.window.len() - 1,
            });
        }
        if !f.is_finite() {
            return Err(StateError::NonFinite { context: "objective value at replacement point" });
        }
        if x.dim() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        self.window[pos] = x;
        self.fvals[pos] = f;
        Ok(())
    }

    /// Replaces the model gradient in place (used by the driver's
    /// convergence-verification refit). The anchor and Hessian stay.
    pub fn replace_gradient(&mut self, grad: DVector<f64>) -> Result<(), StateError> {
        if grad.len() != self.dim() {
            return Err(StateError::DimensionMismatch { expected: self.dim(), got: grad.len() });
        }
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(StateError::NonFinite { context: "replacement gradient" });
        }
        self.model.grad = grad;
        Ok(())
    }

    /// Copies the current model into `prev_model`, re-anchoring it at the
    /// second-newest point so the constraint right-hand sides read
    /// `g^(k−1)_{k−1}` directly. Called once at the start of each update.
    pub fn rotate_models(&mut self) {
        let anchor = self.second_newest().coords().clone();
        let grad = self.model.gradient_at(&anchor);
        self.prev_model = QuadraticModel {
            grad,
            hess: self.model.hess.clone(),
            nu: self.model.nu,
            anchor,
        };
    }

    /// Installs the updated model `(prev.grad + Δg, prev.hess + ΔG, nu)`
    /// anchored at the newest point. `ΔG` is symmetrized against rounding
    /// before the symmetry invariant is re-checked.
    pub fn commit_update(
        &mut self,
        delta_g: &DVector<f64>,
        delta_hess: &DMatrix<f64>,
        nu: f64,
    ) -> Result<(), StateError> {
        let n = self.dim();
        if delta_g.len() != n || delta_hess.nrows() != n || delta_hess.ncols() != n {
            return Err(StateError::DimensionMismatch { expected: n, got: delta_g.len() });
        }
        if delta_g.iter().any(|v| !v.is_finite()) || delta_hess.iter().any(|v| !v.is_finite()) {
            return Err(StateError::NonFinite { context: "model update" });
        }
        let grad = &self.prev_model.grad + delta_g;
        let mut hess = &self.prev_model.hess + delta_hess;
        let sym = (&hess + hess.transpose()) * 0.5;
        hess = sym;
        self.model = QuadraticModel::new(grad, hess, nu, self.newest().coords().clone())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state_from_window(points: &[&[f64]], fvals: &[f64]) -> ModelState {
        let n = points[0].len();
        let pts: Vec<Point> = points.iter().map(|p| Point::from_slice(p).unwrap()).collect();
        let anchor = DVector::from_row_slice(points[points.len() - 1]);
        let model = QuadraticModel::identity(DVector::zeros(n), anchor.clone());
        let prev = QuadraticModel::identity(DVector::zeros(n), anchor);
        ModelState::new(pts, fvals.to_vec(), model, prev, 0).unwrap()
    }

    #[test]
    fn sigma_is_direct_subtraction() {
        let st = state_from_window(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0]], &[0.0, 0.0, 0.0]);
        assert_eq!(st.sigma(2).unwrap(), DVector::from_row_slice(&[0.0, 2.0]));
        assert_eq!(st.sigma(1).unwrap(), DVector::from_row_slice(&[1.0, 0.0]));
    }

    #[test]
    fn sigma_of_repeated_point_is_zero() {
        let st = state_from_window(&[&[0.5], &[0.5]], &[1.0, 1.0]);
        assert_eq!(st.sigma(1).unwrap(), DVector::zeros(1));
    }

    #[test]
    fn sigma_two_point_window() {
        let st = state_from_window(&[&[1.0, 1.0], &[2.0, 3.0]], &[0.0, 0.0]);
        assert_eq!(st.sigma(1).unwrap(), DVector::from_row_slice(&[1.0, 2.0]));
    }

    #[test]
    fn sigma_range_errors() {
        let st = state_from_window(&[&[0.0], &[1.0]], &[0.0, 0.0]);
        assert!(matches!(st.sigma(0), Err(StateError::IndexOutOfWindow { .. })));
        assert!(matches!(st.sigma(2), Err(StateError::IndexOutOfWindow { .. })));
    }

    #[test]
    fn tau_gap_at_newest_is_zero() {
        let st = state_from_window(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0]], &[0.0; 3]);
        assert_eq!(st.tau_gap(2).unwrap(), DVector::zeros(2));
    }

    #[test]
    fn tau_gap_spans_window() {
        let st = state_from_window(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0]], &[0.0; 3]);
        assert_eq!(st.tau_gap(0).unwrap(), DVector::from_row_slice(&[1.0, 2.0]));
    }

    #[test]
    fn tau_gap_one_dimensional() {
        let st = state_from_window(&[&[3.0], &[5.0]], &[0.0, 0.0]);
        assert_eq!(st.tau_gap(0).unwrap(), DVector::from_row_slice(&[2.0]));
        assert!(st.tau_gap(3).is_err());
    }

    #[test]
    fn sigma_tau_telescoping() {
        let st = state_from_window(
            &[&[0.3, -1.0, 2.0], &[1.5, 0.5, -0.25], &[2.0, 2.0, 2.0], &[-1.0, 0.0, 1.0]],
            &[0.0; 4],
        );
        for j in 1..=st.step_count() {
            let lhs = st.sigma(j).unwrap();
            let rhs = st.tau_gap(j - 1).unwrap() - st.tau_gap(j).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-15);
        }
    }

    #[test]
    fn gradient_transport_at_anchor_is_grad() {
        let anchor = DVector::from_row_slice(&[1.0, -2.0]);
        let m = QuadraticModel::new(
            DVector::from_row_slice(&[3.0, 4.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]),
            1.0,
            anchor.clone(),
        )
        .unwrap();
        assert_eq!(m.gradient_at(&anchor), m.grad);
    }

    #[test]
    fn gradient_transport_identity_hessian() {
        let m = QuadraticModel::identity(DVector::zeros(2), DVector::zeros(2));
        let x = DVector::from_row_slice(&[1.0, 2.0]);
        assert_eq!(m.gradient_at(&x), x);
    }

    #[test]
    fn gradient_transport_matches_finite_differences_of_q() {
        // g=(1,0), G=[[2,0],[0,0]], displacement (1,1): hand value (3,0),
        // cross-checked by central differences of Q itself.
        let anchor = DVector::zeros(2);
        let m = QuadraticModel::new(
            DVector::from_row_slice(&[1.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]),
            1.0,
            anchor.clone(),
        )
        .unwrap();
        let x = DVector::from_row_slice(&[1.0, 1.0]);
        let g = m.gradient_at(&x);
        assert_relative_eq!(g, DVector::from_row_slice(&[3.0, 0.0]), epsilon = 1e-14);

        let q = |y: &DVector<f64>| {
            let d = y - &anchor;
            m.grad.dot(&d) + 0.5 * (&m.hess * &d).dot(&d)
        };
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (q(&xp) - q(&xm)) / (2.0 * h);
            assert_relative_eq!(g[i], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn gradient_transport_shape_error() {
        let m = QuadraticModel::identity(DVector::zeros(2), DVector::zeros(2));
        let bad = DVector::zeros(3);
        assert!(model_gradient_at(&m, &DVector::zeros(2), &bad).is_err());
    }

    #[test]
    fn gradient_transport_is_affine() {
        let m = QuadraticModel::new(
            DVector::from_row_slice(&[0.2, -0.7]),
            DMatrix::from_row_slice(2, 2, &[1.5, -0.25, -0.25, 0.75]),
            1.0,
            DVector::from_row_slice(&[0.1, 0.1]),
        )
        .unwrap();
        let a = DVector::from_row_slice(&[2.0, -3.0]);
        let b = DVector::from_row_slice(&[-1.0, 4.0]);
        let mid = (&a + &b) * 0.5;
        let avg = (m.gradient_at(&a) + m.gradient_at(&b)) * 0.5;
        assert_relative_eq!(m.gradient_at(&mid), avg, epsilon = 1e-14);
    }

    #[test]
    fn push_point_fifo() {
        let mut st =
            state_from_window(&[&[0.0], &[1.0]], &[10.0, 11.0]);
        st.push_point(Point::from_slice(&[2.0]).unwrap(), 12.0).unwrap();
        assert_eq!(st.window().len(), 2);
        assert_eq!(st.window()[0].coords()[0], 1.0);
        assert_eq!(st.window()[1].coords()[0], 2.0);
        assert_eq!(st.fvals(), &[11.0, 12.0]);
        assert_eq!(st.iter_index(), 1);
    }

    #[test]
    fn push_point_keeps_length_on_duplicates() {
        let mut st = state_from_window(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]], &[0.0; 3]);
        let dup = st.newest().clone();
        let f = st.newest_f();
        st.push_point(dup.clone(), f).unwrap();
        st.push_point(dup, f).unwrap();
        assert_eq!(st.window().len(), 3);
        assert_eq!(st.fvals().len(), 3);
    }

    #[test]
    fn push_point_rejects_non_finite() {
        let mut st = state_from_window(&[&[0.0], &[1.0]], &[0.0, 0.0]);
        let p = Point::from_slice(&[2.0]).unwrap();
        assert!(st.push_point(p, f64::NAN).is_err());
        assert!(Point::from_slice(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn commit_update_preserves_symmetry() {
        let mut st = state_from_window(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0]], &[0.0; 3]);
        // Asymmetric increment must come out exactly symmetric.
        let dg = DVector::from_row_slice(&[0.1, -0.2]);
        let dh = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        st.commit_update(&dg, &dh, 1.0).unwrap();
        let h = &st.model().hess;
        assert_eq!(h[(0, 1)], h[(1, 0)]);
        assert!(hessian_asymmetry(h) <= SYMMETRY_RTOL);
    }

    #[test]
    fn rotate_models_reanchors_at_second_newest() {
        let mut st = state_from_window(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 2.0]], &[0.0; 3]);
        st.rotate_models();
        assert_eq!(st.prev_model().anchor, st.second_newest().coords().clone());
        // identity hessian: transported gradient picks up the anchor shift
        let expected = st.model().gradient_at(st.second_newest().coords());
        assert_relative_eq!(st.prev_model().grad, expected, epsilon = 1e-15);
    }
}
