//! Small dense linear-algebra kernel: restarted GMRES, damped direct solves
//! for the Newton step, and rank-one inverse updates for the quasi-Newton
//! variants.
//!
//! Matrix storage and factorizations come from `nalgebra`; the iterative and
//! rank-one pieces are implemented here.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch between operator ({operator}) and vector ({vector})")]
    DimensionMismatch { operator: usize, vector: usize },
    #[error("rank-one update rejected: denominator {denominator:.3e} too close to zero")]
    UpdateRejected { denominator: f64 },
    #[error("damping ladder exhausted at lambda = {lambda:.3e}")]
    DampingExhausted { lambda: f64 },
    #[error("linear solve failed ({context}); achieved relative residual {residual:.3e}")]
    NumericalFailure { context: String, residual: f64 },
}

/// Termination state of a GMRES run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmresStatus {
    /// Relative residual reached the requested tolerance.
    Converged,
    /// Residual reduction over a full restart cycle fell below 10x; the
    /// caller should fall back to a direct solve.
    Stagnated,
    /// Arnoldi produced a (near-)zero vector without reaching the tolerance.
    Breakdown,
    /// Iteration budget exhausted.
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct GmresReport {
    pub x: DVector<f64>,
    pub rel_residual: f64,
    pub iterations: usize,
    pub status: GmresStatus,
}

/// Restarted GMRES for a general square operator given as a matrix-free
/// closure.
///
/// Modified Gram-Schmidt Arnoldi with Givens rotations on the Hessenberg
/// factor. A happy breakdown (zero Arnoldi norm with the tolerance met)
/// reports `Converged`; a breakdown without convergence is reported
/// distinctly from plain non-convergence so callers can react.
pub fn gmres<F>(
    apply: F,
    b: &DVector<f64>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> GmresReport
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = b.len();
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return GmresReport {
            x: DVector::zeros(n),
            rel_residual: 0.0,
            iterations: 0,
            status: GmresStatus::Converged,
        };
    }
    let m = restart.clamp(1, n.max(1));
    let mut x = DVector::zeros(n);
    let mut total_iters = 0usize;

    let residual_of = |x: &DVector<f64>| {
        let r = b - apply(x);
        r.norm() / b_norm
    };

    loop {
        let r = b - apply(&x);
        let beta = r.norm();
        let rel = beta / b_norm;
        if rel <= tol {
            return GmresReport { x, rel_residual: rel, iterations: total_iters, status: GmresStatus::Converged };
        }
        if total_iters >= max_iter {
            return GmresReport { x, rel_residual: rel, iterations: total_iters, status: GmresStatus::MaxIterations };
        }
        let cycle_start_rel = rel;

        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m + 1);
        basis.push(&r / beta);
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![0.0f64; m];
        let mut g = DVector::<f64>::zeros(m + 1);
        g[0] = beta;

        let mut cols = 0usize;
        let mut breakdown = false;

        for j in 0..m {
            if total_iters >= max_iter {
                break;
            }
            total_iters += 1;
            let mut w = apply(&basis[j]);
            for i in 0..=j {
                let hij = w.dot(&basis[i]);
                h[(i, j)] = hij;
                w.axpy(-hij, &basis[i], 1.0);
            }
            let wnorm = w.norm();
            h[(j + 1, j)] = wnorm;
            cols = j + 1;

            // Rotate the new column through the accumulated Givens rotations.
            for i in 0..j {
                let tmp = cs[i] * h[(i, j)] + sn[i] * h[(i + 1, j)];
                h[(i + 1, j)] = -sn[i] * h[(i, j)] + cs[i] * h[(i + 1, j)];
                h[(i, j)] = tmp;
            }
            let denom = (h[(j, j)] * h[(j, j)] + h[(j + 1, j)] * h[(j + 1, j)]).sqrt();
            if denom > 0.0 {
                cs[j] = h[(j, j)] / denom;
                sn[j] = h[(j + 1, j)] / denom;
                h[(j, j)] = denom;
                h[(j + 1, j)] = 0.0;
                let gj = g[j];
                g[j] = cs[j] * gj;
                g[j + 1] = -sn[j] * gj;
            }

            let est = g[j + 1].abs() / b_norm;
            if wnorm <= 1e-14 * beta.max(1.0) {
                breakdown = true;
                break;
            }
            basis.push(&w / wnorm);
            if est <= tol {
                break;
            }
        }

        // Back-substitute the triangularized least-squares system and update x.
        if cols > 0 {
            let mut y = DVector::<f64>::zeros(cols);
            for i in (0..cols).rev() {
                let mut s = g[i];
                for l in (i + 1)..cols {
                    s -= h[(i, l)] * y[l];
                }
                y[i] = s / h[(i, i)];
            }
            for (i, yi) in y.iter().enumerate() {
                x.axpy(*yi, &basis[i], 1.0);
            }
        }

        let rel_now = residual_of(&x);
        if rel_now <= tol {
            return GmresReport { x, rel_residual: rel_now, iterations: total_iters, status: GmresStatus::Converged };
        }
        if breakdown {
            return GmresReport { x, rel_residual: rel_now, iterations: total_iters, status: GmresStatus::Breakdown };
        }
        if total_iters >= max_iter {
            return GmresReport { x, rel_residual: rel_now, iterations: total_iters, status: GmresStatus::MaxIterations };
        }
        // Less than a 10x drop over the whole cycle counts as stagnation.
        if rel_now > cycle_start_rel / 10.0 {
            return GmresReport { x, rel_residual: rel_now, iterations: total_iters, status: GmresStatus::Stagnated };
        }
    }
}

/// Solves `(G + λI) d = g` with the smallest λ from the ladder
/// `{0, λ₀, 2λ₀, 4λ₀, …}` for which the LU factorization succeeds and the
/// solution is finite. Returns the step and the λ that was used.
pub fn solve_damped(
    hess: &DMatrix<f64>,
    grad: &DVector<f64>,
    lambda0: f64,
) -> Result<(DVector<f64>, f64), LinalgError> {
    let n = hess.nrows();
    if grad.len() != n || hess.ncols() != n {
        return Err(LinalgError::DimensionMismatch { operator: n, vector: grad.len() });
    }
    let mut lambda = 0.0f64;
    loop {
        let shifted = if lambda == 0.0 {
            hess.clone()
        } else {
            hess + DMatrix::identity(n, n) * lambda
        };
        if let Some(d) = shifted.lu().solve(grad) {
            if d.iter().all(|v| v.is_finite()) {
                return Ok((d, lambda));
            }
        }
        lambda = if lambda == 0.0 { lambda0.max(f64::MIN_POSITIVE) } else { 2.0 * lambda };
        if lambda > 1e8 {
            return Err(LinalgError::DampingExhausted { lambda });
        }
    }
}

/// Sherman-Morrison inverse update: given `B = G⁻¹`, returns `(G + uvᵀ)⁻¹`.
///
/// Rejects the update (caller keeps `B`) when `1 + vᵀBu` is within 1e-12 of
/// zero.
pub fn sherman_morrison(
    b_inv: &DMatrix<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DMatrix<f64>, LinalgError> {
    let n = b_inv.nrows();
    if u.len() != n || v.len() != n || b_inv.ncols() != n {
        return Err(LinalgError::DimensionMismatch { operator: n, vector: u.len() });
    }
    let bu = b_inv * u;
    let vb = b_inv.transpose() * v; // row vᵀB, stored as a column
    let denom = 1.0 + v.dot(&bu);
    if denom.abs() <= 1e-12 {
        return Err(LinalgError::UpdateRejected { denominator: denom });
    }
    Ok(b_inv - (&bu * vb.transpose()) / denom)
}

/// Rank-one (SR1-style) inverse update
/// `B ← B + (p − Bq) pᵀB / (pᵀBq)`, enforcing the secant equation
/// `B_new q = p`.
pub fn sr1_inverse_update(
    b_inv: &DMatrix<f64>,
    p: &DVector<f64>,
    q: &DVector<f64>,
) -> Result<DMatrix<f64>, LinalgError> {
    let n = b_inv.nrows();
    if p.len() != n || q.len() != n {
        return Err(LinalgError::DimensionMismatch { operator: n, vector: p.len() });
    }
    let bq = b_inv * q;
    let denom = p.dot(&bq);
    let guard = 1e-12 * p.norm() * b_inv.norm() * q.norm();
    if denom.abs() <= guard {
        return Err(LinalgError::UpdateRejected { denominator: denom });
    }
    let pb = b_inv.transpose() * p; // pᵀB as a column
    Ok(b_inv + (p - bq) * pb.transpose() / denom)
}

/// Standard BFGS inverse update
/// `B ← (I − ρpqᵀ) B (I − ρqpᵀ) + ρppᵀ` with `ρ = 1/(qᵀp)`.
///
/// Rejected when the curvature `qᵀp` is not safely positive.
pub fn bfgs_inverse_update(
    b_inv: &DMatrix<f64>,
    p: &DVector<f64>,
    q: &DVector<f64>,
) -> Result<DMatrix<f64>, LinalgError> {
    let n = b_inv.nrows();
    if p.len() != n || q.len() != n {
        return Err(LinalgError::DimensionMismatch { operator: n, vector: p.len() });
    }
    let curvature = q.dot(p);
    if curvature <= 1e-12 {
        return Err(LinalgError::UpdateRejected { denominator: curvature });
    }
    let rho = 1.0 / curvature;
    let ident = DMatrix::identity(n, n);
    let left = &ident - (p * q.transpose()) * rho;
    let right = &ident - (q * p.transpose()) * rho;
    Ok(&left * b_inv * &right + (p * p.transpose()) * rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn gmres_identity_operator() {
        let b = DVector::from_row_slice(&[1.0, -2.0, 3.0]);
        let rep = gmres(|v| v.clone(), &b, 1e-12, 3, 50);
        assert_eq!(rep.status, GmresStatus::Converged);
        assert_relative_eq!(rep.x, b, epsilon = 1e-12);
    }

    #[test]
    fn gmres_diagonal_operator() {
        let d = DVector::from_row_slice(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let apply = |v: &DVector<f64>| v.component_mul(&d);
        let rep = gmres(apply, &d, 1e-12, 5, 100);
        assert_eq!(rep.status, GmresStatus::Converged);
        assert_relative_eq!(rep.x, DVector::from_element(5, 1.0), epsilon = 1e-10);
    }

    #[test]
    fn gmres_matches_cholesky_on_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 8);
        let spd = &a * a.transpose() + DMatrix::identity(8, 8) * 8.0;
        let b = DVector::from_fn(8, |i, _| (i as f64 + 1.0).sin());
        let rep = gmres(|v| &spd * v, &b, 1e-12, 8, 200);
        assert_eq!(rep.status, GmresStatus::Converged);
        let direct = spd.clone().cholesky().unwrap().solve(&b);
        assert_relative_eq!(rep.x, direct, epsilon = 1e-9);
    }

    #[test]
    fn gmres_zero_rhs() {
        let rep = gmres(|v| v.clone(), &DVector::zeros(4), 1e-12, 4, 10);
        assert_eq!(rep.status, GmresStatus::Converged);
        assert_eq!(rep.x, DVector::zeros(4));
    }

    #[test]
    fn gmres_reports_breakdown_distinctly() {
        // Singular operator with b outside the range: the Krylov space
        // degenerates without reaching the tolerance.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let b = DVector::from_row_slice(&[1.0, 1.0]);
        let rep = gmres(|v| &a * v, &b, 1e-12, 2, 50);
        assert_ne!(rep.status, GmresStatus::Converged);
        assert!(matches!(rep.status, GmresStatus::Breakdown | GmresStatus::Stagnated));
    }

    #[test]
    fn solve_damped_identity() {
        let g = DVector::from_row_slice(&[1.0, 2.0]);
        let (d, lambda) = solve_damped(&DMatrix::identity(2, 2), &g, 1e-4).unwrap();
        assert_eq!(lambda, 0.0);
        assert_relative_eq!(d, g, epsilon = 1e-14);
    }

    #[test]
    fn solve_damped_singular_engages_ladder() {
        let g = DVector::from_row_slice(&[1.0, 0.0]);
        let (d, lambda) = solve_damped(&DMatrix::zeros(2, 2), &g, 1e-4).unwrap();
        assert_eq!(lambda, 1e-4);
        assert_relative_eq!(d, &g / 1e-4, epsilon = 1e-12);
    }

    #[test]
    fn solve_damped_indefinite_matches_lu() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let g = DVector::from_row_slice(&[0.5, 0.25]);
        let (d, lambda) = solve_damped(&h, &g, 1e-4).unwrap();
        assert_eq!(lambda, 0.0);
        let direct = h.clone().lu().solve(&g).unwrap();
        assert_relative_eq!(d, direct, epsilon = 1e-12);
    }

    #[test]
    fn sherman_morrison_zero_u_is_identity_update() {
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let out = sherman_morrison(&b, &DVector::zeros(2), &DVector::from_row_slice(&[1.0, 1.0]))
            .unwrap();
        assert_relative_eq!(out, b, epsilon = 1e-15);
    }

    #[test]
    fn sherman_morrison_rank_one_hand_case() {
        // B = I, u = v = e1: inverse of I + e1 e1ᵀ is I − ½ e1 e1ᵀ.
        let e1 = DVector::from_row_slice(&[1.0, 0.0]);
        let out = sherman_morrison(&DMatrix::identity(2, 2), &e1, &e1).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert_relative_eq!(out, expected, epsilon = 1e-14);
    }

    #[test]
    fn sherman_morrison_inverts_rank_one_modification() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 4) + DMatrix::identity(4, 4) * 4.0;
        let b = a.clone().try_inverse().unwrap();
        let u = DVector::from_fn(4, |i, _| 0.3 * (i as f64 + 1.0));
        let v = DVector::from_fn(4, |i, _| 0.2 * (i as f64 - 1.5));
        let out = sherman_morrison(&b, &u, &v).unwrap();
        let modified = &a + &u * v.transpose();
        assert_relative_eq!(&out * &modified, DMatrix::identity(4, 4), epsilon = 1e-10);
    }

    #[test]
    fn sherman_morrison_rejects_singular_denominator() {
        // v chosen so 1 + vᵀBu = 0.
        let b = DMatrix::identity(2, 2);
        let u = DVector::from_row_slice(&[1.0, 0.0]);
        let v = DVector::from_row_slice(&[-1.0, 0.0]);
        assert!(matches!(
            sherman_morrison(&b, &u, &v),
            Err(LinalgError::UpdateRejected { .. })
        ));
    }

    #[test]
    fn sr1_no_op_when_secant_already_holds() {
        let b = DMatrix::from_row_slice(2, 2, &[1.5, 0.25, 0.25, 2.0]);
        let q = DVector::from_row_slice(&[1.0, -1.0]);
        let p = &b * &q;
        let out = sr1_inverse_update(&b, &p, &q).unwrap();
        assert_relative_eq!(out, b, epsilon = 1e-14);
    }

    #[test]
    fn sr1_identity_fixed_point() {
        let b = DMatrix::identity(3, 3);
        let p = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        let out = sr1_inverse_update(&b, &p, &p).unwrap();
        assert_relative_eq!(out, DMatrix::identity(3, 3), epsilon = 1e-14);
    }

    #[test]
    fn sr1_enforces_secant_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_matrix(&mut rng, 3) + DMatrix::identity(3, 3) * 3.0;
        let p = DVector::from_row_slice(&[0.4, -0.2, 0.9]);
        let q = DVector::from_row_slice(&[1.1, 0.3, -0.5]);
        let out = sr1_inverse_update(&b, &p, &q).unwrap();
        assert_relative_eq!(&out * &q, p, epsilon = 1e-10);
    }

    #[test]
    fn bfgs_enforces_secant_and_guards_curvature() {
        let b = DMatrix::identity(3, 3);
        let p = DVector::from_row_slice(&[0.5, 0.1, -0.3]);
        let q = DVector::from_row_slice(&[0.7, 0.2, -0.1]);
        let out = bfgs_inverse_update(&b, &p, &q).unwrap();
        assert_relative_eq!(&out * &q, p, epsilon = 1e-12);

        let q_bad = -&p;
        assert!(matches!(
            bfgs_inverse_update(&b, &p, &q_bad),
            Err(LinalgError::UpdateRejected { .. })
        ));
    }
}
