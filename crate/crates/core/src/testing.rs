//! Test support: random model states and an independent equality-constrained
//! QP oracle over the symmetric-matrix parameterization.
//!
//! The oracle deliberately takes a different route from the library: updates
//! are flattened into `[Δg; vech(ΔG)]`, the Frobenius norm becomes a
//! diagonal weight on vech entries, and the KKT system of the QP is solved
//! densely. Nothing here touches the multiplier formulas under test; it
//! exists so the unit, integration, and acceptance suites check against the
//! same reference computation.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::{ModelState, Point, QuadraticModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    (&a + a.transpose()) * 0.5
}

/// Random state with `steps` window steps in `dim` dimensions,
/// non-degenerate geometry, random cached f-values, and a random previous
/// model anchored at the second-newest point. `nu` is drawn log-uniformly
/// from [0.1, 10] unless pinned.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    steps: usize,
    dim: usize,
    nu: Option<f64>,
) -> ModelState {
    let nu = nu.unwrap_or_else(|| 10f64.powf(rng.random::<f64>() * 2.0 - 1.0));
    let mut points = Vec::with_capacity(steps + 1);
    let mut x = random_vector(rng, dim);
    points.push(Point::new(x.clone()).unwrap());
    for _ in 0..steps {
        loop {
            let step = random_vector(rng, dim) * (0.1 + rng.random::<f64>());
            if step.norm() > 1e-3 {
                x = &x + step;
                break;
            }
        }
        points.push(Point::new(x.clone()).unwrap());
    }
    let fvals: Vec<f64> = (0..=steps).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let second = points[points.len() - 2].coords().clone();
    let newest = points[points.len() - 1].coords().clone();
    let prev = QuadraticModel::new(
        random_vector(rng, dim),
        random_symmetric(rng, dim),
        nu,
        second,
    )
    .unwrap();
    let model = QuadraticModel::new(prev.grad.clone(), prev.hess.clone(), nu, newest).unwrap();
    ModelState::new(points, fvals, model, prev, steps).unwrap()
}

/// vech index helpers: symmetric dim×dim matrices flattened as the lower
/// triangle, diagonal first ordering (j, l) with j >= l.
pub fn vech_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

pub fn vech_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(vech_len(dim));
    for j in 0..dim {
        for l in 0..=j {
            pairs.push((j, l));
        }
    }
    pairs
}

pub fn mat_from_vech(dim: usize, v: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for (idx, (j, l)) in vech_pairs(dim).iter().enumerate() {
        m[(*j, *l)] = v[idx];
        m[(*l, *j)] = v[idx];
    }
    m
}

/// Coefficient row of the linear functional `M ↦ σᵀ M τ` over vech
/// coordinates (for symmetric M).
pub fn bilinear_row(dim: usize, sigma: &DVector<f64>, tau: &DVector<f64>) -> DVector<f64> {
    let pairs = vech_pairs(dim);
    let mut row = DVector::zeros(pairs.len());
    for (idx, (j, l)) in pairs.iter().enumerate() {
        row[idx] = if j == l {
            sigma[*j] * tau[*j]
        } else {
            sigma[*j] * tau[*l] + sigma[*l] * tau[*j]
        };
    }
    row
}

/// Constraint rows of the full 2n-constraint problem over `[Δg; vech(ΔG)]`,
/// with right-hand sides from the library's ε/ρ̂ (the data is shared; the
/// parameterization and solve are not).
pub fn full_constraint_system(state: &ModelState) -> (DMatrix<f64>, DVector<f64>) {
    let n = state.step_count();
    let dim = state.dim();
    let cols = dim + vech_len(dim);
    let eps = crate::model_full::compute_epsilon(state).unwrap();
    let rho_hat = crate::model_full::compute_rho_hat(state).unwrap();
    let mut a = DMatrix::zeros(2 * n, cols);
    let mut b = DVector::zeros(2 * n);
    for j in 1..=n {
        let s = state.sigma(j).unwrap();
        let t = state.tau_gap(j).unwrap();
        // curvature family: σᵀ ΔG σ = ρ̂
        let row = bilinear_row(dim, &s, &s);
        for (c, v) in row.iter().enumerate() {
            a[(j - 1, dim + c)] = *v;
        }
        b[j - 1] = rho_hat[j - 1];
        // orthogonality family: σᵀ Δg − σᵀ ΔG (τ_k − τ) = ε
        for c in 0..dim {
            a[(n + j - 1, c)] = s[c];
        }
        let row = bilinear_row(dim, &s, &t);
        for (c, v) in row.iter().enumerate() {
            a[(n + j - 1, dim + c)] = -*v;
        }
        b[n + j - 1] = eps[j - 1];
    }
    (a, b)
}

/// Constraint rows of the simplified two-constraint problem.
pub fn simplified_constraint_system(state: &ModelState) -> (DMatrix<f64>, DVector<f64>) {
    let dim = state.dim();
    let n = state.step_count();
    let cols = dim + vech_len(dim);
    let rhs = crate::model_simplified::simplified_rhs(state).unwrap();
    let s = state.sigma(n).unwrap();
    let mut a = DMatrix::zeros(2, cols);
    let mut b = DVector::zeros(2);
    // ½ σᵀ ΔG σ = ρ̌
    let row = bilinear_row(dim, &s, &s) * 0.5;
    for (c, v) in row.iter().enumerate() {
        a[(0, dim + c)] = *v;
    }
    b[0] = rhs.rho_check;
    // σᵀ Δg = ε̂
    for c in 0..dim {
        a[(1, c)] = s[c];
    }
    b[1] = rhs.eps_hat;
    (a, b)
}

/// Objective weight matrix of `½‖Δg‖² + (ν/2)‖ΔG‖²_F` over `[Δg; vech]`.
pub fn objective_weights(dim: usize, nu: f64) -> DMatrix<f64> {
    let cols = dim + vech_len(dim);
    let mut p = DMatrix::zeros(cols, cols);
    for c in 0..dim {
        p[(c, c)] = 1.0;
    }
    for (idx, (j, l)) in vech_pairs(dim).iter().enumerate() {
        p[(dim + idx, dim + idx)] = if j == l { nu } else { 2.0 * nu };
    }
    p
}

/// Solves `min ½ zᵀPz s.t. Az = b` by the dense KKT system; returns the
/// minimizer split back into `(Δg, ΔG)`.
pub fn solve_equality_qp(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    p: &DMatrix<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let m = a.nrows();
    let cols = a.ncols();
    let mut kkt = DMatrix::zeros(cols + m, cols + m);
    kkt.view_mut((0, 0), (cols, cols)).copy_from(p);
    kkt.view_mut((0, cols), (cols, m)).copy_from(&a.transpose());
    kkt.view_mut((cols, 0), (m, cols)).copy_from(a);
    let mut rhs = DVector::zeros(cols + m);
    rhs.rows_mut(cols, m).copy_from(b);
    let sol = kkt.lu().solve(&rhs).expect("QP KKT system solvable");
    let dim = (((8 * cols + 9) as f64).sqrt() as usize - 3) / 2; // cols = dim + dim(dim+1)/2
    let dg = sol.rows(0, dim).into_owned();
    let dh = mat_from_vech(dim, &sol.rows(dim, vech_len(dim)).into_owned());
    (dg, dh)
}

/// Oracle for the simplified problem: generic QP over the two constraints.
pub fn qp_oracle_simplified(state: &ModelState) -> (DVector<f64>, DMatrix<f64>) {
    let (a, b) = simplified_constraint_system(state);
    let p = objective_weights(state.dim(), state.model().nu);
    solve_equality_qp(&a, &b, &p)
}

/// Oracle for the full problem: generic QP over all 2n constraints.
pub fn qp_oracle_full(state: &ModelState) -> (DVector<f64>, DMatrix<f64>) {
    let (a, b) = full_constraint_system(state);
    let p = objective_weights(state.dim(), state.model().nu);
    solve_equality_qp(&a, &b, &p)
}
