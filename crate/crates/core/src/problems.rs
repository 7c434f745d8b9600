//! Benchmark objective registry: smooth classics, derivative-blasting
//! variants, and nonsmooth problems, each with metadata and the three
//! standard initial guesses.
//!
//! Analytic derivatives, where provided, exist for the diagnostics probe and
//! for gradient cross-checks only; the solver itself never reads them.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("unknown problem '{0}' (see problem_names())")]
    UnknownProblem(String),
    #[error("invalid dimension {dim} for {name}: {reason}")]
    InvalidDimension { name: &'static str, dim: usize, reason: &'static str },
    #[error("invalid parameter for {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Nonsmooth,
}

type EvalFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type HessFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// A benchmark objective with metadata.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub dim: usize,
    pub smoothness: Smoothness,
    pub known_xstar: Option<DVector<f64>>,
    /// The minimizer is only claimed in the source material; evaluation does
    /// not confirm the claimed optimal value, so `known_fstar` is absent.
    pub xstar_claimed_only: bool,
    pub known_fstar: Option<f64>,
    /// Iterates are projected onto `[lo, hi]ⁿ` when present.
    pub box_bounds: Option<(f64, f64)>,
    pub params: Vec<(&'static str, f64)>,
    eval: EvalFn,
    grad: Option<GradFn>,
    hess: Option<HessFn>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl Problem {
    /// Wraps a bare closure as a problem with no metadata. Useful for custom
    /// objectives and tests; registry problems carry richer metadata.
    pub fn from_fn(name: &str, dim: usize, eval: EvalFn) -> Self {
        Problem::new(name, dim, Smoothness::Smooth, eval)
    }

    fn new(name: &str, dim: usize, smoothness: Smoothness, eval: EvalFn) -> Self {
        Problem {
            name: name.to_string(),
            dim,
            smoothness,
            known_xstar: None,
            xstar_claimed_only: false,
            known_fstar: None,
            box_bounds: None,
            params: Vec::new(),
            eval,
            grad: None,
            hess: None,
        }
    }

    /// Registers a verified minimizer; the evaluation check is the registry
    /// invariant, so transcription errors fail loudly at construction.
    fn with_xstar(mut self, xstar: DVector<f64>, fstar: f64) -> Self {
        let have = (self.eval)(&xstar);
        assert!(
            (have - fstar).abs() <= 1e-12,
            "{}: eval(x*) = {have}, expected {fstar}",
            self.name
        );
        self.known_xstar = Some(xstar);
        self.known_fstar = Some(fstar);
        self
    }

    /// Registers a minimizer that is claimed but does not evaluate to the
    /// claimed value; no `known_fstar` is stored.
    fn with_claimed_xstar(mut self, xstar: DVector<f64>) -> Self {
        self.known_xstar = Some(xstar);
        self.xstar_claimed_only = true;
        self
    }

    /// Attaches an analytic gradient (used by the probe and cross-checks).
    pub fn with_grad(mut self, grad: GradFn) -> Self {
        self.grad = Some(grad);
        self
    }

    /// Attaches an analytic Hessian (used by the probe).
    pub fn with_hess(mut self, hess: HessFn) -> Self {
        self.hess = Some(hess);
        self
    }

    fn with_box(mut self, lo: f64, hi: f64) -> Self {
        self.box_bounds = Some((lo, hi));
        self
    }

    fn with_params(mut self, params: Vec<(&'static str, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.eval)(x)
    }

    pub fn analytic_grad(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        self.grad.as_ref().map(|g| g(x))
    }

    pub fn analytic_hess(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.hess.as_ref().map(|h| h(x))
    }

    pub fn has_grad(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_hess(&self) -> bool {
        self.hess.is_some()
    }

    /// Projects a point onto the problem's box, if it has one.
    pub fn project(&self, x: &mut DVector<f64>) {
        if let Some((lo, hi)) = self.box_bounds {
            for v in x.iter_mut() {
                *v = v.clamp(lo, hi);
            }
        }
    }
}

/// Initial-guess tags: constant vectors of 1, sin(1), and e.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgTag {
    Ig1,
    Ig2,
    Ig3,
}

impl IgTag {
    pub fn parse(s: &str) -> Option<IgTag> {
        match s.to_ascii_lowercase().as_str() {
            "ig1" => Some(IgTag::Ig1),
            "ig2" => Some(IgTag::Ig2),
            "ig3" => Some(IgTag::Ig3),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IgTag::Ig1 => "IG1",
            IgTag::Ig2 => "IG2",
            IgTag::Ig3 => "IG3",
        }
    }
}

/// The elementwise initial guesses: IG₁ = 1, IG₂ = sin 1, IG₃ = e.
pub fn initial_guess(tag: IgTag, n: usize) -> DVector<f64> {
    let v = match tag {
        IgTag::Ig1 => 1.0,
        IgTag::Ig2 => 1.0f64.sin(),
        IgTag::Ig3 => 1.0f64.exp(),
    };
    DVector::from_element(n, v)
}

// ---------------------------------------------------------------------------
// Smooth problems
// ---------------------------------------------------------------------------

pub fn woods() -> Problem {
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        100.0 * (b - a * a).powi(2)
            + (1.0 - a).powi(2)
            + 90.0 * (d - c * c).powi(2)
            + (1.0 - c).powi(2)
            + 10.1 * ((b - 1.0).powi(2) + (d - 1.0).powi(2))
            + 19.8 * (b - 1.0) * (d - 1.0)
    });
    let grad: GradFn = Arc::new(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        DVector::from_row_slice(&[
            -400.0 * a * (b - a * a) - 2.0 * (1.0 - a),
            200.0 * (b - a * a) + 20.2 * (b - 1.0) + 19.8 * (d - 1.0),
            -360.0 * c * (d - c * c) - 2.0 * (1.0 - c),
            180.0 * (d - c * c) + 20.2 * (d - 1.0) + 19.8 * (b - 1.0),
        ])
    });
    let hess: HessFn = Arc::new(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 0)] = -400.0 * (b - a * a) + 800.0 * a * a + 2.0;
        h[(0, 1)] = -400.0 * a;
        h[(1, 0)] = -400.0 * a;
        h[(1, 1)] = 200.0 + 20.2;
        h[(1, 3)] = 19.8;
        h[(3, 1)] = 19.8;
        h[(2, 2)] = -360.0 * (d - c * c) + 720.0 * c * c + 2.0;
        h[(2, 3)] = -360.0 * c;
        h[(3, 2)] = -360.0 * c;
        h[(3, 3)] = 180.0 + 20.2;
        h
    });
    Problem::new("woods", 4, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_hess(hess)
        .with_xstar(DVector::from_element(4, 1.0), 0.0)
}

pub fn chained_rosenbrock(n: usize) -> Result<Problem, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidDimension {
            name: "rosenbrock",
            dim: n,
            reason: "needs n >= 2",
        });
    }
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        (0..x.len() - 1)
            .map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2))
            .sum()
    });
    let grad: GradFn = Arc::new(|x: &DVector<f64>| {
        let n = x.len();
        let mut g = DVector::zeros(n);
        for i in 0..n - 1 {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g
    });
    let hess: HessFn = Arc::new(|x: &DVector<f64>| {
        let n = x.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            h[(i, i)] += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
            h[(i, i + 1)] += -400.0 * x[i];
            h[(i + 1, i)] += -400.0 * x[i];
            h[(i + 1, i + 1)] += 200.0;
        }
        h
    });
    Ok(Problem::new("rosenbrock", n, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_hess(hess)
        .with_xstar(DVector::from_element(n, 1.0), 0.0))
}

/// Sum of ⌊n/4⌋ four-variable singular blocks (extended Powell).
pub fn extended_powell(n: usize) -> Result<Problem, ProblemError> {
    if n < 4 || n % 4 != 0 {
        return Err(ProblemError::InvalidDimension {
            name: "powell",
            dim: n,
            reason: "needs n >= 4 with n % 4 == 0",
        });
    }
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        (0..x.len() / 4)
            .map(|j| {
                let (a, b, c, d) = (x[4 * j], x[4 * j + 1], x[4 * j + 2], x[4 * j + 3]);
                (a + 10.0 * b).powi(2)
                    + 5.0 * (c - d).powi(2)
                    + (b - 2.0 * c).powi(4)
                    + 10.0 * (a - d).powi(4)
            })
            .sum()
    });
    let grad: GradFn = Arc::new(|x: &DVector<f64>| {
        let mut g = DVector::zeros(x.len());
        for j in 0..x.len() / 4 {
            let (a, b, c, d) = (x[4 * j], x[4 * j + 1], x[4 * j + 2], x[4 * j + 3]);
            g[4 * j] = 2.0 * (a + 10.0 * b) + 40.0 * (a - d).powi(3);
            g[4 * j + 1] = 20.0 * (a + 10.0 * b) + 4.0 * (b - 2.0 * c).powi(3);
            g[4 * j + 2] = 10.0 * (c - d) - 8.0 * (b - 2.0 * c).powi(3);
            g[4 * j + 3] = -10.0 * (c - d) - 40.0 * (a - d).powi(3);
        }
        g
    });
    Ok(Problem::new("powell", n, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_xstar(DVector::zeros(n), 0.0))
}

/// Sparse quartic: `Σ i (x_i² + x_p² + x_q²)²` with `p = (2i mod n)+1`,
/// `q = (3i mod n)+1` (1-based).
pub fn sparse_quartic(n: usize) -> Result<Problem, ProblemError> {
    if n < 2 {
        return Err(ProblemError::InvalidDimension {
            name: "sparse",
            dim: n,
            reason: "needs n >= 2",
        });
    }
    let idx = move |i: usize, k: usize| (k * i) % n; // 0-based: x_{(ki mod n)+1}
    let eval: EvalFn = Arc::new(move |x: &DVector<f64>| {
        (1..=n)
            .map(|i| {
                let s = x[i - 1] * x[i - 1]
                    + x[idx(i, 2)] * x[idx(i, 2)]
                    + x[idx(i, 3)] * x[idx(i, 3)];
                i as f64 * s * s
            })
            .sum()
    });
    let grad: GradFn = Arc::new(move |x: &DVector<f64>| {
        let mut g = DVector::zeros(n);
        for i in 1..=n {
            let occ = [i - 1, idx(i, 2), idx(i, 3)];
            let s: f64 = occ.iter().map(|&j| x[j] * x[j]).sum();
            let coeff = 4.0 * i as f64 * s;
            for &j in &occ {
                g[j] += coeff * x[j];
            }
        }
        g
    });
    Ok(Problem::new("sparse", n, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_xstar(DVector::zeros(n), 0.0))
}

/// DIXMAAN variant A: α = 1, β = 0, γ = δ = 0.125, all index powers zero;
/// needs n = 3m. Minimum value 1 at the origin.
pub fn dixmaan_a(n: usize) -> Result<Problem, ProblemError> {
    if n < 3 || n % 3 != 0 {
        return Err(ProblemError::InvalidDimension {
            name: "dixmaana",
            dim: n,
            reason: "needs n = 3m",
        });
    }
    let m = n / 3;
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 0.125;
    const DELTA: f64 = 0.125;
    let eval: EvalFn = Arc::new(move |x: &DVector<f64>| {
        let mut f = 1.0;
        for i in 0..x.len() {
            f += ALPHA * x[i] * x[i];
        }
        for i in 0..2 * m {
            f += GAMMA * x[i] * x[i] * x[i + m].powi(4);
        }
        for i in 0..m {
            f += DELTA * x[i] * x[i + 2 * m];
        }
        f
    });
    let grad: GradFn = Arc::new(move |x: &DVector<f64>| {
        let n = x.len();
        let mut g = DVector::zeros(n);
        for i in 0..n {
            g[i] += 2.0 * ALPHA * x[i];
        }
        for i in 0..2 * m {
            g[i] += 2.0 * GAMMA * x[i] * x[i + m].powi(4);
            g[i + m] += 4.0 * GAMMA * x[i] * x[i] * x[i + m].powi(3);
        }
        for i in 0..m {
            g[i] += DELTA * x[i + 2 * m];
            g[i + 2 * m] += DELTA * x[i];
        }
        g
    });
    Ok(Problem::new("dixmaana", n, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_xstar(DVector::zeros(n), 1.0))
}

/// `exp(x₁) + sin(x₂)`: the diagnostics probe's reference function, with
/// full analytic derivatives.
pub fn expsin() -> Problem {
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| x[0].exp() + x[1].sin());
    let grad: GradFn =
        Arc::new(|x: &DVector<f64>| DVector::from_row_slice(&[x[0].exp(), x[1].cos()]));
    let hess: HessFn = Arc::new(|x: &DVector<f64>| {
        DMatrix::from_row_slice(2, 2, &[x[0].exp(), 0.0, 0.0, -x[1].sin()])
    });
    Problem::new("expsin", 2, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_hess(hess)
}

/// `½‖x‖²`: inside the model class, so probe errors sit at the float floor.
pub fn quadratic(n: usize) -> Problem {
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| 0.5 * x.norm_squared());
    let grad: GradFn = Arc::new(|x: &DVector<f64>| x.clone());
    let hess: HessFn = Arc::new(|x: &DVector<f64>| DMatrix::identity(x.len(), x.len()));
    Problem::new("quadratic", n, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_hess(hess)
        .with_xstar(DVector::zeros(n), 0.0)
}

// ---------------------------------------------------------------------------
// Derivative-blasting problems
// ---------------------------------------------------------------------------

pub fn blast1() -> Problem {
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        (1000.0 * (b - a * a)).powi(2)
            + 1000.0 * (1.0 - a).powi(2)
            + 90000.0 * (d - c * c).powi(2)
            + 1000.0 * (1.0 - c).powi(2)
            + 10100.0 * ((b - 1.0).powi(2) + 1000.0 * (d - 1.0).powi(2))
            + 19800.0 * (b - 1.0) * (d - 1.0)
            + x.iter().map(|v| v * v).sum::<f64>()
    });
    let grad: GradFn = Arc::new(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let mut g = DVector::zeros(5);
        g[0] = -4.0e6 * a * (b - a * a) - 2000.0 * (1.0 - a) + 2.0 * a;
        g[1] = 2.0e6 * (b - a * a) + 20200.0 * (b - 1.0) + 19800.0 * (d - 1.0) + 2.0 * b;
        g[2] = -360000.0 * c * (d - c * c) - 2000.0 * (1.0 - c) + 2.0 * c;
        g[3] = 180000.0 * (d - c * c)
            + 2.02e7 * (d - 1.0)
            + 19800.0 * (b - 1.0)
            + 2.0 * d;
        g[4] = 2.0 * x[4];
        g
    });
    // Claimed minimizer (1,…,1) evaluates to 5, not 0.
    Problem::new("blast1", 5, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_claimed_xstar(DVector::from_element(5, 1.0))
}

pub fn blast2() -> Problem {
    let inner = chained_rosenbrock(101).expect("101 >= 2");
    let inner_eval = inner.eval.clone();
    let inner_grad = inner.grad.clone().expect("rosenbrock has a gradient");
    let eval: EvalFn = Arc::new(move |x: &DVector<f64>| 1000.0 * inner_eval(x));
    let grad: GradFn = Arc::new(move |x: &DVector<f64>| inner_grad(x) * 1000.0);
    Problem::new("blast2", 101, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_xstar(DVector::from_element(101, 1.0), 0.0)
}

pub fn blast3() -> Problem {
    const PI: f64 = std::f64::consts::PI;
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        1e5 * x.iter().map(|v| (5.0 * PI * v).cos()).sum::<f64>()
            - 1e3 * x.iter().map(|v| v * v).sum::<f64>()
    });
    let grad: GradFn = Arc::new(|x: &DVector<f64>| {
        DVector::from_fn(x.len(), |i, _| {
            -5e5 * PI * (5.0 * PI * x[i]).sin() - 2e3 * x[i]
        })
    });
    // Claimed minimizer (1,…,1) evaluates to −10⁷ − 10⁵, not 0.
    Problem::new("blast3", 100, Smoothness::Smooth, eval)
        .with_grad(grad)
        .with_claimed_xstar(DVector::from_element(100, 1.0))
}

// ---------------------------------------------------------------------------
// Nonsmooth problems
// ---------------------------------------------------------------------------

fn hilbert_residual(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(n, |i, _| {
        (0..n).map(|j| x[j] / (i as f64 + j as f64 + 1.0)).sum()
    })
}

/// `max_i |Σ_j x_j/(i+j−1)|`.
pub fn nonsmooth_p1(n: usize) -> Problem {
    let eval: EvalFn =
        Arc::new(|x: &DVector<f64>| hilbert_residual(x).iter().fold(0.0f64, |m, r| m.max(r.abs())));
    Problem::new("p1", n, Smoothness::Nonsmooth, eval).with_xstar(DVector::zeros(n), 0.0)
}

/// `Σ_i |Σ_j x_j/(i+j−1)|`.
pub fn nonsmooth_p2(n: usize) -> Problem {
    let eval: EvalFn =
        Arc::new(|x: &DVector<f64>| hilbert_residual(x).iter().map(|r| r.abs()).sum());
    Problem::new("p2", n, Smoothness::Nonsmooth, eval).with_xstar(DVector::zeros(n), 0.0)
}

/// Max of two quadratics with minimum 0 at the origin.
pub fn nonsmooth_p3() -> Problem {
    let eval: EvalFn = Arc::new(|x: &DVector<f64>| {
        let (a, b) = (x[0], x[1]);
        let f1 = a * a + (b - 1.0) * (b - 1.0) + b - 1.0;
        let f2 = -a * a - (b - 1.0) * (b - 1.0) + b + 1.0;
        f1.max(f2)
    });
    Problem::new("p3", 2, Smoothness::Nonsmooth, eval).with_xstar(DVector::zeros(2), 0.0)
}

/// Count of entries with `|x_i| > 1e−12` (the exact cardinality penalty).
pub fn card_count(x: &DVector<f64>) -> f64 {
    x.iter().filter(|v| v.abs() > 1e-12).count() as f64
}

/// Sparse regression with cardinality penalty: `‖Ax − b‖₁ + λ‖x‖₀` on
/// `[0,1]ⁿ`, with `A = (1, 1)` and `b = 1`.
pub fn nonsmooth_p4(lambda: f64) -> Problem {
    let eval: EvalFn =
        Arc::new(move |x: &DVector<f64>| (x[0] + x[1] - 1.0).abs() + lambda * card_count(x));
    Problem::new("p4", 2, Smoothness::Nonsmooth, eval)
        .with_box(0.0, 1.0)
        .with_params(vec![("lambda", lambda)])
}

/// Piecewise relaxation of the unit step: `φ(t) = min{1, |t|/µ}`.
pub fn phi_relaxation(t: f64, mu: f64) -> f64 {
    (t.abs() / mu).min(1.0)
}

/// Continuous relaxation of `p4`: `‖Ax − b‖₁ + λ Σ φ(x_i)` on `[0,1]ⁿ`.
pub fn nonsmooth_p4_relaxed(lambda: f64, mu: f64) -> Result<Problem, ProblemError> {
    if mu <= 0.0 {
        return Err(ProblemError::InvalidParameter { name: "p4relaxed", reason: "mu must be > 0" });
    }
    let eval: EvalFn = Arc::new(move |x: &DVector<f64>| {
        (x[0] + x[1] - 1.0).abs()
            + lambda * x.iter().map(|&t| phi_relaxation(t, mu)).sum::<f64>()
    });
    Ok(Problem::new("p4relaxed", 2, Smoothness::Nonsmooth, eval)
        .with_box(0.0, 1.0)
        .with_params(vec![("lambda", lambda), ("mu", mu)]))
}

// ---------------------------------------------------------------------------
// Suites and lookup
// ---------------------------------------------------------------------------

/// The five smooth benchmark problems. `n` is the dimension knob for the
/// scalable families; Woods is always four-dimensional. The extended-Powell
/// stand-in needs `n % 4 == 0` and DIXMAAN needs `n % 3 == 0` (48 satisfies
/// everything).
pub fn make_smooth_suite(n: usize) -> Result<Vec<Problem>, ProblemError> {
    if n < 4 {
        return Err(ProblemError::InvalidDimension {
            name: "smooth-suite",
            dim: n,
            reason: "needs n >= 4",
        });
    }
    Ok(vec![
        woods(),
        chained_rosenbrock(n)?,
        extended_powell(n)?,
        sparse_quartic(n)?,
        dixmaan_a(n)?,
    ])
}

/// The three derivative-blasting problems (fixed dimensions 5, 101, 100).
pub fn make_blasting_suite() -> Vec<Problem> {
    vec![blast1(), blast2(), blast3()]
}

/// The nonsmooth roster: the two Hilbert-form problems at n = 50, the
/// two-quadratic max, and the cardinality problem with its relaxation.
pub fn make_nonsmooth_suite(lambda: f64, mu: f64) -> Result<Vec<Problem>, ProblemError> {
    Ok(vec![
        nonsmooth_p1(50),
        nonsmooth_p2(50),
        nonsmooth_p3(),
        nonsmooth_p4(lambda),
        nonsmooth_p4_relaxed(lambda, mu)?,
    ])
}

pub fn problem_names() -> &'static [&'static str] {
    &[
        "woods", "rosenbrock", "powell", "sparse", "dixmaana", "expsin", "quadratic", "blast1",
        "blast2", "blast3", "p1", "p2", "p3", "p4", "p4relaxed",
    ]
}

/// Looks a problem up by name, with optional dimension override and the
/// `p4`-family parameters.
pub fn by_name(
    name: &str,
    dim: Option<usize>,
    lambda: f64,
    mu: f64,
) -> Result<Problem, ProblemError> {
    match name.to_ascii_lowercase().as_str() {
        "woods" => match dim {
            None | Some(4) => Ok(woods()),
            Some(d) => Err(ProblemError::InvalidDimension {
                name: "woods",
                dim: d,
                reason: "fixed at n = 4",
            }),
        },
        "rosenbrock" => chained_rosenbrock(dim.unwrap_or(50)),
        "powell" => extended_powell(dim.unwrap_or(48)),
        "sparse" => sparse_quartic(dim.unwrap_or(50)),
        "dixmaana" => dixmaan_a(dim.unwrap_or(48)),
        "expsin" => Ok(expsin()),
        "quadratic" => Ok(quadratic(dim.unwrap_or(2))),
        "blast1" => Ok(blast1()),
        "blast2" => Ok(blast2()),
        "blast3" => Ok(blast3()),
        "p1" => Ok(nonsmooth_p1(dim.unwrap_or(50))),
        "p2" => Ok(nonsmooth_p2(dim.unwrap_or(50))),
        "p3" => Ok(nonsmooth_p3()),
        "p4" => Ok(nonsmooth_p4(lambda)),
        "p4relaxed" | "p4-relaxed" => nonsmooth_p4_relaxed(lambda, mu),
        other => Err(ProblemError::UnknownProblem(other.to_string())),
    }
}
