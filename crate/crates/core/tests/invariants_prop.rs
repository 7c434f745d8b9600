//! Property-based invariants over randomly generated window geometry.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qmnewt::model_full::phi_objective;
use qmnewt::model_simplified::update_nu;
use qmnewt::state::{ModelState, Point, QuadraticModel};

fn window_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    // 2..=5 points of dimension 3, coordinates in a tame range
    proptest::collection::vec(
        proptest::collection::vec(-10.0f64..10.0, 3),
        2..=5,
    )
}

fn state_from(points: Vec<Vec<f64>>) -> ModelState {
    let pts: Vec<Point> = points.iter().map(|p| Point::from_slice(p).unwrap()).collect();
    let fvals = vec![0.0; pts.len()];
    let anchor = DVector::from_row_slice(points.last().unwrap());
    let model = QuadraticModel::identity(DVector::zeros(3), anchor);
    ModelState::new(pts, fvals, model.clone(), model, 0).unwrap()
}

proptest! {
    #[test]
    fn sigma_tau_telescope(points in window_strategy()) {
        let st = state_from(points);
        for j in 1..=st.step_count() {
            let sigma = st.sigma(j).unwrap();
            let diff = st.tau_gap(j - 1).unwrap() - st.tau_gap(j).unwrap();
            prop_assert!((sigma - diff).norm() <= 1e-12);
        }
    }

    #[test]
    fn push_point_keeps_window_shape(points in window_strategy(), new in proptest::collection::vec(-10.0f64..10.0, 3)) {
        let mut st = state_from(points);
        let len = st.window().len();
        st.push_point(Point::from_slice(&new).unwrap(), 1.25).unwrap();
        prop_assert_eq!(st.window().len(), len);
        prop_assert_eq!(st.fvals().len(), len);
        prop_assert_eq!(st.window()[len - 1].coords(), &DVector::from_row_slice(&new));
        prop_assert_eq!(st.fvals()[len - 1], 1.25);
    }

    #[test]
    fn nu_update_is_positive_and_within_band(
        nu in 1e-6f64..1e6,
        g in proptest::collection::vec(-5.0f64..5.0, 2),
        h in proptest::collection::vec(-5.0f64..5.0, 4),
    ) {
        let dg = DVector::from_row_slice(&g);
        let dh = DMatrix::from_row_slice(2, 2, &h);
        let next = update_nu(nu, &dg, &dh);
        prop_assert!(next > 0.0);
        let ratio = next / nu;
        prop_assert!(
            (0.9 - 1e-12..=1.1 + 1e-12).contains(&ratio) || next == 1e-6 || next == 1e6
        );
    }

    #[test]
    fn phi_is_nonnegative_and_quadratic_in_scaling(
        g in proptest::collection::vec(-5.0f64..5.0, 3),
        h in proptest::collection::vec(-5.0f64..5.0, 9),
        nu in 0.1f64..10.0,
        t in -3.0f64..3.0,
    ) {
        let dg = DVector::from_row_slice(&g);
        let dh = DMatrix::from_row_slice(3, 3, &h);
        let base = phi_objective(&dg, &dh, nu);
        prop_assert!(base >= 0.0);
        let scaled = phi_objective(&(&dg * t), &(&dh * t), nu);
        prop_assert!((scaled - t * t * base).abs() <= 1e-9 * base.max(1.0));
    }
}
