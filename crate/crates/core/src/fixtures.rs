//! Small reference systems with known controllability properties.

use crate::matcore::Matrix;
use crate::system::SystemModel;

fn m<const C: usize>(rows: &[[f64; C]]) -> Matrix {
    Matrix::from_rows(rows).expect("fixture matrix")
}

/// Controllable, but `rank(D) = 1` with `N = 3`, so single-entry inputs
/// cannot steer it: not 1-sparse-controllable, 2-sparse-controllable.
pub fn rank_deficient_transfer() -> SystemModel {
    SystemModel::state_only(
        m(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        m(&[[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
    )
    .unwrap()
}

/// 2-sparse-controllable, yet no fixed pair of inputs controls it.
pub fn no_common_support() -> SystemModel {
    SystemModel::state_only(
        m(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]]),
        m(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
    )
    .unwrap()
}

/// Nilpotent shift `D` (not invertible) that is nevertheless 1-sparse-controllable.
pub fn nilpotent_shift() -> SystemModel {
    SystemModel::state_only(
        m(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]),
        m(&[[1.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
    )
    .unwrap()
}

/// Five states, one input, three outputs: meets the output PBH-type
/// necessary condition but fails the output Kalman test.
pub fn output_pbh_gap() -> SystemModel {
    SystemModel::new(
        m(&[
            [1.0, 2.0, 4.0, 5.0, 9.0],
            [7.0, 2.0, 3.0, 1.0, 7.0],
            [0.0, 0.0, 1.0, 2.0, 5.0],
            [0.0, 0.0, 3.0, 4.0, 7.0],
            [0.0, 0.0, 1.0, 6.0, 9.0],
        ]),
        m(&[[1.0], [2.0], [0.0], [0.0], [0.0]]),
        Some(m(&[
            [0.0, 0.019, -0.14, 0.02, 0.99],
            [0.0, -0.08, 0.24, 0.97, 0.018],
            [1.0, 0.0, 0.0, 0.0, 0.0],
        ])),
    )
    .unwrap()
}

/// [`rank_deficient_transfer`] observed through its first two states:
/// output 1-sparse-controllable although not 1-sparse-controllable.
pub fn output_sparse_only() -> SystemModel {
    rank_deficient_transfer()
        .with_output(Some(m(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])))
        .unwrap()
}

/// Four states, three inputs, a 3-dimensional controllable subspace whose
/// restricted dynamics are `diag(0.2, 0, 0)` in a suitable basis.
pub fn standard_form_demo() -> SystemModel {
    SystemModel::state_only(
        m(&[
            [5.65, 0.0, -1.25, -7.95],
            [3.3, 0.0, -0.9, -4.7],
            [-0.55, 0.0, 0.35, 0.85],
            [3.4, 0.0, -0.8, -4.8],
        ]),
        m(&[
            [0.25, 1.25, 1.5],
            [0.25, 1.25, 1.5],
            [-0.5, -0.75, -1.25],
            [0.25, 1.0, 1.25],
        ]),
    )
    .unwrap()
}
