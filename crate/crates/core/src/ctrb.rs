//! Algebraic controllability tests: PBH and Kalman, the sparse PBH test,
//! the common-support test and the output variants.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix};

use crate::combinations::Combinations;
use crate::error::Result;
use crate::matcore::{
    clusters_of, geometric_multiplicity_of, krylov_blocks, pencil, rank_against, rank_complex_against, rank_of,
    select_columns, smallest_right_singular_vector, spectral_radius, Complex64, EigenCluster,
    Tolerance,
};
use crate::system::SystemModel;

/// Outcome of a PBH-type test.
///
/// For the sparse test `verdict = rank_condition_holds && inequality_holds`
/// and `slack = s + rank(D) - N`. When the rank condition fails the witness
/// `(lambda, z)` satisfies `z^T [lambda I - D, H] ~ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllabilityReport {
    pub verdict: bool,
    pub rank_condition_holds: bool,
    pub inequality_holds: bool,
    pub witness_lambda: Option<Complex64>,
    pub witness_z: Option<Vec<Complex64>>,
    /// `|z^T [lambda I - D, H]|` for the reported witness.
    pub witness_residual: Option<f64>,
    pub rank_d: usize,
    pub sparsity: Option<usize>,
    pub slack: Option<i64>,
    pub tolerance_used: Tolerance,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PbhWitness {
    pub lambda: Complex64,
    pub z: Vec<Complex64>,
    pub residual: f64,
}

/// Reference magnitude for rank decisions on `(D, H)` and on anything built
/// from a column subset of `H`: a subset that is pure rounding noise must not
/// be ranked against its own size.
pub(crate) fn scale_of(d: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    d.norm().max(h.norm())
}

/// First eigenvalue (in cluster order) at which `[lambda I - D, H]` loses rank.
pub(crate) fn pbh_scan(
    d: &DMatrix<f64>,
    h: &DMatrix<f64>,
    clusters: &[EigenCluster],
    scale: f64,
    tol: &Tolerance,
) -> Option<PbhWitness> {
    let n = d.nrows();
    for cluster in clusters {
        for lambda in cluster.probe_points() {
            let p = pencil(d, h, lambda);
            if rank_complex_against(&p, scale.max(lambda.modulus()), tol) < n {
                let z = smallest_right_singular_vector(&p.transpose());
                let zv = nalgebra::DVector::from_vec(z.clone());
                let residual = (p.transpose() * zv).norm();
                return Some(PbhWitness {
                    lambda,
                    z,
                    residual,
                });
            }
        }
    }
    None
}

/// Controllability of `(d, h)`: eigenvalue scan in floating point, Kalman
/// rank in rational mode. `scale` is usually [`scale_of`] the full system.
pub(crate) fn is_controllable(
    d: &DMatrix<f64>,
    h: &DMatrix<f64>,
    clusters: &[EigenCluster],
    scale: f64,
    tol: &Tolerance,
) -> bool {
    if h.ncols() == 0 {
        return false;
    }
    if tol.exact {
        rank_of(&krylov_blocks(d, h, d.nrows()), tol) == d.nrows()
    } else {
        pbh_scan(d, h, clusters, scale, tol).is_none()
    }
}

fn pbh_report(sys: &SystemModel, tol: &Tolerance, clusters: &[EigenCluster]) -> ControllabilityReport {
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let scale = scale_of(d, h);
    let holds = is_controllable(d, h, clusters, scale, tol);
    let witness = if holds { None } else { pbh_scan(d, h, clusters, scale, tol) };
    ControllabilityReport {
        verdict: holds,
        rank_condition_holds: holds,
        inequality_holds: true,
        witness_lambda: witness.as_ref().map(|w| w.lambda),
        witness_residual: witness.as_ref().map(|w| w.residual),
        witness_z: witness.map(|w| w.z),
        rank_d: rank_of(d, tol),
        sparsity: None,
        slack: None,
        tolerance_used: *tol,
    }
}

/// Classical PBH test: `rank [lambda I - D, H] = N` at every eigenvalue of `D`.
pub fn pbh_test(sys: &SystemModel, tol: &Tolerance) -> ControllabilityReport {
    pbh_report(sys, tol, &clusters_of(sys.d().as_inner(), tol))
}

/// Kalman rank test: `rank [D^{N-1} H ... H] = N`.
pub fn kalman_test(sys: &SystemModel, tol: &Tolerance) -> bool {
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    rank_of(&krylov_blocks(d, h, sys.n()), tol) == sys.n()
}

/// s-sparse-controllability: the PBH rank condition together with
/// `N <= s + rank(D)`.
pub fn sparse_pbh_test(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<ControllabilityReport> {
    sys.check_sparsity(s)?;
    let mut report = pbh_test(sys, tol);
    let slack = s as i64 + report.rank_d as i64 - sys.n() as i64;
    report.inequality_holds = slack >= 0;
    report.verdict = report.rank_condition_holds && report.inequality_holds;
    report.sparsity = Some(s);
    report.slack = Some(slack);
    Ok(report)
}

/// Necessary screen for common-support control:
/// `min(rank(H), s) >= g_D >= N - rank(D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommonSupportScreen {
    pub rank_h: usize,
    pub sparsity: usize,
    pub max_geometric_multiplicity: usize,
    pub nullity_d: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommonSupportReport {
    pub verdict: bool,
    /// Lexicographically first support `S`, `|S| = s`, with `(D, H_S)` controllable.
    pub witness_support: Option<Vec<usize>>,
    pub screen: CommonSupportScreen,
    pub supports_checked: usize,
}

/// Controllability with inputs that share one fixed support of size `s`.
pub fn common_support_test(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<CommonSupportReport> {
    sys.check_sparsity(s)?;
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let clusters = clusters_of(d, tol);
    let rank_h = rank_of(h, tol);
    let nullity_d = sys.n() - rank_of(d, tol);
    let g = geometric_multiplicity_of(d, &clusters, tol);
    let screen = CommonSupportScreen {
        rank_h,
        sparsity: s,
        max_geometric_multiplicity: g,
        nullity_d,
        passed: rank_h.min(s) >= g && g >= nullity_d,
    };
    let mut report = CommonSupportReport {
        verdict: false,
        witness_support: None,
        screen,
        supports_checked: 0,
    };
    if !screen.passed {
        return Ok(report);
    }
    for support in Combinations::new(sys.l(), s) {
        report.supports_checked += 1;
        if is_controllable(d, &select_columns(h, &support), &clusters, scale_of(d, h), tol) {
            report.verdict = true;
            report.witness_support = Some(support);
            break;
        }
    }
    Ok(report)
}

/// Output Kalman test: `rank(A [D^{N-1} H ... H]) = m`.
pub fn output_kalman_test(sys: &SystemModel, tol: &Tolerance) -> Result<bool> {
    let a = sys.output_matrix()?;
    let c = krylov_blocks(sys.d().as_inner(), sys.h().as_inner(), sys.n());
    let reference = a.norm() * c.norm();
    Ok(rank_against(&(a.as_inner() * c), reference, tol) == a.nrows())
}

/// Output PBH-type necessary condition: `rank(A [lambda I - D, H]) = m` at
/// every eigenvalue of `D` and at the off-spectrum probe `1 + rho(D)`.
pub fn output_pbh_necessary(sys: &SystemModel, tol: &Tolerance) -> Result<bool> {
    let a = sys.output_matrix()?;
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let clusters = clusters_of(d, tol);
    let probe = Complex64::new(1.0 + spectral_radius(&clusters), 0.0);
    let ac = crate::matcore::to_complex(a.as_inner());
    let m = a.nrows();
    let points = clusters
        .iter()
        .flat_map(|c| c.probe_points())
        .chain(core::iter::once(probe));
    for lambda in points {
        let p = pencil(d, h, lambda);
        let reference = a.norm() * scale_of(d, h).max(lambda.modulus());
        if rank_complex_against(&(&ac * p), reference, tol) < m {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Details behind [`output_sparse_necessary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputSparseReport {
    pub m: usize,
    pub rank_ad: usize,
    pub sparsity: usize,
    pub inequality_holds: bool,
    pub rank_condition_holds: bool,
}

impl OutputSparseReport {
    /// Both necessary conditions hold. This does not prove output
    /// s-sparse-controllability; `false` disproves it.
    pub fn not_disproved(&self) -> bool {
        self.inequality_holds && self.rank_condition_holds
    }
}

pub fn output_sparse_analysis(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<OutputSparseReport> {
    let a = sys.output_matrix()?;
    sys.check_sparsity(s)?;
    let m = a.nrows();
    let d = sys.d().as_inner();
    let rank_ad = rank_against(&(a.as_inner() * d), a.norm() * d.norm(), tol);
    Ok(OutputSparseReport {
        m,
        rank_ad,
        sparsity: s,
        inequality_holds: s + rank_ad >= m,
        rank_condition_holds: output_pbh_necessary(sys, tol)?,
    })
}

/// Necessary conditions for output s-sparse-controllability:
/// `s >= m - rank(AD)` and the output PBH-type condition. `false` means
/// definitely not output s-sparse-controllable; `true` is inconclusive.
pub fn output_sparse_necessary(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<bool> {
    Ok(output_sparse_analysis(sys, s, tol)?.not_disproved())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fixtures;
    use crate::matcore::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tols() -> [Tolerance; 2] {
        [Tolerance::default(), Tolerance::default().with_exact(true)]
    }

    fn random_system(rng: &mut ChaCha8Rng, n: usize, l: usize, ints: bool) -> SystemModel {
        let mut draw = |r: usize, c: usize| {
            Matrix::new(DMatrix::from_fn(r, c, |_, _| {
                if ints {
                    rng.gen_range(-1..=1) as f64
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            }))
            .unwrap()
        };
        let d = draw(n, n);
        let h = draw(n, l);
        SystemModel::state_only(d, h).unwrap()
    }

    #[test]
    fn fixture_verdicts() {
        for tol in tols() {
            let ex1 = fixtures::rank_deficient_transfer();
            assert!(pbh_test(&ex1, &tol).verdict);
            let r = sparse_pbh_test(&ex1, 1, &tol).unwrap();
            assert!(!r.verdict && r.rank_condition_holds && !r.inequality_holds);
            assert_eq!(r.slack, Some(-1));
            assert!(sparse_pbh_test(&ex1, 2, &tol).unwrap().verdict);

            let ex2 = fixtures::no_common_support();
            assert!(sparse_pbh_test(&ex2, 2, &tol).unwrap().verdict);
            let cs = common_support_test(&ex2, 2, &tol).unwrap();
            assert!(!cs.verdict);
            assert!(cs.witness_support.is_none());

            let ex3 = fixtures::nilpotent_shift();
            assert!(sparse_pbh_test(&ex3, 1, &tol).unwrap().verdict);
            let cs = common_support_test(&ex3, 1, &tol).unwrap();
            assert!(cs.verdict);
            assert_eq!(cs.witness_support, Some(vec![0]));
        }
    }

    #[test]
    fn zero_input_matrix_fails_with_left_eigenvector_witness() {
        let tol = Tolerance::default();
        let d = Matrix::from_rows(&[[2.0, 1.0], [0.5, -1.0]]).unwrap();
        let sys = SystemModel::state_only(d.clone(), Matrix::zeros(2, 1)).unwrap();
        let r = pbh_test(&sys, &tol);
        assert!(!r.verdict);
        let z = r.witness_z.unwrap();
        assert!(z.iter().any(|c| c.norm() > 0.1));
        // z^T (lambda I - D) = 0
        let lambda = r.witness_lambda.unwrap();
        for col in 0..2 {
            let v: Complex64 = (0..2)
                .map(|row| {
                    let e = if row == col { lambda } else { Complex64::new(0.0, 0.0) };
                    z[row] * (e - d[(row, col)])
                })
                .sum();
            assert!(v.norm() <= tol.residual_abs * (d.norm() + 1.0));
        }
    }

    #[test]
    fn hidden_uncontrollable_mode_detected() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            // Diagonal D with distinct eigenvalues and an H with a zero row,
            // then a random change of state basis.
            let n = 3;
            let eig = [0.5, -1.5, 2.0];
            let mut h = DMatrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0));
            let dead = rng.gen_range(0..n);
            h.row_mut(dead).fill(0.0);
            let t = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.0 } + rng.gen_range(-0.5..0.5));
            let t_inv = t.clone().try_inverse().unwrap();
            let d = &t * DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&eig)) * &t_inv;
            let sys = SystemModel::state_only(Matrix::new(d).unwrap(), Matrix::new(&t * h).unwrap()).unwrap();
            let r = pbh_test(&sys, &tol);
            assert!(!r.verdict);
            assert!((r.witness_lambda.unwrap().re - eig[dead]).abs() < 1e-8);
            assert!(r.witness_residual.unwrap() <= tol.residual_abs * (sys.d().norm() + sys.h().norm()));
            assert!(!kalman_test(&sys, &tol));
        }
    }

    #[test]
    fn invertible_transfer_controllable_any_sparsity() {
        let tol = Tolerance::default();
        let d = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap();
        let h = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let sys = SystemModel::state_only(d, h).unwrap();
        assert!(sparse_pbh_test(&sys, 1, &tol).unwrap().verdict);
        assert!(kalman_test(
            &SystemModel::state_only(Matrix::zeros(2, 2), Matrix::identity(2)).unwrap(),
            &tol
        ));
    }

    #[test]
    fn sparsity_out_of_range() {
        let sys = fixtures::nilpotent_shift();
        let tol = Tolerance::default();
        assert!(matches!(sparse_pbh_test(&sys, 0, &tol), Err(Error::SparsityOutOfRange { .. })));
        assert!(matches!(sparse_pbh_test(&sys, 3, &tol), Err(Error::SparsityOutOfRange { .. })));
        assert!(common_support_test(&sys, 3, &tol).is_err());
    }

    #[test]
    fn kalman_matches_pbh_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tol = Tolerance::default();
        for i in 0..200 {
            let n = rng.gen_range(1..=5);
            let l = rng.gen_range(1..=3);
            let sys = random_system(&mut rng, n, l, i % 2 == 0);
            assert_eq!(kalman_test(&sys, &tol), pbh_test(&sys, &tol).verdict, "{sys:?}");
        }
    }

    #[test]
    fn sparse_test_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tol = Tolerance::default();
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let l = rng.gen_range(1..=4);
            let sys = random_system(&mut rng, n, l, true);
            let verdicts: Vec<bool> = (1..=l)
                .map(|s| sparse_pbh_test(&sys, s, &tol).unwrap().verdict)
                .collect();
            // Full sparsity recovers the unconstrained test.
            assert_eq!(verdicts[l - 1], pbh_test(&sys, &tol).verdict);
            for w in verdicts.windows(2) {
                assert!(!w[0] || w[1], "monotone in s");
            }
            if l == 1 {
                assert_eq!(verdicts[0], pbh_test(&sys, &tol).verdict);
            }
            for s in 1..=l {
                let cs = common_support_test(&sys, s, &tol).unwrap();
                if cs.verdict {
                    assert!(verdicts[s - 1]);
                }
            }
            let cs_full = common_support_test(&sys, l, &tol).unwrap();
            assert_eq!(cs_full.verdict, pbh_test(&sys, &tol).verdict);
        }
    }

    #[test]
    fn output_fixtures() {
        let tol = Tolerance::default();
        let gap = fixtures::output_pbh_gap();
        assert!(!output_kalman_test(&gap, &tol).unwrap());
        assert!(output_pbh_necessary(&gap, &tol).unwrap());

        let only = fixtures::output_sparse_only();
        assert!(output_sparse_necessary(&only, 1, &tol).unwrap());
        assert!(!sparse_pbh_test(&only, 1, &tol).unwrap().verdict);
    }

    #[test]
    fn output_degenerate_cases() {
        let tol = Tolerance::default();
        let base = fixtures::nilpotent_shift();
        assert_eq!(output_kalman_test(&base, &tol), Err(Error::MissingOutputMatrix));
        assert!(output_pbh_necessary(&base, &tol).is_err());

        // rank(A) < m
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        let sys = base.clone().with_output(Some(a)).unwrap();
        assert!(!output_pbh_necessary(&sys, &tol).unwrap());

        // A D = 0 with m = 2, s = 1
        let d = Matrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let sys = SystemModel::new(d, Matrix::identity(3), Some(a)).unwrap();
        assert!(!output_sparse_necessary(&sys, 1, &tol).unwrap());
    }

    #[test]
    fn identity_output_matches_state_tests() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tol = Tolerance::default();
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let l = rng.gen_range(1..=3);
            let sys = random_system(&mut rng, n, l, true)
                .with_output(Some(Matrix::identity(n)))
                .unwrap();
            let state = pbh_test(&sys, &tol).verdict;
            assert_eq!(output_kalman_test(&sys, &tol).unwrap(), kalman_test(&sys, &tol));
            assert_eq!(output_pbh_necessary(&sys, &tol).unwrap(), state);
        }
    }

    #[test]
    fn output_kalman_stabilises_by_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let tol = Tolerance::default();
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let l = rng.gen_range(1..=2);
            let m = rng.gen_range(1..n);
            let sys = random_system(&mut rng, n, l, true);
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1..=1) as f64);
            let c_n = krylov_blocks(sys.d(), sys.h(), n);
            let c_2n = krylov_blocks(sys.d(), sys.h(), 2 * n);
            assert_eq!(rank_of(&(&a * c_n), &tol) == m, rank_of(&(&a * c_2n), &tol) == m);
        }
    }

    #[test]
    fn a_row_subset_of_controllable_system() {
        let tol = Tolerance::default();
        let sys = fixtures::nilpotent_shift()
            .with_output(Some(Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()))
            .unwrap();
        assert!(output_kalman_test(&sys, &tol).unwrap());
    }
}
