use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::rank::{rank_against, rank_of};
use super::span::{dot, norm};
use super::{Matrix, Tolerance};
use crate::error::{Error, Result};

/// Orthonormal basis for the column space of `b`, completed to an
/// orthonormal basis of R^N.
///
/// The first `rank(b)` columns come from pivoted Gram-Schmidt over the
/// columns of `b` (largest remaining residual first, lowest index on ties);
/// the rest are projected canonical vectors chosen the same way. The result
/// is deterministic and orthogonal, so its inverse is its transpose.
pub fn extend_to_basis(b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let (basis, _) = extend_to_basis_of(b.as_inner(), tol);
    Ok(Matrix::from_computed(basis))
}

/// Returns the completed basis and the rank of `b`. `b` may have zero columns.
pub(crate) fn extend_to_basis_of(b: &DMatrix<f64>, tol: &Tolerance) -> (DMatrix<f64>, usize) {
    let n = b.nrows();
    let r = rank_of(b, tol);
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(n);
    let candidates: Vec<Vec<f64>> = (0..b.ncols())
        .map(|c| b.column(c).iter().copied().collect())
        .collect();
    pick_pivoted(&mut chosen, &candidates, r);
    let canonical: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = alloc::vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    pick_pivoted(&mut chosen, &canonical, n - r);
    let out = DMatrix::from_fn(n, n, |row, col| chosen[col][row]);
    (out, r)
}

fn orthogonal_residual(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let p = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= p * qi;
            }
        }
    }
    w
}

fn pick_pivoted(basis: &mut Vec<Vec<f64>>, candidates: &[Vec<f64>], count: usize) {
    for _ in 0..count {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for c in candidates {
            let w = orthogonal_residual(basis, c);
            let nrm = norm(&w);
            if best.as_ref().is_none_or(|(_, b)| nrm > *b) {
                best = Some((w, nrm));
            }
        }
        let (mut w, nrm) = best.expect("enough candidates for the requested rank");
        debug_assert!(nrm > 0.0);
        for x in w.iter_mut() {
            *x /= nrm;
        }
        basis.push(w);
    }
}

/// Core-nilpotent (Fitting) splitting of a square matrix `M`:
/// `V^{-1} M V = blockdiag(C, N)` with `C` invertible (`core_dim` square)
/// and `N` nilpotent.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreNilpotent {
    pub v: Matrix,
    /// Dimension of the invertible core, `rank(M^R)`.
    pub core_dim: usize,
    /// `rank(M)`.
    pub rank: usize,
    /// Smallest `k` with `rank(M^k) = rank(M^{k+1})`.
    pub index: usize,
    /// Set when `rank(M) != core_dim`, i.e. the zero eigenvalue is not
    /// semisimple and the nilpotent block is nonzero.
    pub rank_mismatch: bool,
}

impl CoreNilpotent {
    /// `V^{-1} M V`.
    pub fn transformed(&self, m: &Matrix) -> DMatrix<f64> {
        let v = self.v.as_inner();
        let v_inv = v.clone().try_inverse().expect("V is invertible");
        v_inv * m.as_inner() * v
    }
}

pub fn core_nilpotent(m: &Matrix, tol: &Tolerance) -> Result<CoreNilpotent> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(core_nilpotent_of(m.as_inner(), 0.0, tol))
}

/// `scale` is the magnitude rank decisions are made against when it exceeds
/// `|m|`, for blocks cut out of a larger matrix that may be rounding noise.
pub(crate) fn core_nilpotent_of(m: &DMatrix<f64>, scale: f64, tol: &Tolerance) -> CoreNilpotent {
    let n = m.nrows();
    let rank = rank_against(m, scale, tol);
    let nrm = m.norm().max(scale);
    let step = if tol.exact || nrm == 0.0 { m.clone() } else { m / nrm };
    // Powers of the normalised matrix are ranked against its unit scale.
    let reference = if tol.exact || nrm == 0.0 { 0.0 } else { 1.0 };

    let mut power = step.clone();
    let mut current = rank;
    let mut index = 1;
    while current > 0 && index < n.max(1) {
        let next = &power * &step;
        let next_rank = rank_against(&next, reference, tol);
        if next_rank == current {
            break;
        }
        power = next;
        current = next_rank;
        index += 1;
    }
    if rank == 0 {
        index = 1;
    }
    let core_dim = current;

    let v = if core_dim == n || core_dim == 0 || n == 0 {
        DMatrix::identity(n, n)
    } else {
        let svd = super::svd_of(&power);
        let u = svd.u.expect("requested u");
        let v_t = svd.v_t.expect("requested v_t");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        DMatrix::from_fn(n, n, |row, col| {
            if col < core_dim {
                u[(row, order[col])]
            } else {
                v_t[(order[col], row)]
            }
        })
    };

    CoreNilpotent {
        v: Matrix::from_computed(v),
        core_dim,
        rank,
        index,
        rank_mismatch: rank != core_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rank;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_extends_to_itself() {
        let u = extend_to_basis(&Matrix::identity(3), &Tolerance::default()).unwrap();
        assert_eq!(u, Matrix::identity(3));
    }

    #[test]
    fn single_canonical_vector() {
        let b = Matrix::from_rows(&[[1.0], [0.0], [0.0]]).unwrap();
        let u = extend_to_basis(&b, &Tolerance::default()).unwrap();
        assert_eq!(u.column(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        assert_eq!(rank(&u, &Tolerance::default()), 3);
    }

    #[test]
    fn leading_columns_span_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let tol = Tolerance::default();
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let r = rng.gen_range(0..=n);
            let c = rng.gen_range(1..=7);
            let f = DMatrix::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
            let g = DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0));
            let b = &f * &g;
            let r = r.min(c);
            let (u, got_r) = extend_to_basis_of(&b, &tol);
            assert_eq!(got_r, r);
            assert_eq!(rank_of(&u, &tol), n);
            let lead = u.columns(0, r).into_owned();
            let cols: Vec<_> = b.column_iter().chain(lead.column_iter()).collect();
            let joined = DMatrix::from_columns(&cols);
            assert_eq!(rank_of(&joined, &tol), r);
            // Orthonormal columns.
            let gram = u.transpose() * &u;
            assert!((gram - DMatrix::<f64>::identity(n, n)).norm() < 1e-10);
        }
    }

    #[test]
    fn invertible_matrix_is_all_core() {
        let m = Matrix::from_rows(&[[2.0, 1.0], [0.0, 3.0]]).unwrap();
        let cn = core_nilpotent(&m, &Tolerance::default()).unwrap();
        assert_eq!(cn.core_dim, 2);
        assert_eq!(cn.v, Matrix::identity(2));
        assert!(!cn.rank_mismatch);
    }

    #[test]
    fn zero_matrix_has_no_core() {
        let cn = core_nilpotent(&Matrix::zeros(3, 3), &Tolerance::default()).unwrap();
        assert_eq!(cn.core_dim, 0);
        assert_eq!(cn.rank, 0);
    }

    #[test]
    fn diagonal_example_block() {
        let m = Matrix::from_rows(&[[0.2, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let cn = core_nilpotent(&m, &Tolerance::default()).unwrap();
        assert_eq!(cn.core_dim, 1);
        assert!(!cn.rank_mismatch);
        let t = cn.transformed(&m);
        assert!((t[(0, 0)] - 0.2).abs() < 1e-12);
        assert!(t.view((1, 1), (2, 2)).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_jordan_block_flags_mismatch() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let cn = core_nilpotent(&m, &Tolerance::default()).unwrap();
        assert_eq!(cn.core_dim, 1);
        assert_eq!(cn.rank, 2);
        assert_eq!(cn.index, 2);
        assert!(cn.rank_mismatch);
    }

    fn check_fitting(m: &DMatrix<f64>, tol: &Tolerance) {
        let cn = core_nilpotent_of(m, 0.0, tol);
        let n = m.nrows();
        let r = cn.core_dim;
        let mm = Matrix::new(m.clone()).unwrap();
        let t = cn.transformed(&mm);
        let scale = m.norm().max(1.0);
        assert!(t.view((0, r), (r, n - r)).norm() <= tol.residual_abs * scale);
        assert!(t.view((r, 0), (n - r, r)).norm() <= tol.residual_abs * scale);
        let core = t.view((0, 0), (r, r)).into_owned();
        assert_eq!(rank_of(&core, tol), r);
        let mut nil = t.view((r, r), (n - r, n - r)).into_owned();
        let base = nil.clone();
        for _ in 1..n.max(1) {
            nil = &nil * &base;
        }
        assert!(nil.norm() <= tol.residual_abs * scale.powi(n as i32));
    }

    #[test]
    fn fitting_blocks_on_random_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let tol = Tolerance::default();
        for _ in 0..50 {
            let r = rng.gen_range(0..=3);
            let z = rng.gen_range(0..=3);
            let n = r + z;
            if n == 0 {
                continue;
            }
            // blockdiag(invertible, strictly upper triangular) under a random similarity.
            let mut b = DMatrix::<f64>::zeros(n, n);
            for i in 0..r {
                for j in 0..r {
                    b[(i, j)] = rng.gen_range(-1.0..1.0);
                }
                b[(i, i)] += 3.0;
            }
            for i in r..n {
                for j in i + 1..n {
                    b[(i, j)] = rng.gen_range(-1.0..1.0);
                }
            }
            let s = DMatrix::from_fn(n, n, |i, j| {
                let diag = if i == j { 2.0 } else { 0.0 };
                diag + rng.gen_range(-0.5..0.5)
            });
            let m = &s * b * s.clone().try_inverse().unwrap();
            let cn = core_nilpotent_of(&m, 0.0, &tol);
            assert_eq!(cn.core_dim, r);
            check_fitting(&m, &tol);
        }
    }
}
