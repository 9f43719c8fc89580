use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::rank::rank_of;
use super::{Matrix, Tolerance};
use crate::error::{Error, Result};

/// `[D^{K-1} H, D^{K-2} H, ..., H]`: block `j` (1-based) is `D^{K-j} H`.
pub fn controllability_matrix(d: &Matrix, h: &Matrix, k: usize) -> Result<Matrix> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    if h.nrows() != d.nrows() {
        return Err(Error::DimensionMismatch {
            what: "rows of H",
            expected: d.nrows(),
            found: h.nrows(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("K must be positive"));
    }
    Ok(Matrix::from_computed(krylov_blocks(d, h, k)))
}

/// Same as [`controllability_matrix`] without validation; `h` may have zero columns.
pub(crate) fn krylov_blocks(d: &DMatrix<f64>, h: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (n, l) = (d.nrows(), h.ncols());
    let mut out = DMatrix::zeros(n, k * l);
    let mut block = h.clone();
    // Fill from the last block (H) backwards.
    for j in (0..k).rev() {
        out.view_mut((0, j * l), (n, l)).copy_from(&block);
        if j > 0 {
            block = d * &block;
        }
    }
    out
}

/// `D^0 H, D^1 H, ..., D^{K-1} H` as separate matrices.
pub(crate) fn power_blocks(d: &DMatrix<f64>, h: &DMatrix<f64>, k: usize) -> Vec<DMatrix<f64>> {
    let mut blocks = Vec::with_capacity(k);
    let mut block = h.clone();
    for i in 0..k {
        if i > 0 {
            block = d * &block;
        }
        blocks.push(block.clone());
    }
    blocks
}

/// Degree of the minimal polynomial: the smallest `q` such that `vec(D^q)`
/// lies in the span of `vec(I), ..., vec(D^{q-1})`.
///
/// In floating point the powers are taken of `D / |D|_F` so they stay
/// bounded; this does not change any span.
pub fn min_poly_degree(d: &Matrix, tol: &Tolerance) -> Result<usize> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    Ok(min_poly_degree_of(d.as_inner(), tol))
}

pub(crate) fn min_poly_degree_of(d: &DMatrix<f64>, tol: &Tolerance) -> usize {
    let n = d.nrows();
    let nrm = d.norm();
    if nrm == 0.0 {
        return 1;
    }
    let step = if tol.exact { d.clone() } else { d / nrm };
    let mut stacked = DMatrix::<f64>::zeros(n * n, n + 1);
    let mut power = DMatrix::<f64>::identity(n, n);
    stacked.column_mut(0).copy_from_slice(power.as_slice());
    for q in 1..=n {
        power = &power * &step;
        stacked.column_mut(q).copy_from_slice(power.as_slice());
        let cols = stacked.columns(0, q + 1).into_owned();
        if rank_of(&cols, tol) <= q {
            return q;
        }
    }
    n
}
