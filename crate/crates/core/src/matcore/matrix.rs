use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Complex64 = nalgebra::Complex<f64>;

/// Dense complex matrix used for eigen-space computations.
pub type ComplexMatrix = DMatrix<Complex64>;

/// A dense real matrix with at least one row and one column and only finite
/// entries.
///
/// The wrapper only guards construction; read access goes through
/// [`Deref`] to the underlying [`DMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        for c in 0..inner.ncols() {
            for r in 0..inner.nrows() {
                if !inner[(r, c)].is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Matrix(inner))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Matrix::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from a slice of rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::Ragged {
                    row: i,
                    expected: ncols,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Matrix::from_row_major(nrows, ncols, &entries)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of size zero");
        Matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty zero matrix");
        Matrix(DMatrix::zeros(rows, cols))
    }

    /// Wraps results of internal computations. Inputs were validated, so
    /// the entries can only go non-finite through overflow.
    pub(crate) fn from_computed(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Matrix(inner)
    }

    pub fn as_inner(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.0.nrows())
            .map(|r| self.0.row(r).iter().copied().collect())
            .collect()
    }

    /// Columns listed in `indices`, in that order. The result may have zero columns.
    pub fn select_columns(&self, indices: &[usize]) -> DMatrix<f64> {
        select_columns(&self.0, indices)
    }

    /// True when every entry is an integer, i.e. the matrix is eligible for
    /// tolerance-free rational arithmetic without rounding surprises.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| num_traits::Float::fract(*x) == 0.0)
    }
}

impl Deref for Matrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl From<Matrix> for DMatrix<f64> {
    fn from(m: Matrix) -> Self {
        m.0
    }
}

pub(crate) fn select_columns(m: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), indices.len(), |r, c| m[(r, indices[c])])
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `lambda * I - d`, complexified.
pub(crate) fn shifted(d: &DMatrix<f64>, lambda: Complex64) -> ComplexMatrix {
    let n = d.nrows();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let v = Complex64::new(-d[(r, c)], 0.0);
        if r == c {
            v + lambda
        } else {
            v
        }
    })
}

/// `[lambda I - d, h]` as a complex matrix.
pub(crate) fn pencil(d: &DMatrix<f64>, h: &DMatrix<f64>, lambda: Complex64) -> ComplexMatrix {
    let n = d.nrows();
    let s = shifted(d, lambda);
    ComplexMatrix::from_fn(n, n + h.ncols(), |r, c| {
        if c < n {
            s[(r, c)]
        } else {
            Complex64::new(h[(r, c - n)], 0.0)
        }
    })
}
