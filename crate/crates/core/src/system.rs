use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{select_columns, Matrix};

/// `x_k = D x_{k-1} + H h_k`, optionally observed through `y_k = A x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    d: Matrix,
    h: Matrix,
    a: Option<Matrix>,
}

/// Non-fatal observations about a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelWarning {
    /// The output analysis assumes fewer outputs than states.
    OutputNotSmallerThanState { m: usize, n: usize },
}

impl SystemModel {
    pub fn new(d: Matrix, h: Matrix, a: Option<Matrix>) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::NotSquare {
                rows: d.nrows(),
                cols: d.ncols(),
            });
        }
        let n = d.nrows();
        if h.nrows() != n {
            return Err(Error::DimensionMismatch {
                what: "rows of H",
                expected: n,
                found: h.nrows(),
            });
        }
        if let Some(a) = &a {
            if a.ncols() != n {
                return Err(Error::DimensionMismatch {
                    what: "columns of A",
                    expected: n,
                    found: a.ncols(),
                });
            }
        }
        Ok(SystemModel { d, h, a })
    }

    pub fn state_only(d: Matrix, h: Matrix) -> Result<Self> {
        SystemModel::new(d, h, None)
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn a(&self) -> Option<&Matrix> {
        self.a.as_ref()
    }

    /// State dimension `N`.
    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    /// Input dimension `L`.
    pub fn l(&self) -> usize {
        self.h.ncols()
    }

    /// Output dimension `m`, when an output matrix is present.
    pub fn m(&self) -> Option<usize> {
        self.a.as_ref().map(|a| a.nrows())
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        let mut out = Vec::new();
        if let Some(m) = self.m() {
            if m >= self.n() {
                out.push(ModelWarning::OutputNotSmallerThanState { m, n: self.n() });
            }
        }
        out
    }

    pub fn with_output(self, a: Option<Matrix>) -> Result<Self> {
        SystemModel::new(self.d, self.h, a)
    }

    /// `H_S`: the columns of `H` listed in `support`.
    pub fn input_columns(&self, support: &[usize]) -> Result<DMatrix<f64>> {
        for &i in support {
            if i >= self.l() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.l(),
                });
            }
        }
        Ok(select_columns(self.h.as_inner(), support))
    }

    pub(crate) fn output_matrix(&self) -> Result<&Matrix> {
        self.a.as_ref().ok_or(Error::MissingOutputMatrix)
    }

    pub(crate) fn check_sparsity(&self, s: usize) -> Result<()> {
        if s == 0 || s > self.l() {
            return Err(Error::SparsityOutOfRange { s, inputs: self.l() });
        }
        Ok(())
    }
}
