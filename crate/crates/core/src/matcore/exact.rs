//! Tolerance-free rank computations over the rationals.
//!
//! Every finite `f64` is a dyadic rational, so converting entries with
//! [`BigRational::from_float`] loses nothing. Results are exact for the
//! matrix as stored; for integer inputs whose products stay below 2^53 that
//! is the exact answer for the mathematical matrix as well.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite entry")
}

/// Exact rank by fraction-exact Gaussian elimination.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let mut span = ExactSpan::new(m.nrows());
    for c in 0..m.ncols() {
        let col: Vec<f64> = m.column(c).iter().copied().collect();
        span.try_add(&col);
        if span.rank() == m.nrows() {
            break;
        }
    }
    span.rank()
}

/// Incrementally maintained column space, kept in echelon form.
#[derive(Clone, Debug)]
pub(crate) struct ExactSpan {
    dim: usize,
    // (pivot row, vector normalised to 1 at the pivot)
    basis: Vec<(usize, Vec<BigRational>)>,
}

impl ExactSpan {
    pub(crate) fn new(dim: usize) -> Self {
        ExactSpan {
            dim,
            basis: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.basis.len()
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.basis.truncate(len);
    }

    /// Adds `v` if it is outside the current span; returns whether it was added.
    pub(crate) fn try_add(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut w: Vec<BigRational> = v.iter().map(|&x| to_rational(x)).collect();
        for (pivot, b) in &self.basis {
            if w[*pivot].is_zero() {
                continue;
            }
            let factor = w[*pivot].clone();
            for (wi, bi) in w.iter_mut().zip(b) {
                if !bi.is_zero() {
                    *wi -= &factor * bi;
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(pivot) => {
                let inv = BigRational::from_u8(1).unwrap() / w[pivot].clone();
                for x in w.iter_mut() {
                    *x *= &inv;
                }
                self.basis.push((pivot, w));
                true
            }
        }
    }
}
