use alloc::vec::Vec;

use super::exact::ExactSpan;
use super::Tolerance;

/// Column space grown one vector at a time, supporting rollback by length.
///
/// The combinatorial searches walk schedules depth-first; each step appends
/// the columns of one support block and backtracking truncates them again.
/// The floating variant uses twice-iterated Gram-Schmidt with the shared
/// rank threshold evaluated against a fixed reference scale, so that its
/// decisions line up with the SVD-based [`super::rank`] on the full matrix.
#[derive(Clone, Debug)]
pub(crate) enum Span {
    Float(FloatSpan),
    Exact(ExactSpan),
}

impl Span {
    /// `scale` is the largest column norm in the candidate pool and `width`
    /// the column count of the matrix whose rank is being emulated.
    pub(crate) fn new(dim: usize, scale: f64, width: usize, tol: &Tolerance) -> Self {
        if tol.exact {
            Span::Exact(ExactSpan::new(dim))
        } else {
            Span::Float(FloatSpan {
                dim,
                threshold: tol.rank_threshold(scale, dim, width.max(1)),
                basis: Vec::new(),
            })
        }
    }

    pub(crate) fn rank(&self) -> usize {
        match self {
            Span::Float(s) => s.basis.len(),
            Span::Exact(s) => s.rank(),
        }
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        match self {
            Span::Float(s) => s.basis.truncate(len),
            Span::Exact(s) => s.truncate(len),
        }
    }

    pub(crate) fn try_add(&mut self, v: &[f64]) -> bool {
        match self {
            Span::Float(s) => s.try_add(v),
            Span::Exact(s) => s.try_add(v),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct FloatSpan {
    dim: usize,
    threshold: f64,
    basis: Vec<Vec<f64>>,
}

impl FloatSpan {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let p = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= p * bi;
                }
            }
        }
        w
    }

    fn try_add(&mut self, v: &[f64]) -> bool {
        if self.basis.len() == self.dim {
            return false;
        }
        let mut w = self.residual(v);
        let nrm = norm(&w);
        if nrm <= self.threshold {
            return false;
        }
        for x in w.iter_mut() {
            *x /= nrm;
        }
        self.basis.push(w);
        true
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    num_traits::Float::sqrt(dot(a, a))
}
