use nalgebra::{DMatrix, DVector};

use super::{exact, svd_of, ComplexMatrix, Matrix, Tolerance};

/// Numerical rank: singular values above `rank_rel * sigma_max * max(rows, cols)`.
/// Zero for the zero matrix. Exact rational elimination when `tol.exact`.
pub fn rank(m: &Matrix, tol: &Tolerance) -> usize {
    rank_of(m.as_inner(), tol)
}

pub(crate) fn rank_of(m: &DMatrix<f64>, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    if tol.exact {
        return exact::rank(m);
    }
    count_above_threshold(&svd_of(m).singular_values, m.nrows(), m.ncols(), tol)
}

/// Rank with the cutoff taken against `max(sigma_max, reference)`, for
/// matrices such as powers `M^k` that may be pure rounding noise whose own
/// largest singular value is meaningless.
pub(crate) fn rank_against(m: &DMatrix<f64>, reference: f64, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    if tol.exact {
        return exact::rank(m);
    }
    let sv = svd_of(m).singular_values;
    let sigma_max = sv.iter().copied().fold(reference, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let cut = tol.rank_threshold(sigma_max, m.nrows(), m.ncols());
    sv.iter().filter(|&&s| s > cut).count()
}

/// Complex matrices are always ranked in floating point.
pub(crate) fn rank_complex(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    count_above_threshold(&svd_of(m).singular_values, m.nrows(), m.ncols(), tol)
}

/// Complex analogue of [`rank_against`].
pub(crate) fn rank_complex_against(m: &ComplexMatrix, reference: f64, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = svd_of(m).singular_values;
    let sigma_max = sv.iter().copied().fold(reference, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let cut = tol.rank_threshold(sigma_max, m.nrows(), m.ncols());
    sv.iter().filter(|&&s| s > cut).count()
}

pub(crate) fn count_above_threshold(
    sv: &DVector<f64>,
    rows: usize,
    cols: usize,
    tol: &Tolerance,
) -> usize {
    let sigma_max = sv.iter().copied().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let cut = tol.rank_threshold(sigma_max, rows, cols);
    sv.iter().filter(|&&s| s > cut).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_full_rank() {
        let tol = Tolerance::default();
        assert_eq!(rank(&Matrix::identity(3), &tol), 3);
        assert_eq!(rank(&Matrix::identity(3), &tol.with_exact(true)), 3);
    }

    #[test]
    fn example_input_matrix_has_rank_two() {
        let h = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(rank(&h, &Tolerance::default()), 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank(&Matrix::zeros(3, 2), &Tolerance::default()), 0);
        assert_eq!(rank(&Matrix::zeros(3, 2), &Tolerance::default().with_exact(true)), 0);
    }

    #[test]
    fn product_of_thin_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = DMatrix::from_fn(5, 2, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::from_fn(2, 5, |_, _| rng.gen_range(-1.0..1.0));
            let m = Matrix::new(&a * &b).unwrap();
            assert_eq!(rank(&m, &Tolerance::default()), 2);
            assert_eq!(rank(&m, &Tolerance::default()), rank(&Matrix::new(m.transpose()).unwrap(), &Tolerance::default()));
        }
    }
}
