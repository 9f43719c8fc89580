//! Singular value decomposition with a reconstruction check.

use nalgebra::{ComplexField, DMatrix, Dyn, SVD};

// nalgebra's shifted QR iteration occasionally settles on a factorisation
// that does not reproduce its input. Whether it does depends on the
// convergence threshold, so a few thresholds are tried in turn.
const EPS_FACTORS: [f64; 6] = [5.0, 1.0, 10.0, 2.0, 20.0, 50.0];

pub(crate) fn svd_of<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> SVD<T, Dyn, Dyn> {
    let bound = 64.0 * f64::EPSILON * m.norm() * m.nrows().max(m.ncols()).max(1) as f64;
    let mut best: Option<(f64, SVD<T, Dyn, Dyn>)> = None;
    for factor in EPS_FACTORS {
        let Some(svd) = m.clone().try_svd(true, true, factor * f64::EPSILON, 0) else {
            continue;
        };
        let err = match svd.clone().recompose() {
            Ok(back) => (back - m).norm(),
            Err(_) => f64::INFINITY,
        };
        if err <= bound {
            return svd;
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, svd));
        }
    }
    match best {
        Some((_, svd)) => svd,
        None => m.clone().svd(true, true),
    }
}
