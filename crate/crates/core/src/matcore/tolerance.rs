use crate::error::{Error, Result};

/// Numerical policy shared by every rank, eigenvalue and residual decision.
///
/// A matrix has numerical rank equal to the number of singular values above
/// `rank_rel * sigma_max * max(rows, cols)`. With `exact` set, real-matrix
/// ranks are instead computed by rational elimination on the exact binary
/// value of every `f64` entry; eigenvalue-based steps stay in floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub eig_cluster: f64,
    pub residual_abs: f64,
    pub exact: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-10,
            eig_cluster: 1e-8,
            residual_abs: 1e-8,
            exact: false,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, eig_cluster: f64, residual_abs: f64) -> Result<Self> {
        let tol = Tolerance {
            rank_rel,
            eig_cluster,
            residual_abs,
            exact: false,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.rank_rel) {
            return Err(Error::InvalidTolerance("rank_rel must be positive"));
        }
        if !positive(self.eig_cluster) {
            return Err(Error::InvalidTolerance("eig_cluster must be positive"));
        }
        if !positive(self.residual_abs) {
            return Err(Error::InvalidTolerance("residual_abs must be positive"));
        }
        Ok(())
    }

    pub fn rank_threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        self.rank_rel * sigma_max * rows.max(cols) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let t = Tolerance::default();
        assert!(t.validate().is_ok());
        assert_eq!(t.rank_rel, 1e-10);
        assert_eq!(t.eig_cluster, 1e-8);
        assert_eq!(t.residual_abs, 1e-8);
        assert!(!t.exact);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Tolerance::new(0.0, 1e-8, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, -1.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1e-8, f64::NAN).is_err());
    }
}
