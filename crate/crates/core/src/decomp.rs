//! Standard-form decomposition: a change of basis `T = U W` that splits the
//! state into an s-sparse-controllable part, a controllable but
//! s-sparse-uncontrollable part and an uncontrollable part.
//!
//! `U` is an orthonormal completion of a basis for the controllable
//! subspace, and `W = blockdiag(V, I)` where `V` is the core-nilpotent
//! splitting of the controllable block of `U^T D U`. In the new coordinates
//!
//! ```text
//!       [ D11  0   D21 ]        [ H1 ]
//! D̄ =   [ 0    0   D22 ]   H̄ =  [ H2 ]
//!       [ 0    0   D3  ]        [ 0  ]
//! ```
//!
//! with row blocks of size `r`, `R - r` and `N - R`. When the zero
//! eigenvalue of the controllable block is not semisimple the middle
//! diagonal block is nilpotent rather than zero and
//! [`DecompositionResult::core_rank_mismatch`] is set.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::ctrb::sparse_pbh_test;
use crate::error::{Error, Result};
use crate::matcore::{core_nilpotent_of, extend_to_basis_of, krylov_blocks, rank_of, Matrix, Tolerance};
use crate::system::SystemModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordinateClass {
    SparseControllable,
    SparseUncontrollable,
    Uncontrollable,
}

impl CoordinateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CoordinateClass::SparseControllable => "sparse_controllable",
            CoordinateClass::SparseUncontrollable => "sparse_uncontrollable",
            CoordinateClass::Uncontrollable => "uncontrollable",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult {
    pub u: Matrix,
    pub w: Matrix,
    pub d_bar: Matrix,
    pub h_bar: Matrix,
    /// Dimension of the controllable subspace.
    pub r_ctrl: usize,
    /// Core dimension of the controllable block.
    pub r_core: usize,
    /// `r_core + min(s, r_ctrl - r_core)`.
    pub r_s: usize,
    pub s: usize,
    pub classification: Vec<CoordinateClass>,
    pub core_rank_mismatch: bool,
}

impl DecompositionResult {
    /// The full change of basis `U W`.
    pub fn basis(&self) -> DMatrix<f64> {
        self.u.as_inner() * self.w.as_inner()
    }
}

pub fn standard_form(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<DecompositionResult> {
    sys.check_sparsity(s)?;
    let n = sys.n();
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());

    let (u, r_ctrl) = extend_to_basis_of(&krylov_blocks(d, h, n), tol);
    let u_t = u.transpose();
    let d_check = &u_t * d * &u;
    let h_check = &u_t * h;

    let block = d_check.view((0, 0), (r_ctrl, r_ctrl)).clone_owned();
    let (v, r_core, mismatch) = if r_ctrl == 0 {
        (DMatrix::zeros(0, 0), 0, false)
    } else {
        let cn = core_nilpotent_of(&block, d.norm(), tol);
        (cn.v.into_inner(), cn.core_dim, cn.rank_mismatch)
    };
    let v_inv = v.clone().try_inverse().ok_or(Error::SingularTransform)?;

    let mut w = DMatrix::identity(n, n);
    let mut w_inv = DMatrix::identity(n, n);
    w.view_mut((0, 0), (r_ctrl, r_ctrl)).copy_from(&v);
    w_inv.view_mut((0, 0), (r_ctrl, r_ctrl)).copy_from(&v_inv);

    let d_bar = &w_inv * &d_check * &w;
    let h_bar = &w_inv * &h_check;
    let r_s = r_core + s.min(r_ctrl - r_core);

    let classification = (0..n)
        .map(|i| {
            if i < r_s {
                CoordinateClass::SparseControllable
            } else if i < r_ctrl {
                CoordinateClass::SparseUncontrollable
            } else {
                CoordinateClass::Uncontrollable
            }
        })
        .collect();

    Ok(DecompositionResult {
        u: Matrix::from_computed(u),
        w: Matrix::from_computed(w),
        d_bar: Matrix::from_computed(d_bar),
        h_bar: Matrix::from_computed(h_bar),
        r_ctrl,
        r_core,
        r_s,
        s,
        classification,
        core_rank_mismatch: mismatch,
    })
}

/// One structural check. `residual` is relative to
/// `max(1, |D|_F, |H|_F)`; `None` when the check is not a residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    /// `T D̄ = D T` and `T H̄ = H`.
    pub similarity: Check,
    /// The zero pattern of `D̄` (nilpotency of the middle block when the
    /// core rank mismatches).
    pub zero_blocks: Check,
    /// The leading `R_s` coordinates pass the sparse PBH test at `s`.
    pub leading_subsystem: Check,
    /// The trailing `N - R` rows of `H̄` vanish.
    pub input_free_tail: Check,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.similarity.passed && self.zero_blocks.passed && self.leading_subsystem.passed && self.input_free_tail.passed
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn block_max(m: &DMatrix<f64>, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> f64 {
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    max_abs(&m.view((rows.start, cols.start), (rows.len(), cols.len())).clone_owned())
}

fn residual_check(residual: f64, tol: &Tolerance) -> Check {
    Check {
        passed: residual <= tol.residual_abs,
        residual: Some(residual),
    }
}

pub fn verify_standard_form(sys: &SystemModel, res: &DecompositionResult, tol: &Tolerance) -> Result<Verification> {
    let n = sys.n();
    for (what, m, cols) in [
        ("U", &res.u, n),
        ("W", &res.w, n),
        ("D_bar", &res.d_bar, n),
        ("H_bar", &res.h_bar, sys.l()),
    ] {
        if m.nrows() != n || m.ncols() != cols {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                found: m.nrows(),
            });
        }
    }
    if res.r_s > res.r_ctrl || res.r_core > res.r_s || res.r_ctrl > n {
        return Err(Error::InvalidParameter("decomposition dimensions are inconsistent"));
    }

    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let scale = 1.0_f64.max(d.norm()).max(h.norm());
    let t = res.basis();
    let (d_bar, h_bar) = (res.d_bar.as_inner(), res.h_bar.as_inner());

    let similarity = max_abs(&(&t * d_bar - d * &t)).max(max_abs(&(&t * h_bar - h))) / scale;

    let (r, big_r) = (res.r_core, res.r_ctrl);
    let mut zero = [
        block_max(d_bar, 0..r, r..big_r),
        block_max(d_bar, r..big_r, 0..r),
        block_max(d_bar, big_r..n, 0..r),
        block_max(d_bar, big_r..n, r..big_r),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    if big_r > r {
        let mid = d_bar.view((r, r), (big_r - r, big_r - r)).clone_owned() / scale;
        let mid = if res.core_rank_mismatch {
            mid.pow((big_r - r) as u32)
        } else {
            mid
        };
        zero = zero.max(max_abs(&mid) * scale);
    }

    let leading_subsystem = if res.r_s == 0 {
        Check {
            passed: true,
            residual: None,
        }
    } else {
        let k = res.r_s;
        let sub = SystemModel::state_only(
            Matrix::from_computed(d_bar.view((0, 0), (k, k)).clone_owned()),
            Matrix::from_computed(h_bar.rows(0, k).clone_owned()),
        )?;
        Check {
            passed: res.s <= sys.l() && sparse_pbh_test(&sub, res.s, tol)?.verdict,
            residual: None,
        }
    };

    Ok(Verification {
        similarity: residual_check(similarity, tol),
        zero_blocks: residual_check(zero / scale, tol),
        leading_subsystem,
        input_free_tail: residual_check(block_max(h_bar, big_r..n, 0..sys.l()) / scale, tol),
    })
}

/// `(T^{-1} D T, T^{-1} H, A T)`.
pub fn transform_system(sys: &SystemModel, t: &Matrix) -> Result<SystemModel> {
    let n = sys.n();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "transform",
            expected: n,
            found: if t.nrows() != n { t.nrows() } else { t.ncols() },
        });
    }
    let t = t.as_inner();
    if rank_of(t, &Tolerance::default()) < n {
        return Err(Error::SingularTransform);
    }
    let lu = t.clone().lu();
    let d = lu.solve(&(sys.d().as_inner() * t)).ok_or(Error::SingularTransform)?;
    let h = lu.solve(sys.h().as_inner()).ok_or(Error::SingularTransform)?;
    let a = sys.a().map(|a| Matrix::from_computed(a.as_inner() * t));
    SystemModel::new(Matrix::from_computed(d), Matrix::from_computed(h), a)
}
