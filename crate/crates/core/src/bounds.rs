//! Lower and upper bounds on the minimum number of (sparse) input vectors
//! needed to steer a system between arbitrary states or outputs.

use alloc::vec::Vec;

use crate::combinations::Combinations;
use crate::ctrb::{common_support_test, is_controllable, output_sparse_necessary, scale_of, sparse_pbh_test};
use crate::error::{Error, Result};
use crate::matcore::{clusters_of, min_poly_degree_of, rank_against, rank_of, select_columns, Tolerance};
use crate::system::SystemModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundVariant {
    Unconstrained,
    Sparse,
    SparseRelaxed,
    Output,
    CommonSupport,
}

impl BoundVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundVariant::Unconstrained => "unconstrained",
            BoundVariant::Sparse => "sparse",
            BoundVariant::SparseRelaxed => "sparse_relaxed",
            BoundVariant::Output => "output",
            BoundVariant::CommonSupport => "common_support",
        }
    }
}

/// `lower <= K* <= upper`. The lower bound is the ceiling of the rational
/// `lower_numerator / lower_denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KStarBounds {
    pub lower: usize,
    pub upper: usize,
    pub lower_numerator: usize,
    pub lower_denominator: usize,
    /// Degree of the minimal polynomial of `D`.
    pub q: usize,
    pub s_star: Option<usize>,
    /// `min(rank(H), s)`, or `min(rank(AH), s)` for the output variant.
    pub effective_rank: usize,
    pub variant: BoundVariant,
}

/// Smallest controllable column subset of `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SStar {
    pub size: usize,
    /// Lexicographically first subset of that size.
    pub support: Vec<usize>,
}

/// Limits for the ascending-size search behind [`s_star_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SStarLimits {
    /// Largest subset size tried; defaults to `L`.
    pub size_cap: Option<usize>,
    /// Maximum number of subsets tested.
    pub max_subsets: u64,
}

impl Default for SStarLimits {
    fn default() -> Self {
        SStarLimits {
            size_cap: None,
            max_subsets: 1 << 22,
        }
    }
}

pub fn s_star(sys: &SystemModel, tol: &Tolerance) -> Result<SStar> {
    s_star_with(sys, SStarLimits::default(), tol)
}

/// `S*`: the least `T` such that some `T` columns of `H` keep `(D, H_S)`
/// controllable. Errors with [`Error::SStarUndefined`] for an uncontrollable
/// system and [`Error::BudgetExceeded`] when the limits stop the search.
pub fn s_star_with(sys: &SystemModel, limits: SStarLimits, tol: &Tolerance) -> Result<SStar> {
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let clusters = clusters_of(d, tol);
    let scale = scale_of(d, h);
    if !is_controllable(d, h, &clusters, scale, tol) {
        return Err(Error::SStarUndefined);
    }
    let cap = limits.size_cap.unwrap_or(sys.l()).min(sys.l());
    let mut tested = 0u64;
    for size in 1..=cap {
        for support in Combinations::new(sys.l(), size) {
            tested += 1;
            if tested > limits.max_subsets {
                return Err(Error::BudgetExceeded);
            }
            if is_controllable(d, &select_columns(h, &support), &clusters, scale, tol) {
                return Ok(SStar { size, support });
            }
        }
    }
    Err(Error::BudgetExceeded)
}

fn div_ceil(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Unconstrained inputs: `N / rank(H) <= K <= min(q, N - rank(H) + 1)`.
pub fn kstar_bounds_unconstrained(sys: &SystemModel, tol: &Tolerance) -> Result<KStarBounds> {
    let n = sys.n();
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    if !is_controllable(d, h, &clusters_of(d, tol), scale_of(d, h), tol) {
        return Err(Error::Uncontrollable);
    }
    let rank_h = rank_of(h, tol);
    let q = min_poly_degree_of(d, tol);
    Ok(KStarBounds {
        lower: div_ceil(n, rank_h),
        upper: q.min(n - rank_h + 1),
        lower_numerator: n,
        lower_denominator: rank_h,
        q,
        s_star: None,
        effective_rank: rank_h,
        variant: BoundVariant::Unconstrained,
    })
}

/// s-sparse inputs: `N / R <= K* <= min(q * ceil(S*/s), N - R + 1)` with
/// `R = min(rank(H), s)`.
pub fn kstar_bounds_sparse(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<KStarBounds> {
    let report = sparse_pbh_test(sys, s, tol)?;
    if !report.rank_condition_holds {
        return Err(Error::SStarUndefined);
    }
    if !report.verdict {
        return Err(Error::NotSparseControllable { s });
    }
    let n = sys.n();
    let r = rank_of(sys.h().as_inner(), tol).min(s);
    let q = min_poly_degree_of(sys.d().as_inner(), tol);
    let star = s_star(sys, tol)?.size;
    Ok(KStarBounds {
        lower: div_ceil(n, r),
        upper: (q * div_ceil(star, s)).min(n - r + 1),
        lower_numerator: n,
        lower_denominator: r,
        q,
        s_star: Some(star),
        effective_rank: r,
        variant: BoundVariant::Sparse,
    })
}

/// Relaxed form avoiding `S*`:
/// `N / min(rank(H), s) <= K* <= min(q * ceil(rank(H)/s), rank(D) + 1, N)`.
pub fn kstar_bounds_relaxed(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<KStarBounds> {
    let report = sparse_pbh_test(sys, s, tol)?;
    if !report.verdict {
        return Err(Error::NotSparseControllable { s });
    }
    let n = sys.n();
    let rank_h = rank_of(sys.h().as_inner(), tol);
    let r = rank_h.min(s);
    let q = min_poly_degree_of(sys.d().as_inner(), tol);
    Ok(KStarBounds {
        lower: div_ceil(n, r),
        upper: (q * div_ceil(rank_h, s)).min(report.rank_d + 1).min(n),
        lower_numerator: n,
        lower_denominator: r,
        q,
        s_star: None,
        effective_rank: r,
        variant: BoundVariant::SparseRelaxed,
    })
}

/// Output steering with s-sparse inputs:
/// `m / R <= K* <= min(q * ceil(rank(H)/s), m - R + 1)` with `R = min(rank(AH), s)`.
///
/// Output s-sparse-controllability cannot be certified algebraically; the
/// bounds are refused only when the necessary conditions already disprove it.
pub fn output_kstar_bounds(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<KStarBounds> {
    let a = sys.output_matrix()?;
    if !output_sparse_necessary(sys, s, tol)? {
        return Err(Error::NotOutputSparseControllable { s });
    }
    let m = a.nrows();
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let rank_h = rank_of(h, tol);
    let r = rank_against(&(a.as_inner() * h), a.norm() * h.norm(), tol).min(s);
    if r == 0 {
        return Err(Error::DegenerateOutputBound);
    }
    let q = min_poly_degree_of(d, tol);
    Ok(KStarBounds {
        lower: div_ceil(m, r),
        upper: (q * div_ceil(rank_h, s)).min(m - r + 1),
        lower_numerator: m,
        lower_denominator: r,
        q,
        s_star: None,
        effective_rank: r,
        variant: BoundVariant::Output,
    })
}

/// Common-support inputs: `N / R <= K* <= min(q, N - R + 1)`, `R = min(rank(H), s)`.
pub fn common_support_kstar_bounds(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<KStarBounds> {
    if !common_support_test(sys, s, tol)?.verdict {
        return Err(Error::NotCommonSupportControllable { s });
    }
    let n = sys.n();
    let r = rank_of(sys.h().as_inner(), tol).min(s);
    let q = min_poly_degree_of(sys.d().as_inner(), tol);
    Ok(KStarBounds {
        lower: div_ceil(n, r),
        upper: q.min(n - r + 1),
        lower_numerator: n,
        lower_denominator: r,
        q,
        s_star: None,
        effective_rank: r,
        variant: BoundVariant::CommonSupport,
    })
}
