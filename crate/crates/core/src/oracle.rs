//! Exhaustive searches over support schedules.
//!
//! These procedures decide sparse controllability directly from the
//! definition (some schedule `S_1..S_K` makes
//! `[D^{K-1} H_{S_1} ... H_{S_K}]` full rank) and serve as ground truth for
//! the algebraic tests. Their cost is exponential; every search runs under
//! an [`OracleBudget`] and reports exhaustion as
//! [`SearchOutcome::Inconclusive`] rather than a wrong answer.

use alloc::vec::Vec;
use core::time::Duration;

use nalgebra::DMatrix;

use crate::bounds::s_star;
use crate::combinations::Combinations;
use crate::error::{Error, Result};
use crate::matcore::span::{norm, Span};
use crate::matcore::{krylov_blocks, min_poly_degree_of, power_blocks, rank_against, select_columns, Tolerance};
use crate::system::SystemModel;

/// Ordered supports `S_1..S_K`, each sorted, of size at most `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSchedule {
    supports: Vec<Vec<usize>>,
    sparsity: usize,
}

impl SupportSchedule {
    /// Validates against the number of inputs `l`; supports are sorted and
    /// must not repeat an index.
    pub fn new(supports: Vec<Vec<usize>>, sparsity: usize, l: usize) -> Result<Self> {
        if sparsity == 0 || sparsity > l {
            return Err(Error::SparsityOutOfRange { s: sparsity, inputs: l });
        }
        let mut sorted = Vec::with_capacity(supports.len());
        for mut set in supports {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter("support repeats an index"));
            }
            if set.len() > sparsity {
                return Err(Error::InvalidParameter("support larger than the sparsity"));
            }
            if let Some(&i) = set.iter().find(|&&i| i >= l) {
                return Err(Error::IndexOutOfRange { index: i, bound: l });
            }
            sorted.push(set);
        }
        Ok(SupportSchedule {
            supports: sorted,
            sparsity,
        })
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Number of time steps `K`.
    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    fn check_against(&self, sys: &SystemModel) -> Result<()> {
        if self.sparsity > sys.l() {
            return Err(Error::SparsityOutOfRange {
                s: self.sparsity,
                inputs: sys.l(),
            });
        }
        for set in &self.supports {
            if let Some(&i) = set.iter().find(|&&i| i >= sys.l()) {
                return Err(Error::IndexOutOfRange { index: i, bound: sys.l() });
            }
        }
        Ok(())
    }
}

/// Work limits for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Longest schedule considered by [`exact_min_k`]; `None` picks a length
    /// that is guaranteed to suffice (see [`default_max_k`]).
    pub max_k: Option<usize>,
    /// Maximum number of support choices evaluated.
    pub max_enumerations: u64,
    /// Wall-clock limit; only enforced with the `std` feature.
    pub deadline: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_k: None,
            max_enumerations: 50_000_000,
            deadline: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Lexicographically first schedule reaching full rank.
    Found(SupportSchedule),
    NotFound,
    Inconclusive,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinKOutcome {
    Found { k: usize, witness: SupportSchedule },
    /// No schedule up to `max_k` reaches full rank.
    NotFound { max_k: usize },
    /// The budget ran out after every length below `reached_k` was refuted.
    Inconclusive { reached_k: usize },
}

impl MinKOutcome {
    pub fn k(&self) -> Option<usize> {
        match self {
            MinKOutcome::Found { k, .. } => Some(*k),
            _ => None,
        }
    }
}

struct Meter {
    used: u64,
    limit: u64,
    #[cfg(feature = "std")]
    deadline: Option<(std::time::Instant, Duration)>,
}

impl Meter {
    fn new(budget: &OracleBudget) -> Self {
        Meter {
            used: 0,
            limit: budget.max_enumerations,
            #[cfg(feature = "std")]
            deadline: budget.deadline.map(|d| (std::time::Instant::now(), d)),
        }
    }

    /// Charges one unit of work; false once the budget is spent.
    fn tick(&mut self) -> bool {
        self.used += 1;
        if self.used > self.limit {
            return false;
        }
        #[cfg(feature = "std")]
        if self.used.is_multiple_of(1024) {
            if let Some((start, limit)) = self.deadline {
                if start.elapsed() > limit {
                    return false;
                }
            }
        }
        true
    }
}

/// `[D^{K-1} H_{S_1}, D^{K-2} H_{S_2}, ..., H_{S_K}]`. May have zero columns.
pub fn schedule_submatrix(sys: &SystemModel, schedule: &SupportSchedule) -> Result<DMatrix<f64>> {
    schedule.check_against(sys)?;
    let k = schedule.len();
    let powers = power_blocks(sys.d().as_inner(), sys.h().as_inner(), k.max(1));
    let width: usize = schedule.supports().iter().map(Vec::len).sum();
    let mut out = DMatrix::zeros(sys.n(), width);
    let mut col = 0;
    for (i, set) in schedule.supports().iter().enumerate() {
        let block = &powers[k - 1 - i];
        for &j in set {
            out.column_mut(col).copy_from(&block.column(j));
            col += 1;
        }
    }
    Ok(out)
}

/// Candidate columns for every time step: `pool[i][j]` is column `j` of
/// `M D^{K-1-i} H`, with `M = I` or the output matrix.
struct Pool {
    columns: Vec<Vec<Vec<f64>>>,
    target: usize,
    scale: f64,
    width: usize,
}

impl Pool {
    fn build(sys: &SystemModel, k: usize, s: usize, output: Option<&DMatrix<f64>>) -> Pool {
        let powers = power_blocks(sys.d().as_inner(), sys.h().as_inner(), k);
        let mut columns = Vec::with_capacity(k);
        // Columns of A D^j H that vanish in exact arithmetic must not set the scale.
        let mut scale = output.map_or(0.0, |a| a.norm() * max_column_norm(sys.h().as_inner()));
        for i in 0..k {
            let block = &powers[k - 1 - i];
            let block = match output {
                Some(a) => a * block,
                None => block.clone(),
            };
            let cols: Vec<Vec<f64>> = (0..block.ncols())
                .map(|j| block.column(j).iter().copied().collect())
                .collect();
            for c in &cols {
                scale = scale.max(norm(c));
            }
            columns.push(cols);
        }
        let target = output.map_or(sys.n(), |a| a.nrows());
        Pool {
            columns,
            target,
            scale,
            width: k * s,
        }
    }

    fn span(&self, tol: &Tolerance) -> Span {
        Span::new(self.target, self.scale, self.width, tol)
    }

    /// Rank contributed at most by each step: `min(s, rank of the full block)`.
    fn capacities(&self, s: usize, tol: &Tolerance) -> Vec<usize> {
        self.columns
            .iter()
            .map(|cols| {
                let mut span = self.span(tol);
                for c in cols {
                    span.try_add(c);
                }
                span.rank().min(s)
            })
            .collect()
    }
}

fn max_column_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'a> {
    pool: &'a Pool,
    subsets: &'a [Vec<usize>],
    /// suffix[i] = capacity of steps i..K
    suffix: Vec<usize>,
    span: Span,
    chosen: Vec<usize>,
    meter: &'a mut Meter,
}

impl Search<'_> {
    fn dfs(&mut self, step: usize) -> Step {
        let k = self.pool.columns.len();
        if self.span.rank() >= self.pool.target {
            while self.chosen.len() < k {
                self.chosen.push(0);
            }
            return Step::Found;
        }
        if step == k || self.span.rank() + self.suffix[step] < self.pool.target {
            return Step::Exhausted;
        }
        for (idx, subset) in self.subsets.iter().enumerate() {
            if !self.meter.tick() {
                return Step::OutOfBudget;
            }
            let mark = self.span.rank();
            for &j in subset {
                self.span.try_add(&self.pool.columns[step][j]);
            }
            self.chosen.push(idx);
            match self.dfs(step + 1) {
                Step::Exhausted => {}
                other => return other,
            }
            self.chosen.pop();
            self.span.truncate(mark);
        }
        Step::Exhausted
    }
}

fn suffix_sums(caps: &[usize]) -> Vec<usize> {
    let mut suffix = alloc::vec![0; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    suffix
}

fn search_length(
    sys: &SystemModel,
    s: usize,
    k: usize,
    output: Option<&DMatrix<f64>>,
    meter: &mut Meter,
    tol: &Tolerance,
) -> Result<SearchOutcome> {
    let pool = Pool::build(sys, k, s, output);
    let subsets: Vec<Vec<usize>> = Combinations::new(sys.l(), s).collect();
    let suffix = suffix_sums(&pool.capacities(s, tol));
    let mut search = Search {
        pool: &pool,
        subsets: &subsets,
        suffix,
        span: pool.span(tol),
        chosen: Vec::with_capacity(k),
        meter,
    };
    Ok(match search.dfs(0) {
        Step::Found => {
            let supports = search.chosen.iter().map(|&i| subsets[i].clone()).collect();
            SearchOutcome::Found(SupportSchedule::new(supports, s, sys.l())?)
        }
        Step::Exhausted => SearchOutcome::NotFound,
        Step::OutOfBudget => SearchOutcome::Inconclusive,
    })
}

fn check_length(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("schedule length K must be positive"));
    }
    Ok(())
}

/// Is there a schedule of `k` supports with exactly `s` entries each whose
/// submatrix has rank `N`? Searches in lexicographic order with pruning on
/// `prefix rank + remaining capacity < N`.
pub fn kalman_type_rank_test(
    sys: &SystemModel,
    s: usize,
    k: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<SearchOutcome> {
    sys.check_sparsity(s)?;
    check_length(k)?;
    search_length(sys, s, k, None, &mut Meter::new(budget), tol)
}

/// Output analogue: rank `m` of `A [D^{K-1} H_{S_1} ... H_{S_K}]`.
pub fn output_kalman_type_rank_test(
    sys: &SystemModel,
    s: usize,
    k: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<SearchOutcome> {
    let a = sys.output_matrix()?.as_inner().clone();
    sys.check_sparsity(s)?;
    check_length(k)?;
    search_length(sys, s, k, Some(&a), &mut Meter::new(budget), tol)
}

/// Schedule length that suffices to decide s-sparse-controllability:
/// `q * ceil(S*/s)` when `S*` exists, otherwise `N * ceil(L/s)` (the length
/// of the covering construction built from [`partition_schedule`]).
pub fn default_max_k(sys: &SystemModel, s: usize, tol: &Tolerance) -> Result<usize> {
    sys.check_sparsity(s)?;
    match s_star(sys, tol) {
        Ok(star) => Ok(min_poly_degree_of(sys.d().as_inner(), tol) * star.size.div_ceil(s)),
        Err(Error::SStarUndefined) => Ok(sys.n() * sys.l().div_ceil(s)),
        Err(e) => Err(e),
    }
}

fn min_k_with(
    sys: &SystemModel,
    s: usize,
    output: Option<&DMatrix<f64>>,
    max_k: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<MinKOutcome> {
    let mut meter = Meter::new(budget);
    for k in 1..=max_k {
        match search_length(sys, s, k, output, &mut meter, tol)? {
            SearchOutcome::Found(witness) => return Ok(MinKOutcome::Found { k, witness }),
            SearchOutcome::NotFound => {}
            SearchOutcome::Inconclusive => return Ok(MinKOutcome::Inconclusive { reached_k: k }),
        }
    }
    Ok(MinKOutcome::NotFound { max_k })
}

/// Smallest `K` admitting a full-rank schedule, searched upwards from 1.
pub fn exact_min_k(sys: &SystemModel, s: usize, budget: &OracleBudget, tol: &Tolerance) -> Result<MinKOutcome> {
    sys.check_sparsity(s)?;
    let max_k = match budget.max_k {
        Some(k) => k,
        None => default_max_k(sys, s, tol)?,
    };
    min_k_with(sys, s, None, max_k, budget, tol)
}

/// Output analogue of [`exact_min_k`]; without an explicit `max_k` the
/// search runs to `N * ceil(L/s)`.
pub fn output_exact_min_k(
    sys: &SystemModel,
    s: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<MinKOutcome> {
    let a = sys.output_matrix()?.as_inner().clone();
    sys.check_sparsity(s)?;
    let max_k = budget.max_k.unwrap_or(sys.n() * sys.l().div_ceil(s));
    min_k_with(sys, s, Some(&a), max_k, budget, tol)
}

/// Smallest `K` for which some fixed support `S`, `|S| = s`, gives
/// `rank [D^{K-1} H_S ... H_S] = N`.
pub fn common_support_min_k(
    sys: &SystemModel,
    s: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<MinKOutcome> {
    sys.check_sparsity(s)?;
    let max_k = budget.max_k.unwrap_or(sys.n());
    let mut meter = Meter::new(budget);
    let (d, h) = (sys.d().as_inner(), sys.h().as_inner());
    let reference = h.norm();
    for k in 1..=max_k {
        for support in Combinations::new(sys.l(), s) {
            if !meter.tick() {
                return Ok(MinKOutcome::Inconclusive { reached_k: k });
            }
            let m = krylov_blocks(d, &select_columns(h, &support), k);
            if rank_against(&m, reference, tol) == sys.n() {
                let witness = SupportSchedule::new(alloc::vec![support; k], s, sys.l())?;
                return Ok(MinKOutcome::Found { k, witness });
            }
        }
    }
    Ok(MinKOutcome::NotFound { max_k })
}

/// `R*_(K)` for `K = 1..=k_max`: the largest rank any schedule of length `K`
/// achieves. Errors with [`Error::BudgetExceeded`] if the budget runs out.
pub fn rstar_sequence(
    sys: &SystemModel,
    s: usize,
    k_max: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<Vec<usize>> {
    sys.check_sparsity(s)?;
    let mut meter = Meter::new(budget);
    let subsets: Vec<Vec<usize>> = Combinations::new(sys.l(), s).collect();
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let pool = Pool::build(sys, k, s, None);
        let suffix = suffix_sums(&pool.capacities(s, tol));
        let mut best = 0;
        let mut span = pool.span(tol);
        if !max_rank(&pool, &subsets, &suffix, 0, &mut span, &mut best, &mut meter) {
            return Err(Error::BudgetExceeded);
        }
        out.push(best);
    }
    Ok(out)
}

/// Branch and bound for the maximal rank; false when the budget ran out.
fn max_rank(
    pool: &Pool,
    subsets: &[Vec<usize>],
    suffix: &[usize],
    step: usize,
    span: &mut Span,
    best: &mut usize,
    meter: &mut Meter,
) -> bool {
    let rank = span.rank();
    if rank > *best {
        *best = rank;
    }
    let ceiling = suffix[0].min(pool.target);
    if *best >= ceiling || step == pool.columns.len() || rank + suffix[step] <= *best {
        return true;
    }
    for subset in subsets {
        if !meter.tick() {
            return false;
        }
        let mark = span.rank();
        for &j in subset {
            span.try_add(&pool.columns[step][j]);
        }
        let ok = max_rank(pool, subsets, suffix, step + 1, span, best, meter);
        span.truncate(mark);
        if !ok {
            return false;
        }
        if *best >= ceiling {
            break;
        }
    }
    true
}

/// `ceil(L/s)` supports of exactly `s` consecutive indices covering `0..L`;
/// the last one is shifted back to end at `L - 1`.
pub fn partition_schedule(l: usize, s: usize) -> Result<SupportSchedule> {
    if s == 0 || s > l {
        return Err(Error::SparsityOutOfRange { s, inputs: l });
    }
    let supports = (0..l.div_ceil(s))
        .map(|i| {
            let start = (i * s).min(l - s);
            (start..start + s).collect()
        })
        .collect();
    SupportSchedule::new(supports, s, l)
}
