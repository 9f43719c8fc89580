//! Constructive steering with sparse inputs: pick a support schedule, solve
//! for the minimum-norm inputs on it and roll the system forward.
//!
//! An unreachable target is not an error; the plan reports the residual.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matcore::span::{norm, Span};
use crate::matcore::{power_blocks, rank_against, Tolerance};
use crate::oracle::{kalman_type_rank_test, schedule_submatrix, OracleBudget, SearchOutcome, SupportSchedule};
use crate::system::SystemModel;

#[derive(Clone, Debug, PartialEq)]
pub struct SteeringPlan {
    pub schedule: SupportSchedule,
    /// `h_1..h_K`, each of length `L` and zero off its support.
    pub inputs: Vec<Vec<f64>>,
    /// Distance between the target and the state (or output) reached.
    pub residual: f64,
    /// `x_0..x_K`.
    pub trajectory: Vec<Vec<f64>>,
}

impl SteeringPlan {
    pub fn final_state(&self) -> &[f64] {
        self.trajectory.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Where a schedule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleSource {
    Greedy,
    Oracle,
}

impl ScheduleSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleSource::Greedy => "greedy",
            ScheduleSource::Oracle => "oracle",
        }
    }
}

/// Builds the schedule from the last step backwards: for step `i = K..1`
/// take the lowest-indexed columns of `D^{K-i} H` that raise the rank of
/// what has been collected so far, then pad the support to `s` indices with
/// the lowest unused ones. Once rank `N` is reached the earlier supports
/// stay empty.
pub fn greedy_support_schedule(sys: &SystemModel, s: usize, k: usize, tol: &Tolerance) -> Result<SupportSchedule> {
    sys.check_sparsity(s)?;
    let n = sys.n();
    let blocks = power_blocks(sys.d().as_inner(), sys.h().as_inner(), k.max(1));
    let scale = blocks.iter().map(|b| b.norm()).fold(0.0_f64, f64::max);
    let mut span = Span::new(n, scale, k * s, tol);
    let mut supports = alloc::vec![Vec::new(); k];
    for step in (0..k).rev() {
        if span.rank() == n {
            break;
        }
        let block = &blocks[k - 1 - step];
        let mut set = Vec::with_capacity(s);
        for j in 0..sys.l() {
            if set.len() == s || span.rank() == n {
                break;
            }
            let col: Vec<f64> = block.column(j).iter().copied().collect();
            if span.try_add(&col) {
                set.push(j);
            }
        }
        let mut j = 0;
        while set.len() < s {
            if !set.contains(&j) {
                set.push(j);
            }
            j += 1;
        }
        supports[step] = set;
    }
    SupportSchedule::new(supports, s, sys.l())
}

/// Greedy schedule if it reaches full rank, otherwise the oracle's witness
/// of length `k` when one exists within `budget`. Falls back to the greedy
/// schedule.
pub fn plan_schedule(
    sys: &SystemModel,
    s: usize,
    k: usize,
    budget: &OracleBudget,
    tol: &Tolerance,
) -> Result<(SupportSchedule, ScheduleSource)> {
    let greedy = greedy_support_schedule(sys, s, k, tol)?;
    let reference = max_column_norm(sys.h().as_inner());
    if k == 0 || rank_against(&schedule_submatrix(sys, &greedy)?, reference, tol) == sys.n() {
        return Ok((greedy, ScheduleSource::Greedy));
    }
    match kalman_type_rank_test(sys, s, k, budget, tol)? {
        SearchOutcome::Found(witness) => Ok((witness, ScheduleSource::Oracle)),
        _ => Ok((greedy, ScheduleSource::Greedy)),
    }
}

fn check_vector(v: &[f64], expected: usize) -> Result<DVector<f64>> {
    if v.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: v.len(),
        });
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(DVector::from_column_slice(v))
}

/// Minimum-norm least-squares solution of `m z = b`, discarding singular
/// values at or below the rank threshold taken against
/// `max(sigma_max, reference)`.
fn min_norm_solve(m: &DMatrix<f64>, b: &DVector<f64>, reference: f64, tol: &Tolerance) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = crate::matcore::svd_of(m);
    let sigma_max = svd.singular_values.iter().copied().fold(reference, f64::max);
    if sigma_max == 0.0 {
        return DVector::zeros(m.ncols());
    }
    let eps = tol.rank_threshold(sigma_max, m.nrows(), m.ncols());
    svd.solve(b, eps).expect("u and v_t were requested")
}

fn max_column_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn spread_inputs(sys: &SystemModel, schedule: &SupportSchedule, z: &DVector<f64>) -> Vec<Vec<f64>> {
    let mut next = 0;
    schedule
        .supports()
        .iter()
        .map(|set| {
            let mut h = alloc::vec![0.0; sys.l()];
            for &j in set {
                h[j] = z[next];
                next += 1;
            }
            h
        })
        .collect()
}

fn d_power_times(sys: &SystemModel, x: &DVector<f64>, k: usize) -> DVector<f64> {
    let mut out = x.clone();
    for _ in 0..k {
        out = sys.d().as_inner() * out;
    }
    out
}

/// `x_k = D x_{k-1} + H h_k` from `x_init`. Returns `x_0..x_K`.
pub fn rollout(sys: &SystemModel, inputs: &[Vec<f64>], x_init: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut x = check_vector(x_init, sys.n())?;
    let mut out = Vec::with_capacity(inputs.len() + 1);
    out.push(x.as_slice().to_vec());
    for h in inputs {
        let h = check_vector(h, sys.l())?;
        x = sys.d().as_inner() * x + sys.h().as_inner() * h;
        out.push(x.as_slice().to_vec());
    }
    Ok(out)
}

/// Steers `x_init` towards `x_final` in `schedule.len()` steps using only
/// the scheduled inputs.
pub fn solve_inputs(
    sys: &SystemModel,
    schedule: &SupportSchedule,
    x_init: &[f64],
    x_final: &[f64],
    tol: &Tolerance,
) -> Result<SteeringPlan> {
    let x0 = check_vector(x_init, sys.n())?;
    let target = check_vector(x_final, sys.n())?;
    let m = schedule_submatrix(sys, schedule)?;
    let b = &target - d_power_times(sys, &x0, schedule.len());
    let z = min_norm_solve(&m, &b, max_column_norm(sys.h().as_inner()), tol);
    finish(sys, schedule, &z, x_init, |x| (DVector::from_column_slice(x) - &target).norm())
}

/// Output analogue: steers `A x_K` towards `y_final`.
pub fn solve_output_inputs(
    sys: &SystemModel,
    schedule: &SupportSchedule,
    x_init: &[f64],
    y_final: &[f64],
    tol: &Tolerance,
) -> Result<SteeringPlan> {
    let a = sys.output_matrix()?.as_inner().clone();
    let x0 = check_vector(x_init, sys.n())?;
    let target = check_vector(y_final, a.nrows())?;
    let m = &a * schedule_submatrix(sys, schedule)?;
    let b = &target - &a * d_power_times(sys, &x0, schedule.len());
    let z = min_norm_solve(&m, &b, a.norm() * max_column_norm(sys.h().as_inner()), tol);
    finish(sys, schedule, &z, x_init, |x| (&a * DVector::from_column_slice(x) - &target).norm())
}

fn finish(
    sys: &SystemModel,
    schedule: &SupportSchedule,
    z: &DVector<f64>,
    x_init: &[f64],
    miss: impl Fn(&[f64]) -> f64,
) -> Result<SteeringPlan> {
    let inputs = spread_inputs(sys, schedule, z);
    let trajectory = rollout(sys, &inputs, x_init)?;
    let residual = miss(trajectory.last().expect("trajectory holds x_0"));
    Ok(SteeringPlan {
        schedule: schedule.clone(),
        inputs,
        residual,
        trajectory,
    })
}

/// Largest per-step deviation from `x_k = D x_{k-1} + H h_k`.
pub fn dynamics_defect(sys: &SystemModel, plan: &SteeringPlan) -> f64 {
    let mut worst = 0.0_f64;
    for (k, h) in plan.inputs.iter().enumerate() {
        let prev = DVector::from_column_slice(&plan.trajectory[k]);
        let next = DVector::from_column_slice(&plan.trajectory[k + 1]);
        let h = DVector::from_column_slice(h);
        let diff = next - sys.d().as_inner() * prev - sys.h().as_inner() * h;
        worst = worst.max(norm(diff.as_slice()));
    }
    worst
}
