//! Randomised cross-checks between the algebraic tests and brute force.
//!
//! The brute-force side is deliberately independent of the library: integer
//! matrices, explicit enumeration and fraction-free elimination over i128.

use proptest::prelude::*;
use sparse_ctrb::bounds::{kstar_bounds_sparse, kstar_bounds_unconstrained};
use sparse_ctrb::ctrb::{
    common_support_test, kalman_test, output_sparse_necessary, pbh_test, sparse_pbh_test,
};
use sparse_ctrb::decomp::{standard_form, transform_system, verify_standard_form};
use sparse_ctrb::oracle::{
    exact_min_k, kalman_type_rank_test, output_kalman_type_rank_test, rstar_sequence, schedule_submatrix,
    OracleBudget,
};
use sparse_ctrb::steer::{greedy_support_schedule, rollout, solve_inputs};
use sparse_ctrb::{Matrix, SystemModel, Tolerance};

type IMat = Vec<Vec<i128>>;

/// Rank by Bareiss elimination; exact for integer input.
fn int_rank(m: &IMat) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let (mut rank, mut prev) = (0, 1i128);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                a[r][k] = (a[rank][c] * a[r][k] - a[r][c] * a[rank][k]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn subsets(l: usize, s: usize) -> Vec<Vec<usize>> {
    (0u32..1 << l)
        .filter(|m| m.count_ones() as usize == s)
        .map(|m| (0..l).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Does some schedule of `k` size-`s` supports give rank N (for the rows
/// `a * ...`, if given)? Plain enumeration of every schedule.
fn brute_force(d: &IMat, h: &IMat, a: Option<&IMat>, s: usize, k: usize) -> bool {
    let n = d.len();
    let l = h[0].len();
    let mut powers = vec![identity(n)];
    for _ in 1..k {
        powers.push(mul(&powers[powers.len() - 1], d));
    }
    let blocks: Vec<IMat> = (0..k)
        .map(|i| {
            let b = mul(&powers[k - 1 - i], h);
            match a {
                Some(a) => mul(a, &b),
                None => b,
            }
        })
        .collect();
    let target = blocks[0].len();
    let sets = subsets(l, s);
    let total = sets.len().pow(k as u32);
    (0..total).any(|mut code| {
        let mut m: IMat = vec![Vec::new(); target];
        for block in &blocks {
            let set = &sets[code % sets.len()];
            code /= sets.len();
            for (row, out) in block.iter().zip(m.iter_mut()) {
                out.extend(set.iter().map(|&j| row[j]));
            }
        }
        int_rank(&m) == target
    })
}

fn to_f64(m: &IMat) -> Matrix {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    Matrix::from_rows(&rows).unwrap()
}

fn int_matrix(rows: usize, cols: usize, lo: i128, hi: i128) -> impl Strategy<Value = IMat> {
    prop::collection::vec(prop::collection::vec(lo..=hi, cols), rows)
}

prop_compose! {
    fn small_system()(n in 2usize..=3, l in 1usize..=3)
        (d in int_matrix(n, n, -2, 2), h in int_matrix(n, l, -1, 1), s in 1..=l) -> (IMat, IMat, usize) {
        (d, h, s)
    }
}

prop_compose! {
    fn output_system()(n in 2usize..=3, l in 1usize..=2, m in 1usize..=2)
        (d in int_matrix(n, n, -1, 1), h in int_matrix(n, l, -1, 1), a in int_matrix(m, n, -1, 1), s in 1..=l)
        -> (IMat, IMat, IMat, usize) {
        (d, h, a, s)
    }
}

fn model(d: &IMat, h: &IMat) -> SystemModel {
    SystemModel::state_only(to_f64(d), to_f64(h)).unwrap()
}

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pruned_search_matches_enumeration((d, h, s) in small_system(), k in 1usize..=3) {
        let sys = model(&d, &h);
        let expected = brute_force(&d, &h, None, s, k);
        for t in [tol(), tol().with_exact(true)] {
            let got = kalman_type_rank_test(&sys, s, k, &OracleBudget::default(), &t).unwrap();
            prop_assert_eq!(got.is_found(), expected);
        }
    }

    #[test]
    fn sparse_test_matches_enumeration((d, h, s) in small_system()) {
        // A full-rank schedule of length N * ceil(L/s) exists whenever any does.
        let n = d.len();
        let l = h[0].len();
        let expected = brute_force(&d, &h, None, s, n * l.div_ceil(s));
        prop_assert_eq!(sparse_pbh_test(&model(&d, &h), s, &tol()).unwrap().verdict, expected);
    }

    #[test]
    fn pbh_matches_integer_kalman((d, h, _s) in small_system()) {
        let n = d.len();
        let expected = brute_force(&d, &h, None, h[0].len(), n);
        let sys = model(&d, &h);
        prop_assert_eq!(pbh_test(&sys, &tol()).verdict, expected);
        prop_assert_eq!(kalman_test(&sys, &tol()), expected);
    }

    #[test]
    fn sparse_verdict_is_monotone_in_s((d, h, _s) in small_system()) {
        let sys = model(&d, &h);
        let verdicts: Vec<bool> = (1..=sys.l())
            .map(|s| sparse_pbh_test(&sys, s, &tol()).unwrap().verdict)
            .collect();
        prop_assert!(verdicts.windows(2).all(|w| !w[0] || w[1]));
    }

    #[test]
    fn common_support_matches_enumeration((d, h, s) in small_system()) {
        let n = d.len();
        let l = h[0].len();
        let sys = model(&d, &h);
        let expected = subsets(l, s).iter().any(|set| {
            let hs: IMat = h.iter().map(|row| set.iter().map(|&j| row[j]).collect()).collect();
            brute_force(&d, &hs, None, set.len(), n)
        });
        let report = common_support_test(&sys, s, &tol()).unwrap();
        prop_assert_eq!(report.verdict, expected);
        if report.verdict {
            prop_assert!(sparse_pbh_test(&sys, s, &tol()).unwrap().verdict);
        }
    }

    #[test]
    fn bounds_contain_minimum((d, h, s) in small_system()) {
        let sys = model(&d, &h);
        let n = d.len();
        let l = h[0].len();
        if let Ok(b) = kstar_bounds_sparse(&sys, s, &tol()) {
            let k = (1..=n * l.div_ceil(s)).find(|&k| brute_force(&d, &h, None, s, k));
            prop_assert!(k.is_some(), "bounds {:?} for a system with no full-rank schedule", b);
            let k = k.unwrap();
            prop_assert!(b.lower <= k && k <= b.upper, "K*={} not in [{}, {}]", k, b.lower, b.upper);
        }
        if let Ok(b) = kstar_bounds_unconstrained(&sys, &tol()) {
            let k = (1..=n).find(|&k| brute_force(&d, &h, None, l, k));
            prop_assert!(k.is_some(), "bounds {:?} for an uncontrollable system", b);
            let k = k.unwrap();
            prop_assert!(b.lower <= k && k <= b.upper);
        }
    }

    #[test]
    fn exact_min_k_is_minimal((d, h, s) in small_system()) {
        let sys = model(&d, &h);
        if let Some(k) = exact_min_k(&sys, s, &OracleBudget::default(), &tol()).unwrap().k() {
            prop_assert!(brute_force(&d, &h, None, s, k));
            prop_assert!(k == 1 || !brute_force(&d, &h, None, s, k - 1));
        }
    }

    #[test]
    fn rstar_is_nondecreasing_and_capped((d, h, s) in small_system()) {
        let sys = model(&d, &h);
        let seq = rstar_sequence(&sys, s, 4, &OracleBudget::default(), &tol()).unwrap();
        prop_assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(seq.iter().all(|&r| r <= sys.n()));
        prop_assert!(seq[0] <= s);
    }

    #[test]
    fn output_necessary_condition_is_necessary((d, h, a, s) in output_system()) {
        let sys = SystemModel::new(to_f64(&d), to_f64(&h), Some(to_f64(&a))).unwrap();
        let n = d.len();
        let reachable = brute_force(&d, &h, Some(&a), s, n * h[0].len().div_ceil(s));
        let oracle = output_kalman_type_rank_test(&sys, s, n * h[0].len().div_ceil(s), &OracleBudget::default(), &tol())
            .unwrap()
            .is_found();
        prop_assert_eq!(oracle, reachable);
        if reachable {
            prop_assert!(output_sparse_necessary(&sys, s, &tol()).unwrap());
        }
    }

    #[test]
    fn greedy_success_implies_oracle_success((d, h, s) in small_system(), k in 1usize..=3) {
        let sys = model(&d, &h);
        let sched = greedy_support_schedule(&sys, s, k, &tol()).unwrap();
        let m = schedule_submatrix(&sys, &sched).unwrap();
        let rank = m.clone().svd(false, false).rank(1e-9 * m.norm().max(1.0));
        if rank == sys.n() {
            prop_assert!(brute_force(&d, &h, None, s, k));
        }
    }

    #[test]
    fn rollout_endpoint_matches_residual(
        (d, h, s) in small_system(),
        k in 0usize..=3,
        x0 in prop::collection::vec(-3.0f64..3.0, 3),
        xf in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let sys = model(&d, &h);
        let n = sys.n();
        let sched = greedy_support_schedule(&sys, s, k, &tol()).unwrap();
        let plan = solve_inputs(&sys, &sched, &x0[..n], &xf[..n], &tol()).unwrap();
        let traj = rollout(&sys, &plan.inputs, &x0[..n]).unwrap();
        let miss = traj[k].iter().zip(&xf[..n]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!((miss - plan.residual).abs() <= 1e-8);
        for (h_i, set) in plan.inputs.iter().zip(sched.supports()) {
            prop_assert!(h_i.iter().enumerate().all(|(j, v)| *v == 0.0 || set.contains(&j)));
        }
    }

    #[test]
    fn decomposition_is_idempotent_and_verifies((d, h, s) in small_system()) {
        let sys = model(&d, &h);
        let res = standard_form(&sys, s, &tol()).unwrap();
        let v = verify_standard_form(&sys, &res, &tol()).unwrap();
        prop_assert!(v.similarity.passed && v.zero_blocks.passed && v.input_free_tail.passed);
        let again = SystemModel::state_only(res.d_bar.clone(), res.h_bar.clone()).unwrap();
        let res2 = standard_form(&again, s, &tol()).unwrap();
        prop_assert_eq!((res2.r_ctrl, res2.r_core, res2.r_s), (res.r_ctrl, res.r_core, res.r_s));
    }

    #[test]
    fn uncontrollable_block_evolves_without_input(
        (d, h, s) in small_system(),
        inputs in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 4),
        x0 in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let sys = model(&d, &h);
        let res = standard_form(&sys, s, &tol()).unwrap();
        let (n, big_r) = (sys.n(), res.r_ctrl);
        let moved = SystemModel::state_only(res.d_bar.clone(), res.h_bar.clone()).unwrap();
        let inputs: Vec<Vec<f64>> = inputs.iter().map(|u| u[..sys.l()].to_vec()).collect();
        let traj = rollout(&moved, &inputs, &x0[..n]).unwrap();
        let d3 = res.d_bar.as_inner().view((big_r, big_r), (n - big_r, n - big_r)).clone_owned();
        for w in traj.windows(2) {
            let prev = nalgebra_vec(&w[0][big_r..]);
            let next = nalgebra_vec(&w[1][big_r..]);
            prop_assert!((next - &d3 * prev).norm() <= 1e-8 * (1.0 + w[0].iter().map(|x| x.abs()).sum::<f64>()));
        }
    }

    #[test]
    fn similarity_preserves_output_verdicts((d, h, a, s) in output_system(), t in int_matrix(3, 3, -2, 2)) {
        let sys = SystemModel::new(to_f64(&d), to_f64(&h), Some(to_f64(&a))).unwrap();
        let n = sys.n();
        let mut t: IMat = t.into_iter().take(n).map(|row| row.into_iter().take(n).collect()).collect();
        for (i, row) in t.iter_mut().enumerate() {
            row[i] += 5;
        }
        prop_assume!(int_rank(&t) == n);
        let moved = transform_system(&sys, &to_f64(&t)).unwrap();
        prop_assert_eq!(
            output_sparse_necessary(&moved, s, &tol()).unwrap(),
            output_sparse_necessary(&sys, s, &tol()).unwrap()
        );
        let k = n * sys.l().div_ceil(s);
        let before = output_kalman_type_rank_test(&sys, s, k, &OracleBudget::default(), &tol()).unwrap();
        let after = output_kalman_type_rank_test(&moved, s, k, &OracleBudget::default(), &tol()).unwrap();
        prop_assert_eq!(before.is_found(), after.is_found());
    }
}

fn nalgebra_vec(v: &[f64]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(v)
}
