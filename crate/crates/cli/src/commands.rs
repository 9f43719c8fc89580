//! Subcommand definitions and their drivers.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sparse_ctrb::bounds::{
    common_support_kstar_bounds, kstar_bounds_relaxed, kstar_bounds_sparse, kstar_bounds_unconstrained,
    output_kstar_bounds, KStarBounds,
};
use sparse_ctrb::ctrb::{
    common_support_test, output_kalman_test, output_pbh_necessary, output_sparse_analysis, sparse_pbh_test,
};
use sparse_ctrb::decomp::{standard_form, verify_standard_form, Check};
use sparse_ctrb::oracle::{
    common_support_min_k, default_max_k, exact_min_k, output_exact_min_k, MinKOutcome, OracleBudget,
};
use sparse_ctrb::steer::{plan_schedule, solve_inputs, solve_output_inputs};
use sparse_ctrb::{SystemModel, Tolerance};

use crate::report::{self, Report};
use crate::system_file::{load_vector, SystemFile};
use crate::{parse_tolerance, CliError, Status, TOL_ENV};

#[derive(Debug, Parser)]
#[command(name = "sparse-ctrb", version)]
#[command(about = "Controllability of linear systems under input sparsity constraints")]
pub struct Cli {
    /// Rank tolerance `RANK_REL`, or `RANK_REL,EIG_CLUSTER,RESIDUAL_ABS`.
    #[arg(long, global = true, env = TOL_ENV)]
    pub tol: Option<String>,

    /// Exact rational rank decisions; all matrix entries must be integers.
    #[arg(long, global = true)]
    pub rational: bool,

    /// Record wall-clock time in `elapsed_ms` (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// System file (JSON with keys "D", "H", optional "A" and "name").
    pub system: PathBuf,

    /// Maximum number of nonzero entries per input vector.
    #[arg(long, short)]
    pub sparsity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    State,
    Output,
    CommonSupport,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::State => "state",
            Mode::Output => "output",
            Mode::CommonSupport => "common-support",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Sparse,
    Relaxed,
    Unconstrained,
    Output,
    CommonSupport,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide sparse controllability.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "state")]
        output_mode: Mode,
    },
    /// Bounds on the minimum number of sparse input vectors.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "sparse")]
        variant: Variant,
    },
    /// Standard-form decomposition of the state space.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive search for the minimum number of sparse inputs.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Longest schedule tried (defaults to a length that suffices).
        #[arg(long)]
        max_k: Option<usize>,
        /// Maximum number of support choices evaluated.
        #[arg(long, default_value_t = OracleBudget::default().max_enumerations)]
        budget: u64,
        /// Wall-clock limit in milliseconds.
        #[arg(long)]
        deadline_ms: Option<u64>,
        #[arg(long, value_enum, default_value = "state")]
        output_mode: Mode,
    },
    /// Compute sparse inputs steering between two states.
    Steer {
        #[command(flatten)]
        common: Common,
        /// Number of steps.
        #[arg(long)]
        k: usize,
        /// JSON array with the initial state.
        #[arg(long)]
        x_init: PathBuf,
        /// JSON array with the final state (or output with --output-target).
        #[arg(long)]
        x_final: PathBuf,
        /// Treat --x-final as a target for `y = A x`.
        #[arg(long)]
        output_target: bool,
    },
}

pub struct Outcome {
    /// Pretty-printed report for stdout; absent on input errors.
    pub report: Option<String>,
    /// One line for stderr.
    pub summary: String,
    pub status: Status,
}

struct Loaded {
    name: Option<String>,
    sys: SystemModel,
    tol: Tolerance,
    s: usize,
}

fn load(cli: &Cli, common: &Common) -> Result<Loaded, CliError> {
    let file = SystemFile::load(&common.system)?;
    let sys = file.model()?;
    let mut tol = match &cli.tol {
        Some(t) => parse_tolerance(t)?,
        None => Tolerance::default(),
    };
    if cli.rational {
        let integral = sys.d().is_integral() && sys.h().is_integral() && sys.a().is_none_or(|a| a.is_integral());
        if !integral {
            return Err(CliError::Input("--rational requires integer matrix entries".into()));
        }
        tol = tol.with_exact(true);
    }
    if common.sparsity == 0 || common.sparsity > sys.l() {
        return Err(CliError::Input(format!(
            "sparsity must be between 1 and the number of inputs ({}), got {}",
            sys.l(),
            common.sparsity
        )));
    }
    Ok(Loaded {
        name: file.name,
        sys,
        tol,
        s: common.sparsity,
    })
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Check { common, output_mode } => load(cli, common).and_then(|l| check(&l, *output_mode).map(|r| (l, r))),
        Command::Bounds { common, variant } => load(cli, common).and_then(|l| bounds(&l, *variant).map(|r| (l, r))),
        Command::Decompose { common } => load(cli, common).and_then(|l| decompose(&l).map(|r| (l, r))),
        Command::Oracle {
            common,
            max_k,
            budget,
            deadline_ms,
            output_mode,
        } => load(cli, common).and_then(|l| {
            let budget = OracleBudget {
                max_k: *max_k,
                max_enumerations: *budget,
                deadline: deadline_ms.map(Duration::from_millis),
            };
            oracle(&l, &budget, *output_mode).map(|r| (l, r))
        }),
        Command::Steer {
            common,
            k,
            x_init,
            x_final,
            output_target,
        } => load(cli, common).and_then(|l| steer(&l, *k, x_init, x_final, *output_target).map(|r| (l, r))),
    };
    match result {
        Ok((l, done)) => {
            let elapsed = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            let value = done.report.finish(l.name.as_deref(), &l.sys, &l.tol, elapsed);
            Outcome {
                report: Some(serde_json::to_string_pretty(&value).expect("reports serialize")),
                summary: done.summary,
                status: done.status,
            }
        }
        Err(e) => Outcome {
            report: None,
            summary: format!("error: {e}"),
            status: Status::InputError,
        },
    }
}

struct Done {
    report: Report,
    summary: String,
    status: Status,
}

impl Done {
    fn complete(report: Report, summary: String) -> Self {
        Done {
            report,
            summary,
            status: Status::Complete,
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn check(l: &Loaded, mode: Mode) -> Result<Done, CliError> {
    let mut rep = Report::new("check");
    rep.set("sparsity", json!(l.s));
    let summary = match mode {
        Mode::State => {
            let r = sparse_pbh_test(&l.sys, l.s, &l.tol)?;
            rep.set(
                "verdict",
                json!({
                    "mode": mode.as_str(),
                    "holds": r.verdict,
                    "rank_condition_holds": r.rank_condition_holds,
                    "inequality_holds": r.inequality_holds,
                    "rank_d": r.rank_d,
                    "slack": r.slack,
                }),
            );
            if let (Some(lambda), Some(z)) = (r.witness_lambda, &r.witness_z) {
                rep.witnesses(json!({
                    "lambda": report::complex(lambda),
                    "z": z.iter().map(|c| report::complex(*c)).collect::<Vec<_>>(),
                    "residual": r.witness_residual,
                }));
            }
            format!(
                "{}-sparse-controllable: {} (slack {})",
                l.s,
                yes_no(r.verdict),
                r.slack.unwrap_or_default()
            )
        }
        Mode::Output => {
            let kalman = output_kalman_test(&l.sys, &l.tol)?;
            let pbh = output_pbh_necessary(&l.sys, &l.tol)?;
            let r = output_sparse_analysis(&l.sys, l.s, &l.tol)?;
            let open = r.not_disproved();
            rep.set(
                "verdict",
                json!({
                    "mode": mode.as_str(),
                    "holds": if open { Value::Null } else { json!(false) },
                    "status": if open { "not_disproved" } else { "disproved" },
                    "output_controllable": kalman,
                    "pbh_necessary": pbh,
                    "m": r.m,
                    "rank_ad": r.rank_ad,
                    "inequality_holds": r.inequality_holds,
                    "rank_condition_holds": r.rank_condition_holds,
                }),
            );
            rep.warn("the output sparse conditions are necessary only; use the oracle to confirm");
            format!(
                "output {}-sparse-controllability: {}",
                l.s,
                if open { "necessary conditions hold" } else { "disproved" }
            )
        }
        Mode::CommonSupport => {
            let r = common_support_test(&l.sys, l.s, &l.tol)?;
            rep.set(
                "verdict",
                json!({
                    "mode": mode.as_str(),
                    "holds": r.verdict,
                    "screen": {
                        "passed": r.screen.passed,
                        "rank_h": r.screen.rank_h,
                        "max_geometric_multiplicity": r.screen.max_geometric_multiplicity,
                        "nullity_d": r.screen.nullity_d,
                    },
                    "supports_checked": r.supports_checked,
                }),
            );
            if let Some(support) = &r.witness_support {
                rep.witnesses(json!({ "support": support }));
            }
            format!("controllable with a common support of size {}: {}", l.s, yes_no(r.verdict))
        }
    };
    Ok(Done::complete(rep, summary))
}

fn bounds_value(b: &KStarBounds) -> Value {
    json!({
        "variant": b.variant.as_str(),
        "lower": b.lower,
        "upper": b.upper,
        "lower_numerator": b.lower_numerator,
        "lower_denominator": b.lower_denominator,
        "q": b.q,
        "s_star": b.s_star,
        "r_star": b.effective_rank,
    })
}

fn bounds(l: &Loaded, variant: Variant) -> Result<Done, CliError> {
    let b = match variant {
        Variant::Sparse => kstar_bounds_sparse(&l.sys, l.s, &l.tol)?,
        Variant::Relaxed => kstar_bounds_relaxed(&l.sys, l.s, &l.tol)?,
        Variant::Unconstrained => kstar_bounds_unconstrained(&l.sys, &l.tol)?,
        Variant::Output => output_kstar_bounds(&l.sys, l.s, &l.tol)?,
        Variant::CommonSupport => common_support_kstar_bounds(&l.sys, l.s, &l.tol)?,
    };
    let mut rep = Report::new("bounds");
    rep.set("sparsity", json!(l.s)).set("bounds", bounds_value(&b));
    let summary = format!("{} bounds: {} <= K* <= {}", b.variant.as_str(), b.lower, b.upper);
    Ok(Done::complete(rep, summary))
}

fn check_value(c: &Check) -> Value {
    json!({ "passed": c.passed, "residual": c.residual })
}

fn decompose(l: &Loaded) -> Result<Done, CliError> {
    let res = standard_form(&l.sys, l.s, &l.tol)?;
    let v = verify_standard_form(&l.sys, &res, &l.tol)?;
    let mut rep = Report::new("decompose");
    rep.set("sparsity", json!(l.s)).set(
        "decomposition",
        json!({
            "R": res.r_ctrl,
            "r": res.r_core,
            "R_s": res.r_s,
            "classification": res.classification.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
            "core_rank_mismatch": res.core_rank_mismatch,
            "U": report::matrix(&res.u),
            "W": report::matrix(&res.w),
            "D_bar": report::matrix(&res.d_bar),
            "H_bar": report::matrix(&res.h_bar),
            "verification": {
                "passed": v.passed(),
                "similarity": check_value(&v.similarity),
                "zero_blocks": check_value(&v.zero_blocks),
                "leading_subsystem": check_value(&v.leading_subsystem),
                "input_free_tail": check_value(&v.input_free_tail),
            },
        }),
    );
    if res.core_rank_mismatch {
        rep.warn("the zero eigenvalue of the controllable block is not semisimple; its nilpotent block is not zero");
    }
    let summary = format!(
        "R = {}, r = {}, R_s = {}; verification {}",
        res.r_ctrl,
        res.r_core,
        res.r_s,
        if v.passed() { "passed" } else { "failed" }
    );
    Ok(Done::complete(rep, summary))
}

fn oracle(l: &Loaded, budget: &OracleBudget, mode: Mode) -> Result<Done, CliError> {
    let max_k = match (budget.max_k, mode) {
        (Some(k), _) => k,
        (None, Mode::State) => default_max_k(&l.sys, l.s, &l.tol)?,
        (None, Mode::Output) => l.sys.n() * l.sys.l().div_ceil(l.s),
        (None, Mode::CommonSupport) => l.sys.n(),
    };
    if max_k == 0 {
        return Err(CliError::Input("--max-k must be positive".into()));
    }
    let budget = OracleBudget {
        max_k: Some(max_k),
        ..*budget
    };
    let outcome = match mode {
        Mode::State => exact_min_k(&l.sys, l.s, &budget, &l.tol)?,
        Mode::Output => output_exact_min_k(&l.sys, l.s, &budget, &l.tol)?,
        Mode::CommonSupport => common_support_min_k(&l.sys, l.s, &budget, &l.tol)?,
    };
    let mut rep = Report::new("oracle");
    rep.set("sparsity", json!(l.s));
    let (status, holds, k_star, reached, summary) = match &outcome {
        MinKOutcome::Found { k, witness } => {
            rep.witnesses(json!({ "schedule": witness.supports() }));
            ("found", json!(true), json!(k), Value::Null, format!("K* = {k}"))
        }
        MinKOutcome::NotFound { max_k } => (
            "not_found",
            json!(false),
            Value::Null,
            Value::Null,
            format!("no schedule reaches full rank for K <= {max_k}"),
        ),
        MinKOutcome::Inconclusive { reached_k } => (
            "inconclusive",
            Value::Null,
            Value::Null,
            json!(reached_k),
            format!("budget exhausted while searching K = {reached_k}"),
        ),
    };
    rep.set(
        "oracle",
        json!({
            "mode": mode.as_str(),
            "status": status,
            "holds": holds,
            "k_star": k_star,
            "max_k": max_k,
            "reached_k": reached,
            "max_enumerations": budget.max_enumerations,
        }),
    );
    let status = if matches!(outcome, MinKOutcome::Inconclusive { .. }) {
        Status::Inconclusive
    } else {
        Status::Complete
    };
    Ok(Done {
        report: rep,
        summary,
        status,
    })
}

fn steer(l: &Loaded, k: usize, x_init: &Path, x_final: &Path, output_target: bool) -> Result<Done, CliError> {
    let x0 = load_vector(x_init)?;
    let target = load_vector(x_final)?;
    let (schedule, source) = plan_schedule(&l.sys, l.s, k, &OracleBudget::default(), &l.tol)?;
    let plan = if output_target {
        solve_output_inputs(&l.sys, &schedule, &x0, &target, &l.tol)?
    } else {
        solve_inputs(&l.sys, &schedule, &x0, &target, &l.tol)?
    };
    let scale = 1.0_f64.max(target.iter().map(|x| x * x).sum::<f64>().sqrt());
    let reached = plan.residual <= l.tol.residual_abs * scale;
    let mut rep = Report::new("steer");
    rep.set("sparsity", json!(l.s)).set(
        "plan",
        json!({
            "k": k,
            "output_target": output_target,
            "target": target,
            "schedule": schedule.supports(),
            "schedule_source": source.as_str(),
            "inputs": plan.inputs,
            "trajectory": plan.trajectory,
            "residual": plan.residual,
            "reached": reached,
        }),
    );
    let summary = format!(
        "{} in {k} steps (residual {:.3e})",
        if reached { "target reached" } else { "target not reached" },
        plan.residual
    );
    Ok(Done::complete(rep, summary))
}
