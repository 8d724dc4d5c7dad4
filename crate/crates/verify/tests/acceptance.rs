//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! `cargo test --release -p urn-cli --test acceptance` runs all of them;
//! `cargo test -p urn-cli --test acceptance -- 7 10` runs a subset.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_traits::Zero;
use urn_cli::config::RawConfig;
use urn_cli::{run, Experiment};
use urn_core::exact::{conditional_checks, exact_distribution, verify_drift_bound, Rational};
use urn_core::harness::{
    self, centered_scaled_samples, cf_gap, clt_test, linspace, CltTolerances, SampleSet, Verdict,
};
use urn_core::recursions::{
    beta, cf_recursion, cf_taylor_bound_check, second_moment_recursion, solve_linear_recursion, CfRecursionSpec,
    LinearRecursionSpec,
};
use urn_core::{derive_seed, derived_constants, exact_constants, simulate, DerivedConstants, UrnParams};

const MASTER_SEED: u64 = 42;

const FLOAT_CONSTANT_TOLERANCE: f64 = 1e-12;
const ORACLE_N: u64 = 8;
const ORACLE_REPLICATES: u64 = 100_000;
const PATHWISE_PATHS: u64 = 1000;
const PATHWISE_HORIZON: u64 = 1000;
const GROWTH_HORIZON: u64 = 100_000;
const GROWTH_BAND: f64 = 0.011;
const CLT_N: u64 = 5000;
const CLT_REPLICATES: u64 = 20_000;
const CLT_VARIANCE_BAND: (f64, f64) = (0.68, 0.92);
const CLT_MEAN_TOLERANCE: f64 = 0.02;
const CLT_KS_TOLERANCE: f64 = 0.03;
const CONSTANT_SPEC_N: u64 = 10_000;
const CONSTANT_SPEC_TOLERANCE: f64 = 1e-6;
const SECOND_MOMENT_N: u64 = 100_000;
const RECURSION_TOLERANCE: f64 = 1e-3;
const CONSISTENCY_N: u64 = 1_000_000;
const CF_RECURSION_N: u64 = 100_000;
const CF_RECURSION_TOLERANCE: f64 = 0.02;
const TAYLOR_TOLERANCE: f64 = 1e-12;
const CF_GAP_TOLERANCE: f64 = 0.05;
const LDP_EPSILON: f64 = 0.1;
const LDP_GRID: [u64; 4] = [100, 200, 400, 800];
const LDP_REPLICATES: u64 = 100_000;
const COUPLING_REPLICATES: u64 = 10_000;
const COUPLING_GRID: [u64; 3] = [100, 1000, 10_000];
const LIL_PATHS: u64 = 100;
const LIL_HORIZON: u64 = 100_000;

fn example() -> UrnParams {
    UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap()
}

fn example_constants() -> DerivedConstants {
    derived_constants(&example()).unwrap()
}

fn ratio(n: i64, d: i64) -> Rational {
    format!("{n}/{d}").parse().unwrap()
}

fn t_grid() -> Vec<f64> {
    linspace(-3.0, 3.0, 121)
}

fn clt_sample() -> SampleSet {
    centered_scaled_samples(&example(), CLT_N, CLT_REPLICATES, MASTER_SEED).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn describe(v: &Verdict) -> String {
    format!("{}={:.6}", v.id, v.observed)
}

fn c01_constants() -> Outcome {
    let exact = exact_constants(&example()).unwrap();
    let k = example_constants();
    let exact_ok = exact.gamma == ratio(3, 5)
        && exact.sigma_sq == ratio(4, 25)
        && exact.limit_variance == Some(ratio(4, 5));
    let lv = k.limit_variance.unwrap_or(f64::NAN);
    let float_err = [(k.gamma - 0.6).abs(), (k.sigma_sq - 0.16).abs(), (lv - 0.8).abs()]
        .into_iter()
        .fold(0.0, f64::max);
    outcome(
        exact_ok && float_err <= FLOAT_CONSTANT_TOLERANCE,
        format!(
            "gamma={} sigma^2={} limit_variance={:?} (rational); max float error {float_err:.1e}",
            exact.gamma,
            exact.sigma_sq,
            exact.limit_variance.map(|v| v.to_string())
        ),
    )
}

fn c02_martingale_identity() -> Outcome {
    let sets = [example(), UrnParams::new(2, 2, 3, 0.5, 1, 1).unwrap()];
    let mut states = 0usize;
    let mut nonzero = 0usize;
    for params in &sets {
        for n in 0..=8 {
            let dist = exact_distribution::<Rational>(params, n).unwrap();
            for counts in dist.mass.keys() {
                states += 1;
                if !conditional_checks::<Rational>(params, counts).drift_residual.is_zero() {
                    nonzero += 1;
                }
            }
        }
    }
    outcome(nonzero == 0, format!("{states} reachable states, {nonzero} with nonzero drift residual"))
}

fn c03_oracle_equivalence() -> Outcome {
    let cmp = harness::oracle_vs_monte_carlo(&example(), ORACLE_N, ORACLE_REPLICATES, MASTER_SEED).unwrap();
    let pass = cmp.mean.pass && cmp.variance.pass;
    outcome(
        pass,
        format!(
            "E[Z_8] exact {:.6} mc {:.6} (4se {:.1e}); Var exact {:.6} mc {:.6} (4se {:.1e})",
            cmp.exact_mean,
            cmp.proportion.mean,
            cmp.mean.tolerance,
            cmp.exact_variance,
            cmp.proportion.variance,
            cmp.variance.tolerance
        ),
    )
}

fn c04_pathwise() -> Outcome {
    let sets = [
        example(),
        UrnParams::new(2, 2, 3, 0.5, 1, 1).unwrap(),
        UrnParams::new(1, 10, 1, 0.5, 3, 7).unwrap(),
    ];
    let suite = harness::pathwise_suite(&sets, PATHWISE_PATHS, PATHWISE_HORIZON, MASTER_SEED);
    let total = suite.total();
    outcome(
        suite.verdicts.iter().all(|v| v.pass),
        format!(
            "{} steps; violations sandwich={} drift={} innovation={} identity={} (max identity error {:.1e})",
            total.steps,
            total.total_sandwich,
            total.drift_bound,
            total.innovation_bound,
            total.proportion_identity,
            total.max_identity_error
        ),
    )
}

fn c05_drift_closed_form() -> Outcome {
    let general: Vec<_> = [example(), UrnParams::new(2, 2, 3, 0.5, 1, 1).unwrap()]
        .iter()
        .map(|p| verify_drift_bound::<Rational>(p, 8).unwrap())
        .collect();
    let balanced = verify_drift_bound::<Rational>(&UrnParams::new(1, 2, 3, 0.4, 1, 1).unwrap(), 8).unwrap();
    let matches = general.iter().all(|r| r.max_mismatch.is_zero()) && balanced.max_mismatch.is_zero();
    let zero_when_balanced = balanced.k_empirical == 0.0;
    let states: usize = general.iter().map(|r| r.states).sum::<usize>() + balanced.states;
    outcome(
        matches && zero_when_balanced,
        format!(
            "{states} states, closed form matches enumeration exactly: {matches}; a+b=c gives zero: {zero_when_balanced}"
        ),
    )
}

fn c06_growth() -> Outcome {
    let params = example();
    let k = example_constants();
    let path = simulate(&params, derive_seed(MASTER_SEED, 0), GROWTH_HORIZON, &[GROWTH_HORIZON]).unwrap();
    let end = path.checkpoints[0];
    let v = harness::growth_rate(&params, &k, end.n, end.t);
    let dev = (v.observed - k.lambda).abs();
    outcome(
        dev <= GROWTH_BAND && v.pass,
        format!("T_n/n={:.6}, |dev|={dev:.2e}, band {GROWTH_BAND} (harness band {:.5})", v.observed, v.tolerance),
    )
}

fn c07_clt() -> Outcome {
    let k = example_constants();
    let samples = clt_sample();
    let tol = CltTolerances { mean: CLT_MEAN_TOLERANCE, variance_rel: 0.15, ks: CLT_KS_TOLERANCE };
    let report = clt_test(&samples, &k, &tol).unwrap();
    let var = report.summary.variance;
    let var_ok = (CLT_VARIANCE_BAND.0..=CLT_VARIANCE_BAND.1).contains(&var);
    let mean_ok = report.summary.mean.abs() <= CLT_MEAN_TOLERANCE;
    let ks_ok = report.ks.observed <= CLT_KS_TOLERANCE;
    outcome(
        var_ok && mean_ok && ks_ok,
        format!(
            "variance {var:.4} (se {:.4}) in [{}, {}]: {var_ok}; mean {:.4}: {mean_ok}; ks {:.4}: {ks_ok}",
            report.summary.std_error_variance(),
            CLT_VARIANCE_BAND.0,
            CLT_VARIANCE_BAND.1,
            report.summary.mean,
            report.ks.observed
        ),
    )
}

fn c08_recursions() -> Outcome {
    let spec = LinearRecursionSpec { l: |_| 2.5, q: |_| 5.0, l0: 2.5, q0: 5.0, h1: 10.0 };
    let constant = solve_linear_recursion(&spec, CONSTANT_SPEC_N).unwrap();
    let unit = second_moment_recursion(1.0, 1.0, 1.0, SECOND_MOMENT_N).unwrap();
    let k = example_constants();
    let lv = k.limit_variance.unwrap();
    let slow = second_moment_recursion(k.gamma - 0.5, k.sigma_sq, k.sigma_sq, CONSISTENCY_N).unwrap();
    let extrapolated = slow.extrapolated_limit(k.excess()).unwrap();
    let c1 = constant.final_residual < CONSTANT_SPEC_TOLERANCE;
    let c2 = (unit.final_value - 0.5).abs() <= RECURSION_TOLERANCE;
    let c3 = (extrapolated - lv).abs() <= RECURSION_TOLERANCE;
    outcome(
        c1 && c2 && c3,
        format!(
            "constant spec residual {:.1e}; b(1e5)={:.6}; consistency extrapolated {extrapolated:.6} vs {lv:.6} (raw b(1e6)={:.4})",
            constant.final_residual, unit.final_value, slow.final_value
        ),
    )
}

fn c09_cf_recursion() -> Outcome {
    let k = example_constants();
    let at_zero = beta(k.gamma, k.sigma_sq, 0.0, CF_RECURSION_N).0;
    let cf = cf_recursion(&CfRecursionSpec {
        gamma: 0.6,
        sigma_sq: 0.16,
        t_grid: t_grid(),
        n_steps: CF_RECURSION_N,
    })
    .unwrap();
    let y_grid = linspace(-10.0, 10.0, 2001);
    let worst = (0..=4).map(|n| cf_taylor_bound_check(&y_grid, n).unwrap()).fold(0.0, f64::max);
    let gap_ok = cf.sup_gap <= CF_RECURSION_TOLERANCE;
    outcome(
        at_zero == 1.0 && gap_ok && worst <= TAYLOR_TOLERANCE,
        format!(
            "beta(0)={at_zero}; sup|beta_1e5 - gaussian|={:.4} <= {CF_RECURSION_TOLERANCE}: {gap_ok}; taylor worst excess {worst:.1e}",
            cf.sup_gap
        ),
    )
}

fn c10_cf_gap() -> Outcome {
    let k = example_constants();
    let report = cf_gap(&clt_sample(), &k, &t_grid(), CF_GAP_TOLERANCE).unwrap();
    outcome(
        report.verdict.pass,
        format!(
            "sup|phi - gaussian|={:.4} <= {CF_GAP_TOLERANCE}; sup|phi - beta_N|={:.4}",
            report.sup_gap_gaussian, report.sup_gap_beta
        ),
    )
}

fn c11_ldp() -> Outcome {
    let report = harness::ldp_decay(&example(), LDP_EPSILON, &LDP_GRID, LDP_REPLICATES, MASTER_SEED).unwrap();
    let find = |id: &str| report.verdicts.iter().find(|v| v.id == id).unwrap().clone();
    let (slope, monotone, consistent) = (find("ldp.slope"), find("ldp.non_increasing"), find("ldp.self_consistent"));
    let probs: Vec<String> = report.points.iter().map(|p| format!("{:.2e}", p.probability)).collect();
    outcome(
        slope.pass && monotone.pass,
        format!(
            "P = [{}]; slope {:.3e}; worst rise {:.2} se; self-consistency {}",
            probs.join(", "),
            slope.observed,
            monotone.observed,
            if consistent.pass { "holds" } else { "fails" }
        ),
    )
}

fn c12_coupling() -> Outcome {
    let k = example_constants();
    let report = harness::coupling_l1(&example(), &k, COUPLING_REPLICATES, MASTER_SEED, &COUPLING_GRID).unwrap();
    let deltas: Vec<String> = report.points.iter().map(|p| format!("{:.4}", p.mean_abs_delta)).collect();
    let last = report.points.last().unwrap();
    outcome(
        report.verdicts().iter().all(|v| v.pass),
        format!(
            "E|Delta| = [{}]; |V| violations {} (max {:.3} vs {:.3}); E|D|={:.4} <= {:.3} + 3se",
            deltas.join(", "),
            report.v_violations,
            report.max_abs_v,
            k.cv_bound.sqrt(),
            last.mean_abs_d,
            report.d_bound.target
        ),
    )
}

fn c13_lil() -> Outcome {
    let params = UrnParams::new(1, 10, 1, 0.5, 1, 1).unwrap();
    let k = derived_constants(&params).unwrap();
    let grid = urn_cli::run::log_grid(harness::MIN_LIL_CHECKPOINT, LIL_HORIZON - 1);
    let report = harness::lil_envelope(&params, &k, LIL_PATHS, MASTER_SEED, &grid).unwrap();
    outcome(
        report.below_envelope.pass,
        format!(
            "max statistic {:.4} <= 3*{:.4} = {:.4} (weak sanity band); {}",
            report.max_statistic,
            k.lil_scale.unwrap(),
            report.envelope,
            describe(&report.positive)
        ),
    )
}

fn c14_determinism() -> Outcome {
    let mut texts = Vec::new();
    for workers in [1usize, 8] {
        let config = RawConfig {
            a: Some(1),
            b: Some(3),
            c: Some(2),
            p: Some(0.25),
            experiment: Some(Experiment::Clt),
            horizon: Some(CLT_N),
            replicates: Some(CLT_REPLICATES),
            master_seed: Some(MASTER_SEED),
            workers: Some(workers),
            ..Default::default()
        }
        .finish()
        .unwrap();
        texts.push(run(&config).unwrap().report.deterministic_json());
    }
    let same = texts[0] == texts[1];
    outcome(same, format!("workers 1 vs 8: {} vs {} bytes, identical: {same}", texts[0].len(), texts[1].len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 14] = [
    (1, "constants reproduction", c01_constants),
    (2, "martingale identity", c02_martingale_identity),
    (3, "oracle vs Monte Carlo", c03_oracle_equivalence),
    (4, "pathwise suite", c04_pathwise),
    (5, "drift closed form", c05_drift_closed_form),
    (6, "growth of T_n", c06_growth),
    (7, "CLT at desk scale", c07_clt),
    (8, "recursion solvers", c08_recursions),
    (9, "CF recursion", c09_cf_recursion),
    (10, "empirical CF gap", c10_cf_gap),
    (11, "LDP decay", c11_ldp),
    (12, "coupling", c12_coupling),
    (13, "LIL envelope", c13_lil),
    (14, "determinism", c14_determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.trim_start_matches(['C', 'c']).parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));

    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            outcome(false, format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} C{id:02} {name}: {} [{secs:.1}s]", result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
