//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails when a criterion's outcome differs from its expectation in
//! [`EXPECTED_FAIL`].

use std::f64::consts::{LN_2, PI};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use trigapprox::approx::{best_mterm, fourier_sum_error};
use trigapprox::extremal::{build_fstar, check_psi_n_monotone, compute_a, lower_bound_value, verify_membership};
use trigapprox::psi::DEFAULT_T_MAX;
use trigapprox::{classify, ClassParams, Evidence, NormIndex, PsiFunction, Strategy, TrigPoly};
use trigapprox_harness::config::ExperimentConfig;
use trigapprox_harness::experiments::run_chain_experiment_with;
use trigapprox_harness::sampling::{class_samples, generator, unit};

const EXTREMAL_L2_TOL: f64 = 1e-9;
const SANDWICH_RATIO_MAX: f64 = 1e3;
const FOURIER_SPREAD_MAX: f64 = 50.0;
const CLOSED_FORM_TOL: f64 = 1e-9;
const TAIL_TOL: f64 = 1e-10;

/// Criteria known to fail, with the reason.
///
/// 1: at n = 1 the constant coefficient of f* is smaller than the one the
/// identity is built on, so the L₂ error sits below the formula.
const EXPECTED_FAIL: &[usize] = &[1];

const NORMS: [NormIndex; 3] = [NormIndex::ONE, NormIndex::TWO, NormIndex::Infinity];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exp_power(alpha: f64, r: f64) -> PsiFunction {
    PsiFunction::exp_power(alpha, r).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn extremal_l2_identity() -> Outcome {
    let psi = exp_power(1.0, 1.0);
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        let fs = build_fstar(&psi, n).unwrap();
        let want = (2.0 * PI).sqrt() * lower_bound_value(&fs);
        let mut strategies = vec![Strategy::Greedy];
        if n <= 3 {
            strategies.push(Strategy::Exhaustive);
        }
        for strategy in strategies {
            let got = best_mterm(&fs.poly, 2 * n, NormIndex::TWO, strategy).unwrap().error;
            let err = rel(got, want);
            worst = worst.max(err);
            if err > EXTREMAL_L2_TOL {
                bad.push(format!("n={n} {strategy}: rel {err:.2e}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("worst rel {worst:.2e}, tol {EXTREMAL_L2_TOL:.0e}; off: [{}]", bad.join(", ")))
}

fn certificate_sandwich() -> Outcome {
    let mut bad = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for psi in [exp_power(1.0, 1.0), exp_power(0.5, 2.0)] {
        for n in 2..=8 {
            let fs = build_fstar(&psi, n).unwrap();
            let lb = lower_bound_value(&fs);
            for s in NORMS {
                let r = best_mterm(&fs.poly, 2 * n, s, Strategy::GreedySwap).unwrap();
                let cert = r.certificate.unwrap_or(0.0);
                let ratio = r.error / cert;
                max_ratio = max_ratio.max(ratio);
                if lb > r.error || !(ratio <= SANDWICH_RATIO_MAX) {
                    bad.push(format!("{psi} n={n} s={s}: lb {lb:.3e} err {:.3e} ratio {ratio:.2e}", r.error));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("max error/certificate {max_ratio:.2e} (<= {SANDWICH_RATIO_MAX:.0e}); off: [{}]", bad.join(", ")))
}

fn chain_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(exp_power(1.0, 1.0));
    cfg.class.beta = 0.5;
    cfg.class.p = NormIndex::TWO;
    cfg.class.sample_degree = 8;
    cfg.experiment.n_min = 2;
    cfg.experiment.n_max = 6;
    cfg.experiment.seed = 20;
    cfg.experiment.sample_count = 50;
    cfg.experiment.strategies = vec![Strategy::Greedy];
    cfg.chain.s_values = NORMS.to_vec();
    cfg
}

fn chain() -> Outcome {
    let r = run_chain_experiment_with(&chain_config(), None).unwrap();
    let first = r.violations.first().map(|v| format!("{v:?}")).unwrap_or_default();
    outcome(r.passed(), format!("{} rows, {} violations {first}", r.checked, r.violations.len()))
}

fn fourier_sum_order() -> Outcome {
    let psi = exp_power(1.0, 1.0);
    let mut worst: f64 = 0.0;
    for s in NORMS {
        let params = ClassParams { psi, beta: 0.5, p: s };
        for f in class_samples(&params, 32, 4, 20).unwrap() {
            let ratios: Vec<f64> =
                (4..=24).map(|n| fourier_sum_error(&f, n, s) / psi.eval(n as f64).unwrap()).collect();
            let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi / lo);
        }
    }
    outcome(worst <= FOURIER_SPREAD_MAX, format!("worst max/min spread {worst:.2} (<= {FOURIER_SPREAD_MAX})"))
}

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for (alpha, r) in [(0.5, 1.0), (1.0, 1.0), (3.0, 2.0), (0.25, 1.5)] {
        let psi = exp_power(alpha, r);
        let c = LN_2 / alpha;
        for t in [1.0f64, 1.5, 2.0, 5.0, 10.0, 100.0] {
            let eta = (t.powf(r) + c).powf(1.0 / r);
            let gap = t * ((c / t.powf(r)).ln_1p() / r).exp_m1();
            worst = worst.max(rel(psi.eta(t).unwrap(), eta));
            worst = worst.max(rel(psi.mu(t).unwrap(), t / gap));
        }
        let k0 = (1.0 + c).powf(1.0 / r) - 1.0;
        worst = worst.max(rel(classify(&psi, DEFAULT_T_MAX).unwrap().k0, k0));
    }
    let power_out = [0.5, 1.0, 2.0]
        .iter()
        .all(|&r| classify(&PsiFunction::power(r).unwrap(), DEFAULT_T_MAX).unwrap().membership.in_m_prime_inf == Evidence::No);
    outcome(
        worst <= CLOSED_FORM_TOL && power_out,
        format!("worst rel {worst:.2e} (tol {CLOSED_FORM_TOL:.0e}); power classified out: {power_out}"),
    )
}

fn monotone() -> Outcome {
    let mut bad = Vec::new();
    for alpha in [0.5, 1.0, 3.0] {
        for r in [1.0, 2.0] {
            let psi = exp_power(alpha, r);
            let a = compute_a(psi.analytic_k0().unwrap()).unwrap();
            for n in 1..=16 {
                if !check_psi_n_monotone(&psi, n, a).unwrap().passed {
                    bad.push(format!("{psi} n={n}"));
                }
            }
        }
    }
    let negative_fails = !check_psi_n_monotone(&exp_power(1.0, 1.0), 8, 0.1).unwrap().passed;
    outcome(
        bad.is_empty() && negative_fails,
        format!("6 generators x n<=16; A=0.1 rejected: {negative_fails}; off: [{}]", bad.join(", ")),
    )
}

fn membership() -> Outcome {
    let mut bad = Vec::new();
    let mut max_norm: f64 = 0.0;
    for psi in [exp_power(1.0, 1.0), exp_power(0.5, 2.0)] {
        for n in [1, 2, 5, 10] {
            let fs = build_fstar(&psi, n).unwrap();
            for beta in [0.0, 1.0, 2.5] {
                for p in NORMS {
                    let r = verify_membership(&fs, beta, p);
                    max_norm = max_norm.max(r.norm);
                    if !r.passed {
                        bad.push(format!("{psi} n={n} beta={beta} p={p}: {:.3e}", r.norm));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("max derivative norm {max_norm:.3e}; off: [{}]", bad.join(", ")))
}

fn sorted_tail(f: &TrigPoly, m: usize) -> f64 {
    let mut mags: Vec<f64> = f.coeffs().iter().map(|c| c.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let keep = mags.len().saturating_sub(m);
    // two-pass scaling keeps tiny tails out of the subnormal range
    let big = mags[..keep].iter().cloned().fold(0.0, f64::max);
    if big == 0.0 {
        return 0.0;
    }
    big * (2.0 * PI * mags[..keep].iter().map(|x| (x / big).powi(2)).sum::<f64>()).sqrt()
}

fn exhaustive_oracle() -> Outcome {
    let mut rng = generator(8);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..100 {
        let degree = (unit(&mut rng) * 8.0) as usize;
        let f = TrigPoly::from_fn(degree, |_| {
            let re = 2.0 * unit(&mut rng) - 1.0;
            let im = 2.0 * unit(&mut rng) - 1.0;
            Complex64::new(re, im)
        })
        .unwrap();
        let m = 1 + (unit(&mut rng) * (2 * degree + 1) as f64) as usize;
        let got = best_mterm(&f, m, NormIndex::TWO, Strategy::Exhaustive).unwrap().error;
        let want = sorted_tail(&f, m);
        let err = if want == 0.0 { got } else { rel(got, want) };
        worst = worst.max(err);
        if err > TAIL_TOL {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("worst rel {worst:.2e} (tol {TAIL_TOL:.0e}), {bad} off"))
}

fn orders_bytes(dir: &PathBuf, workers: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trigapprox"));
    cmd.stderr(Stdio::null()).args(["orders", "--config"]).arg(dir.join("run.toml")).arg("--out").arg(dir.join(workers.unwrap_or("default")));
    match workers {
        Some(w) => cmd.env("TRIGAPPROX_WORKERS", w),
        None => cmd.env_remove("TRIGAPPROX_WORKERS"),
    };
    let status = cmd.status().expect("run trigapprox");
    assert_eq!(status.code(), Some(0), "orders with workers {workers:?}");
    std::fs::read(dir.join(workers.unwrap_or("default")).join("orders.csv")).unwrap()
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("trigapprox-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut cfg = ExperimentConfig::new(exp_power(1.0, 1.0));
    cfg.class.beta = 1.0;
    cfg.class.p = NormIndex::ONE;
    cfg.class.sample_degree = 8;
    cfg.experiment.s = NormIndex::Infinity;
    cfg.experiment.n_min = 2;
    cfg.experiment.n_max = 4;
    cfg.experiment.seed = 99;
    cfg.experiment.sample_count = 4;
    std::fs::write(dir.join("run.toml"), cfg.to_toml()).unwrap();
    let reference = orders_bytes(&dir, None);
    let same = [Some("1"), Some("2"), Some("4")].into_iter().all(|w| orders_bytes(&dir, w) == reference);
    let again = orders_bytes(&dir, None) == reference;
    let _ = std::fs::remove_dir_all(&dir);
    outcome(same && again && !reference.is_empty(), format!("{} bytes; workers 1/2/4 identical: {same}; rerun identical: {again}", reference.len()))
}

type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "L2 extremal identity", Duration::from_secs(5), extremal_l2_identity),
        (2, "certificate sandwich", Duration::from_secs(60), certificate_sandwich),
        (3, "chain", Duration::from_secs(120), chain),
        (4, "Fourier-sum order", Duration::from_secs(30), fourier_sum_order),
        (5, "psi closed forms", Duration::from_secs(1), closed_forms),
        (6, "monotonicity", Duration::from_secs(1), monotone),
        (7, "membership", Duration::from_secs(5), membership),
        (8, "s=2 exhaustive oracle", Duration::from_secs(30), exhaustive_oracle),
        (9, "determinism", Duration::from_secs(120), determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let passed = o.passed && took <= budget;
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} {id} {name} ({:.2}s, budget {}s): {}", took.as_secs_f64(), budget.as_secs(), o.detail);
        if passed == EXPECTED_FAIL.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("all outcomes as expected (known failures: {EXPECTED_FAIL:?})");
}
