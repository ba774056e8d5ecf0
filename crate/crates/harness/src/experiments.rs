//! Order and chain experiments.
//!
//! Work is split into independent cells (one per `n`, or per `(n, s, f)` for
//! the chain) which may run on a worker pool; results are reassembled in cell
//! order, so the output does not depend on scheduling.

use rayon::prelude::*;
use trigapprox::approx::{
    best_mterm_with, chain_check_with, fourier_seeds, fourier_sum_error_with, orthogonal_mterm_with, ApproxError,
    MTermResult, SearchOptions,
};
use trigapprox::extremal::{build_fstar, lower_bound_value, ExtremalError};
use trigapprox::spectral::SpectralError;
use trigapprox::{ClassParams, NormIndex, PsiError, Strategy, TrigPoly};

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{ChainViolation, OrderReport, OrderRow};
use crate::sampling::class_samples;

/// Environment variable selecting the worker count; unset means sequential.
pub const WORKERS_ENV: &str = "TRIGAPPROX_WORKERS";
/// Relative slack of the chain comparisons in report rows.
pub const ROW_TOL: f64 = 1e-7;
/// Relative slack of the certificate comparisons in report rows.
pub const CERT_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Extremal(#[from] ExtremalError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error("worker pool: {0}")]
    Workers(String),
}

impl ExperimentError {
    /// Errors caused by the configuration rather than by the computation.
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_) | ExperimentError::Extremal(ExtremalError::NotAdmissible { .. }))
    }
}

/// Reads [`WORKERS_ENV`].
pub fn workers_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(ConfigError::Invalid(format!("{WORKERS_ENV} = {v:?} is not a positive integer"))),
        },
    }
}

fn map_cells<T, R, F>(cells: Vec<T>, workers: Option<usize>, f: F) -> Result<Vec<R>, ExperimentError>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match workers {
        None | Some(0) | Some(1) => Ok(cells.into_iter().map(f).collect()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| ExperimentError::Workers(e.to_string()))?;
            Ok(pool.install(|| cells.into_par_iter().map(f).collect()))
        }
    }
}

fn search_options(cfg: &ExperimentConfig, strategy: Strategy, seeds: Vec<Vec<i64>>) -> SearchOptions {
    let mut o = SearchOptions::new(strategy).with_seeds(seeds);
    o.enumeration_cap = cfg.experiment.enumeration_cap;
    o.policy = cfg.grids;
    o
}

/// Runs a search, downgrading an exhaustive request over the cap to
/// greedy-swap and recording why.
fn search_with_downgrade(
    run: impl Fn(&SearchOptions) -> Result<MTermResult, ApproxError>,
    opts: SearchOptions,
    what: &str,
    warnings: &mut Vec<String>,
) -> Result<MTermResult, ApproxError> {
    match run(&opts) {
        Err(ApproxError::EnumerationCap { count, cap }) => {
            warnings.push(format!("{what}: exhaustive search needs {count} subsets (cap {cap}); using greedy-swap"));
            let mut o = opts;
            o.strategy = Strategy::GreedySwap;
            run(&o)
        }
        other => other,
    }
}

fn class_params(cfg: &ExperimentConfig) -> ClassParams {
    ClassParams { psi: cfg.psi, beta: cfg.class.beta, p: cfg.class.p }
}

fn samples(cfg: &ExperimentConfig) -> Result<Vec<TrigPoly>, ExperimentError> {
    Ok(class_samples(&class_params(cfg), cfg.class.sample_degree, cfg.experiment.seed, cfg.experiment.sample_count)?)
}

struct OrderCell {
    rows: Vec<OrderRow>,
    warnings: Vec<String>,
    failures: Vec<String>,
}

fn order_cell(cfg: &ExperimentConfig, n: usize, samples: &[TrigPoly]) -> Result<OrderCell, ExperimentError> {
    let s = cfg.experiment.s;
    let fs = build_fstar(&cfg.psi, n)?;
    let lower = lower_bound_value(&fs);
    let psi_n = cfg.psi.eval(n as f64)?;
    let en_fstar = fourier_sum_error_with(&fs.poly, n, s, &cfg.grids);
    let en = samples.iter().map(|f| fourier_sum_error_with(f, n, s, &cfg.grids)).fold(en_fstar, f64::max);

    let mut cell = OrderCell { rows: Vec::with_capacity(2), warnings: Vec::new(), failures: Vec::new() };
    let exhaustive = cfg.experiment.strategies.contains(&Strategy::Exhaustive);
    for m in [2 * n - 1, 2 * n] {
        let what = format!("n={n} m={m}");
        let orth_strategy = if exhaustive { Strategy::Exhaustive } else { Strategy::GreedySwap };
        let orth = search_with_downgrade(
            |o| orthogonal_mterm_with(&fs.poly, m, s, o),
            search_options(cfg, orth_strategy, fourier_seeds(n, m)),
            &format!("{what} orthogonal"),
            &mut cell.warnings,
        )?;
        let mut best: Option<MTermResult> = None;
        for &strategy in &cfg.experiment.strategies {
            let r = search_with_downgrade(
                |o| best_mterm_with(&fs.poly, m, s, o),
                search_options(cfg, strategy, vec![orth.gamma.clone()]),
                &format!("{what} {strategy}"),
                &mut cell.warnings,
            )?;
            if best.as_ref().is_none_or(|b| r.error < b.error) {
                best = Some(r);
            }
        }
        let best = best.expect("strategies is nonempty");
        let certificate = best.certificate.unwrap_or(0.0);
        let row = OrderRow {
            n,
            m,
            psi_n_value: psi_n,
            e_m_upper: best.error,
            e_m_certificate: certificate,
            e_orth_upper: orth.error,
            e_n_value: en,
            ratio_upper: best.error / psi_n,
            ratio_cert: certificate / psi_n,
        };

        let mut fail = |msg: String| cell.failures.push(format!("{what}: {msg}"));
        if certificate > row.e_m_upper * (1.0 + CERT_TOL) {
            fail(format!("certificate {certificate:e} exceeds e_m upper bound {:e}", row.e_m_upper));
        }
        if row.e_m_upper > row.e_orth_upper * (1.0 + ROW_TOL) {
            fail(format!("e_m {:e} exceeds e_orth {:e}", row.e_m_upper, row.e_orth_upper));
        }
        if row.e_orth_upper > en_fstar * (1.0 + ROW_TOL) {
            fail(format!("e_orth {:e} exceeds E_n {en_fstar:e}", row.e_orth_upper));
        }
        if m == 2 * n && lower > row.e_m_upper * (1.0 + CERT_TOL) {
            fail(format!("lower bound {lower:e} exceeds e_m upper bound {:e}", row.e_m_upper));
        }
        if certificate < lower * (1.0 - CERT_TOL) {
            fail(format!("certificate {certificate:e} is below the extremal lower bound {lower:e}"));
        }
        cell.rows.push(row);
    }
    Ok(cell)
}

pub fn run_order_experiment(cfg: &ExperimentConfig) -> Result<OrderReport, ExperimentError> {
    run_order_experiment_with(cfg, workers_from_env()?)
}

/// Builds `f*` for each `n` in range and reports the `m = 2n−1, 2n` bounds,
/// the certificates, and `E_n` over `f*` and the random samples.
pub fn run_order_experiment_with(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<OrderReport, ExperimentError> {
    cfg.validate()?;
    // refuse generators outside the admissible set before any work
    build_fstar(&cfg.psi, cfg.experiment.n_min)?;
    let samples = samples(cfg)?;
    let cells: Vec<usize> = (cfg.experiment.n_min..=cfg.experiment.n_max).collect();
    let results = map_cells(cells, workers, |n| order_cell(cfg, n, &samples))?;
    let mut report = OrderReport::default();
    for cell in results {
        let cell = cell?;
        report.rows.extend(cell.rows);
        report.warnings.extend(cell.warnings);
        report.failures.extend(cell.failures);
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainExperiment {
    /// Number of `(function, n, s, m)` rows checked.
    pub checked: usize,
    pub violations: Vec<ChainViolation>,
    pub warnings: Vec<String>,
}

impl ChainExperiment {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn run_chain_experiment(cfg: &ExperimentConfig) -> Result<ChainExperiment, ExperimentError> {
    run_chain_experiment_with(cfg, workers_from_env()?)
}

/// Checks `e_m ≤ e⊥_m ≤ E_n`, `m ∈ {2n−1, 2n}`, on `f*` and on every random
/// sample for each `n` in range and each `s` in `chain.s_values`.
///
/// The free-coefficient search uses the configured strategies; the
/// orthogonal search uses greedy-swap unless exhaustive is requested.
pub fn run_chain_experiment_with(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ChainExperiment, ExperimentError> {
    cfg.validate()?;
    let samples = samples(cfg)?;
    let mut functions: Vec<(usize, String, TrigPoly)> = Vec::new();
    for n in cfg.experiment.n_min..=cfg.experiment.n_max {
        functions.push((n, "fstar".into(), build_fstar(&cfg.psi, n)?.poly));
    }
    let mut cells = Vec::new();
    for n in cfg.experiment.n_min..=cfg.experiment.n_max {
        for &s in &cfg.chain.s_values {
            cells.push((n, s, None));
            for i in 0..samples.len() {
                cells.push((n, s, Some(i)));
            }
        }
    }
    let exhaustive = cfg.experiment.strategies.contains(&Strategy::Exhaustive);
    let results = map_cells(cells, workers, |(n, s, sample): (usize, NormIndex, Option<usize>)| {
        let (source, f) = match sample {
            None => {
                let (_, name, f) = functions.iter().find(|(k, _, _)| *k == n).expect("built above");
                (name.clone(), f)
            }
            Some(i) => (format!("sample-{i}"), &samples[i]),
        };
        let mut warnings = Vec::new();
        let orth = search_options(cfg, if exhaustive { Strategy::Exhaustive } else { Strategy::GreedySwap }, Vec::new());
        let mut rows = Vec::new();
        for &strategy in &cfg.experiment.strategies {
            let best = search_options(cfg, strategy, Vec::new());
            let report = match chain_check_with(f, n, s, &best, &orth) {
                Err(ApproxError::EnumerationCap { count, cap }) => {
                    warnings.push(format!(
                        "{source} n={n} s={s}: exhaustive search needs {count} subsets (cap {cap}); using greedy-swap"
                    ));
                    let mut b = best.clone();
                    let mut o = orth.clone();
                    if b.strategy == Strategy::Exhaustive {
                        b.strategy = Strategy::GreedySwap;
                    }
                    o.strategy = Strategy::GreedySwap;
                    chain_check_with(f, n, s, &b, &o)?
                }
                other => other?,
            };
            rows.extend(report.rows.into_iter().map(|r| (source.clone(), r)));
        }
        Ok::<_, ApproxError>((rows, warnings))
    })?;

    let mut out = ChainExperiment::default();
    for cell in results {
        let (rows, warnings) = cell?;
        out.warnings.extend(warnings);
        for (source, r) in rows {
            out.checked += 1;
            if !r.holds() {
                out.violations.push(ChainViolation {
                    source,
                    s: r.s,
                    n: r.n,
                    m: r.m,
                    best: r.best.error,
                    orthogonal: r.orthogonal.error,
                    fourier: r.fourier,
                });
            }
        }
    }
    for w in &out.warnings {
        log::warn!("{w}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use trigapprox::PsiFunction;

    fn cfg() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(PsiFunction::exp_power(1.0, 1.0).unwrap());
        c.experiment.n_min = 2;
        c.experiment.n_max = 4;
        c
    }

    #[test]
    fn order_rows_pair_up() {
        let r = run_order_experiment_with(&cfg(), None).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.rows.len(), 6);
        for pair in r.rows.chunks(2) {
            assert_eq!((pair[0].m + 1) / 2, pair[0].n);
            assert_eq!((pair[1].m + 1) / 2, pair[1].n);
            assert_eq!(pair[0].psi_n_value, pair[1].psi_n_value);
            for row in pair {
                assert!(row.ratio_cert <= row.ratio_upper);
            }
        }
    }

    #[test]
    fn power_generator_is_a_config_error() {
        let c = ExperimentConfig::new(PsiFunction::power(2.0).unwrap());
        let e = run_order_experiment_with(&c, None).unwrap_err();
        assert!(e.is_config(), "{e}");
    }

    #[test]
    fn exhaustive_over_cap_is_downgraded_with_warning() {
        let mut c = cfg();
        c.experiment.strategies = vec![Strategy::Exhaustive];
        c.experiment.enumeration_cap = 3;
        let r = run_order_experiment_with(&c, None).unwrap();
        assert!(!r.warnings.is_empty());
        assert!(r.passed());
    }

    #[test]
    fn chain_on_fstar_only() {
        let mut c = cfg();
        c.chain.s_values = vec![NormIndex::ONE, NormIndex::TWO];
        let r = run_chain_experiment_with(&c, None).unwrap();
        assert_eq!(r.checked, 3 * 2 * 2);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn workers_do_not_change_results() {
        let mut c = cfg();
        c.experiment.sample_count = 3;
        c.class.sample_degree = 6;
        let a = run_order_experiment_with(&c, None).unwrap();
        let b = run_order_experiment_with(&c, Some(3)).unwrap();
        assert_eq!(a, b);
    }
}
