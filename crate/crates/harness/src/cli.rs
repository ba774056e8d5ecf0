//! Command-line surface of the `trigapprox` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use trigapprox::approx::{best_mterm_with, orthogonal_mterm_with, SearchOptions};
use trigapprox::extremal::{build_fstar, check_psi_n_monotone, lower_bound_value, verify_membership};
use trigapprox::io::{read_trigpoly, write_extremal, write_mterm_results};
use trigapprox::{classify, NormIndex, PsiFunction, Strategy};

use crate::config::{ConfigError, ExperimentConfig, SCHEMA};
use crate::experiments::{run_chain_experiment, run_order_experiment, ExperimentError};
use crate::plots::emit_plots;
use crate::report::{read_order_csv, write_chain_csv, write_order_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

pub const ORDERS_CSV: &str = "orders.csv";
pub const CHAIN_CSV: &str = "chain_violations.csv";

#[derive(Debug, Parser)]
#[command(name = "trigapprox", version, about = "Best m-term trigonometric approximation experiments")]
pub struct Cli {
    /// Print the configuration file schema and exit.
    #[arg(long)]
    pub print_schema: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristics and class membership of a generator.
    PsiInfo(PsiArgs),
    /// Export the extremal polynomial for one n as CSV.
    BuildFstar {
        #[command(flatten)]
        psi: PsiArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best m-term approximation of a polynomial read from CSV (k,re,im).
    Approx {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "2")]
        s: NormIndex,
        #[arg(long, default_value = "greedy-swap")]
        strategy: Strategy,
        /// Pin coefficients to the Fourier coefficients.
        #[arg(long)]
        orthogonal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check e_m <= e_orth_m <= E_n on f* and random class samples.
    Chain(RunArgs),
    /// Order experiment: bounds and certificates against psi(n).
    Orders(RunArgs),
    /// Plots from an orders CSV.
    Plots {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PsiArgs {
    /// Read the generator from a configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// "exp-power" or "power".
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub s: Option<NormIndex>,
    #[arg(long)]
    pub p: Option<NormIndex>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sample_count: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Experiment(e) if e.is_config() => EXIT_CONFIG,
            _ => EXIT_FAILED,
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

impl PsiArgs {
    fn resolve(&self) -> Result<PsiFunction, ConfigError> {
        if let Some(path) = &self.config {
            return Ok(ExperimentConfig::load(path)?.psi);
        }
        let invalid = |e: trigapprox::PsiError| ConfigError::Invalid(e.to_string());
        match self.kind.as_deref() {
            Some("exp-power") => {
                let alpha = self.alpha.ok_or_else(|| ConfigError::Invalid("--alpha is required".into()))?;
                PsiFunction::exp_power(alpha, self.r.unwrap_or(1.0)).map_err(invalid)
            }
            Some("power") => {
                let r = self.r.ok_or_else(|| ConfigError::Invalid("--r is required".into()))?;
                PsiFunction::power(r).map_err(invalid)
            }
            Some(k) => Err(ConfigError::Invalid(format!("unknown kind {k:?}"))),
            None => Err(ConfigError::Invalid("pass --config or --kind".into())),
        }
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        let e = &mut cfg.experiment;
        if let Some(v) = self.n_min {
            e.n_min = v;
        }
        if let Some(v) = self.n_max {
            e.n_max = v;
        }
        if let Some(v) = self.s {
            e.s = v;
            cfg.chain.s_values = vec![v];
        }
        if let Some(v) = self.seed {
            e.seed = v;
        }
        if let Some(v) = self.sample_count {
            e.sample_count = v;
        }
        if let Some(v) = self.p {
            cfg.class.p = v;
        }
        if let Some(v) = self.beta {
            cfg.class.beta = v;
        }
        if let Some(v) = &self.out {
            cfg.output.dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| other(format!("{}: {e}", dir.display())))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| other(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn psi_info(args: &PsiArgs) -> Result<i32, CliError> {
    let psi = args.resolve()?;
    let ch = classify(&psi, trigapprox::psi::DEFAULT_T_MAX).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    println!("psi            {psi}");
    println!("K0             {:.16e}", ch.k0);
    println!("in_M           {}", ch.membership.in_m);
    println!("in_M_plus_inf  {}", ch.membership.in_m_plus_inf);
    println!("in_M_prime_inf {}", ch.membership.in_m_prime_inf);
    println!("t,eta,mu");
    for t in [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0] {
        let eta = psi.eta(t).map_err(other)?;
        let mu = psi.mu(t).map(|m| format!("{m:.16e}")).unwrap_or_else(|_| "inf".into());
        println!("{t},{eta:.16e},{mu}");
    }
    Ok(EXIT_OK)
}

fn build_fstar_cmd(psi: &PsiArgs, n: usize, out: Option<&Path>) -> Result<i32, CliError> {
    let psi = psi.resolve()?;
    if n == 0 {
        return Err(ConfigError::Invalid("--n must be >= 1".into()).into());
    }
    let fs = build_fstar(&psi, n).map_err(ExperimentError::from)?;
    write_extremal(output(out)?, &fs).map_err(other)?;
    let mono = check_psi_n_monotone(&psi, n, fs.a).map_err(ExperimentError::from)?;
    eprintln!("lower bound {:.6e}; weights monotone: {}", lower_bound_value(&fs), mono.passed);
    let mut ok = mono.passed;
    for p in [NormIndex::ONE, NormIndex::TWO, NormIndex::Infinity] {
        let r = verify_membership(&fs, 0.0, p);
        eprintln!("membership p={p}: norm {:.6e} ({})", r.norm, if r.passed { "ok" } else { "FAILED" });
        ok &= r.passed;
    }
    Ok(if ok { EXIT_OK } else { EXIT_ASSERTION })
}

fn approx_cmd(
    input: &Path,
    m: usize,
    s: NormIndex,
    strategy: Strategy,
    orthogonal: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let file = File::open(input).map_err(|e| other(format!("{}: {e}", input.display())))?;
    let f = read_trigpoly(io::BufReader::new(file)).map_err(|e| ConfigError::Invalid(format!("{}: {e}", input.display())))?;
    let opts = SearchOptions::new(strategy);
    let r = if orthogonal { orthogonal_mterm_with(&f, m, s, &opts) } else { best_mterm_with(&f, m, s, &opts) };
    let r = r.map_err(|e| ConfigError::Invalid(e.to_string()))?;
    write_mterm_results(output(out)?, &[r]).map_err(other)?;
    Ok(EXIT_OK)
}

fn orders_cmd(args: &RunArgs) -> Result<i32, CliError> {
    let cfg = args.resolve()?;
    let report = run_order_experiment(&cfg)?;
    let path = cfg.output.dir.join(ORDERS_CSV);
    let mut w = create(&path)?;
    write_order_csv(&mut w, &report.rows).map_err(other)?;
    w.flush().map_err(other)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.failures {
        eprintln!("FAILED: {f}");
    }
    eprintln!("{} rows written to {}", report.rows.len(), path.display());
    Ok(if report.passed() { EXIT_OK } else { EXIT_ASSERTION })
}

fn chain_cmd(args: &RunArgs) -> Result<i32, CliError> {
    let cfg = args.resolve()?;
    let r = run_chain_experiment(&cfg)?;
    let path = cfg.output.dir.join(CHAIN_CSV);
    let mut w = create(&path)?;
    write_chain_csv(&mut w, &r.violations).map_err(other)?;
    w.flush().map_err(other)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{} rows checked, {} violations", r.checked, r.violations.len());
    Ok(if r.passed() { EXIT_OK } else { EXIT_ASSERTION })
}

fn plots_cmd(input: &Path, out: &Path) -> Result<i32, CliError> {
    let file = File::open(input).map_err(|e| other(format!("{}: {e}", input.display())))?;
    let rows = read_order_csv(io::BufReader::new(file)).map_err(|e| ConfigError::Invalid(format!("{}: {e}", input.display())))?;
    let files = emit_plots(&rows, out).map_err(|e| match e {
        crate::plots::PlotError::Empty => CliError::Config(ConfigError::Invalid(e.to_string())),
        e => other(e),
    })?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if cli.print_schema {
        print!("{SCHEMA}");
        return EXIT_OK;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return EXIT_CONFIG;
    };
    let result = match &command {
        Command::PsiInfo(a) => psi_info(a),
        Command::BuildFstar { psi, n, out } => build_fstar_cmd(psi, *n, out.as_deref()),
        Command::Approx { input, m, s, strategy, orthogonal, out } => {
            approx_cmd(input, *m, *s, *strategy, *orthogonal, out.as_deref())
        }
        Command::Chain(a) => chain_cmd(a),
        Command::Orders(a) => orders_cmd(a),
        Command::Plots { input, out } => plots_cmd(input, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
