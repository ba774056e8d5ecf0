//! Experiment configuration.
//!
//! One TOML file describes a run; command-line flags override individual
//! keys. [`SCHEMA`] is the reference printed by `--print-schema`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trigapprox::approx::ENUMERATION_CAP;
use trigapprox::{GridPolicy, NormIndex, PsiFunction, Strategy};

pub const SCHEMA: &str = r#"# trigapprox experiment configuration (TOML)
#
# [psi]            generator of the class
#   kind  = "exp-power" | "power"
#   alpha = <real > 0>        exp-power only: psi(t) = exp(-alpha t^r)
#   r     = <real>            exp-power: r >= 1; power: psi(t) = t^(-r), r > 0
#
# [class]
#   beta          = <real>                  phase shift of the derivative, default 0
#   p             = <real >= 1 | "inf">     norm of the density ball, default 2
#   sample_degree = <integer >= 1>          degree of random densities, default 16
#
# [experiment]
#   s            = <real >= 1 | "inf">      approximation norm, default 2
#   n_min, n_max = <integers, 1 <= n_min <= n_max>
#   strategies   = ["exhaustive" | "greedy" | "greedy-swap", ...], default ["greedy-swap"]
#   seed         = <unsigned 64-bit integer>, default 0
#   sample_count = <integer >= 0>, default 0
#   enumeration_cap = <integer>, default 200000; larger exhaustive requests
#                  are downgraded to greedy-swap with a warning
#
# [chain]
#   s_values = [<norm index>, ...], default [1, 2, "inf"]
#
# [grids]
#   oversample_finite = <integer >= 2>, default 8
#   oversample_inf    = <integer >= 2>, default 32
#
# [output]
#   dir = <path>, default "out"
#
# Random densities: generator PCG64 (128-bit LCG, XSL-RR 64-bit output),
# constructed as pcg64(state = seed, stream = 0xa02bdbf7bb3c0a7ac28fa16a64abf96).
# A uniform u in [0, 1) is (next_u64 >> 11) * 2^-53. For sample i = 0, 1, ...
# and k = 1..=sample_degree in that order, draw a_k = 1/2 + u/2 and then
# theta_k = 2 pi u; the density is sum_k a_k cos(k t + theta_k).
"#;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassSection {
    pub beta: f64,
    pub p: NormIndex,
    pub sample_degree: usize,
}

impl Default for ClassSection {
    fn default() -> Self {
        ClassSection { beta: 0.0, p: NormIndex::TWO, sample_degree: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub s: NormIndex,
    pub n_min: usize,
    pub n_max: usize,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    pub sample_count: usize,
    pub enumeration_cap: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            s: NormIndex::TWO,
            n_min: 2,
            n_max: 10,
            strategies: vec![Strategy::GreedySwap],
            seed: 0,
            sample_count: 0,
            enumeration_cap: ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub s_values: Vec<NormIndex>,
}

impl Default for ChainSection {
    fn default() -> Self {
        ChainSection { s_values: vec![NormIndex::ONE, NormIndex::TWO, NormIndex::Infinity] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub psi: PsiFunction,
    #[serde(default)]
    pub class: ClassSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub chain: ChainSection,
    #[serde(default)]
    pub grids: GridPolicy,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    /// Defaults around a given generator.
    pub fn new(psi: PsiFunction) -> Self {
        ExperimentConfig {
            psi,
            class: ClassSection::default(),
            experiment: ExperimentSection::default(),
            chain: ChainSection::default(),
            grids: GridPolicy::default(),
            output: OutputSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        self.psi.validate().map_err(|e| ConfigError::Invalid(format!("psi: {e}")))?;
        if !self.class.beta.is_finite() {
            return bad(format!("class.beta = {} is not finite", self.class.beta));
        }
        if self.class.sample_degree == 0 || self.class.sample_degree > 4096 {
            return bad(format!("class.sample_degree = {} must be in 1..=4096", self.class.sample_degree));
        }
        let e = &self.experiment;
        if e.n_min == 0 || e.n_min > e.n_max {
            return bad(format!("experiment n range [{}, {}] must satisfy 1 <= n_min <= n_max", e.n_min, e.n_max));
        }
        if e.n_max > 512 {
            return bad(format!("experiment.n_max = {} exceeds 512", e.n_max));
        }
        if e.sample_count > 100_000 {
            return bad(format!("experiment.sample_count = {} exceeds 100000", e.sample_count));
        }
        if e.strategies.is_empty() {
            return bad("experiment.strategies is empty".into());
        }
        if self.chain.s_values.is_empty() {
            return bad("chain.s_values is empty".into());
        }
        if self.grids.oversample_finite < 2 || self.grids.oversample_inf < 2 {
            return bad("grid oversampling factors must be >= 2".into());
        }
        if self.grids.oversample_finite > 1024 || self.grids.oversample_inf > 1024 {
            return bad("grid oversampling factors must be <= 1024".into());
        }
        Ok(())
    }
}
