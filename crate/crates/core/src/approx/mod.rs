//! Fourier-sum error, best `m`-term and best orthogonal `m`-term
//! approximation of concrete trigonometric polynomials, with duality lower
//! bounds and the inequality chain between them.

mod chain;
mod duality;
mod inner;
mod search;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::norm::NormIndex;
use crate::poly::TrigPoly;
use crate::spectral::{poly_norm_with, GridPolicy};

pub use chain::{chain_check, chain_check_with, fourier_seeds, ChainReport, ChainRow, CHAIN_TOL};
pub use duality::{duality_value, standard_witness, witness_certificate, Witness, WITNESS_NORM_TOL, WITNESS_ORTHO_TOL};
pub use inner::{best_coeffs_on_set, Evaluator, InnerFit, SolverOptions, L1_SURROGATE, LINF_SURROGATE};
pub use search::{best_mterm, best_mterm_with, greedy_order, orthogonal_mterm, orthogonal_mterm_with, SearchOptions};

/// Default cap on the number of subsets the exhaustive search visits.
pub const ENUMERATION_CAP: u64 = 200_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("frequency {k} lies outside the candidate window [-{window}, {window}]")]
    OutsideWindow { k: i64, window: usize },
    #[error("frequency {0} appears twice")]
    Duplicate(i64),
    #[error("exhaustive search needs {count} subsets, above the cap of {cap}")]
    EnumerationCap { count: u64, cap: u64 },
    #[error("witness must annihilate {expected} frequencies, got {got}")]
    WitnessSize { expected: usize, got: usize },
    #[error("witness norm {norm} exceeds 1 in L_{s_conj}")]
    WitnessNorm { norm: f64, s_conj: NormIndex },
    #[error("witness is not orthogonal to frequency {k} (residual {residual:e})")]
    WitnessNotOrthogonal { k: i64, residual: f64 },
    #[error("no admissible frequency left in [-{0}, {0}]")]
    NoFreeFrequency(i64),
}

/// How the frequency set is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    Greedy,
    GreedySwap,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Greedy => "greedy",
            Strategy::GreedySwap => "greedy-swap",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "greedy" => Ok(Strategy::Greedy),
            "greedy-swap" => Ok(Strategy::GreedySwap),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Method tag carried by an [`MTermResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Exhaustive,
    Greedy,
    GreedySwap,
    OrthogonalExhaustive,
    OrthogonalGreedy,
    OrthogonalGreedySwap,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exhaustive => "Exhaustive",
            Method::Greedy => "Greedy",
            Method::GreedySwap => "GreedySwap",
            Method::OrthogonalExhaustive => "OrthogonalExhaustive",
            Method::OrthogonalGreedy => "OrthogonalGreedy",
            Method::OrthogonalGreedySwap => "OrthogonalGreedySwap",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Method::Exhaustive,
            Method::Greedy,
            Method::GreedySwap,
            Method::OrthogonalExhaustive,
            Method::OrthogonalGreedy,
            Method::OrthogonalGreedySwap,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of an `m`-term search.
#[derive(Debug, Clone, PartialEq)]
pub struct MTermResult {
    pub m: usize,
    pub s: NormIndex,
    /// The chosen frequencies, sorted.
    pub gamma: Vec<i64>,
    /// Coefficients aligned with `gamma`.
    pub coeffs: Vec<Complex64>,
    /// Achieved `L_s` error, an upper bound on the infimum.
    pub error: f64,
    pub method: Method,
    /// A lower bound on the infimum from a duality witness.
    pub certificate: Option<f64>,
    pub converged: bool,
}

/// Sorts `gamma`, rejecting repeated frequencies.
pub fn canonical_gamma(gamma: &[i64]) -> Result<Vec<i64>, ApproxError> {
    let mut g = gamma.to_vec();
    g.sort_unstable();
    if let Some(w) = g.windows(2).find(|w| w[0] == w[1]) {
        return Err(ApproxError::Duplicate(w[0]));
    }
    Ok(g)
}

/// `E_n(f)_s = ‖f − Σ_{|k|<n} f̂(k) e^{ikx}‖_s`.
pub fn fourier_sum_error(f: &TrigPoly, n: usize, s: NormIndex) -> f64 {
    fourier_sum_error_with(f, n, s, &GridPolicy::default())
}

pub fn fourier_sum_error_with(f: &TrigPoly, n: usize, s: NormIndex, policy: &GridPolicy) -> f64 {
    let tail = f.map(|k, c| if (k.unsigned_abs() as usize) < n { Complex64::new(0.0, 0.0) } else { c });
    if s.is_two() {
        return tail.l2_norm();
    }
    poly_norm_with(&tail, s, policy)
}

/// The Fourier window `[−n+1, n−1]`, padded with `n`, `−n`, `n+1`, … up to
/// `m` frequencies.
pub fn padded_fourier_window(n: usize, m: usize) -> Vec<i64> {
    let n = n as i64;
    let mut g: Vec<i64> = (-n + 1..n).collect();
    let mut next = n;
    while g.len() < m {
        g.push(next);
        if g.len() < m {
            g.push(-next);
        }
        next += 1;
    }
    g.truncate(m);
    g.sort_unstable();
    g
}
