//! The chain `e_m ≤ e⊥_m ≤ E_n` for `m ∈ {2n−1, 2n}`.
//!
//! All three quantities are computed as upper bounds, so the chain can only
//! be checked if the searches are coupled: the orthogonal search always also
//! tries the padded Fourier window, and the free-coefficient search always
//! also tries the frequency set the orthogonal search settled on (its inner
//! solver starts at the pinned coefficients and never returns anything
//! worse).

use crate::norm::NormIndex;
use crate::poly::TrigPoly;

use super::search::{best_mterm_with, orthogonal_mterm_with, SearchOptions};
use super::{fourier_sum_error_with, padded_fourier_window, ApproxError, MTermResult, Strategy};

/// Relative tolerance of the chain comparisons.
pub const CHAIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRow {
    pub n: usize,
    pub m: usize,
    pub s: NormIndex,
    pub best: MTermResult,
    pub orthogonal: MTermResult,
    pub fourier: f64,
}

impl ChainRow {
    fn tol(&self) -> f64 {
        CHAIN_TOL * self.fourier.max(self.orthogonal.error).max(f64::MIN_POSITIVE)
    }

    /// `e_m ≤ e⊥_m` within tolerance.
    pub fn best_below_orthogonal(&self) -> bool {
        self.best.error <= self.orthogonal.error + self.tol()
    }

    /// `e⊥_m ≤ E_n` within tolerance.
    pub fn orthogonal_below_fourier(&self) -> bool {
        self.orthogonal.error <= self.fourier + self.tol()
    }

    pub fn holds(&self) -> bool {
        self.best_below_orthogonal() && self.orthogonal_below_fourier()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub rows: Vec<ChainRow>,
}

impl ChainReport {
    pub fn violations(&self) -> impl Iterator<Item = &ChainRow> {
        self.rows.iter().filter(|r| !r.holds())
    }

    pub fn holds(&self) -> bool {
        self.rows.iter().all(ChainRow::holds)
    }
}

/// Frequency sets whose pinned error is at most `E_n`: the padded Fourier
/// window and, for `m = 2n`, the window `[−n, n−1]`.
pub fn fourier_seeds(n: usize, m: usize) -> Vec<Vec<i64>> {
    let mut seeds = vec![padded_fourier_window(n, m)];
    if m == 2 * n {
        let mut other: Vec<i64> = (-(n as i64)..n as i64).collect();
        other.sort_unstable();
        seeds.push(other);
    }
    seeds
}

/// Chain check with default searches: free coefficients by `GreedySwap`,
/// pinned coefficients exhaustively when that stays under the cap and by
/// `GreedySwap` otherwise.
pub fn chain_check(f: &TrigPoly, n: usize, s: NormIndex) -> Result<ChainReport, ApproxError> {
    let best = SearchOptions::new(Strategy::GreedySwap);
    let orth = SearchOptions::new(Strategy::Exhaustive);
    match chain_check_with(f, n, s, &best, &orth) {
        Err(ApproxError::EnumerationCap { .. }) => {
            chain_check_with(f, n, s, &best, &SearchOptions::new(Strategy::GreedySwap))
        }
        other => other,
    }
}

pub fn chain_check_with(
    f: &TrigPoly,
    n: usize,
    s: NormIndex,
    best_opts: &SearchOptions,
    orth_opts: &SearchOptions,
) -> Result<ChainReport, ApproxError> {
    assert!(n >= 1, "chain check needs n >= 1");
    let fourier = fourier_sum_error_with(f, n, s, &orth_opts.policy);
    let mut rows = Vec::with_capacity(2);
    for m in [2 * n - 1, 2 * n] {
        let mut o = orth_opts.clone();
        o.seeds.extend(fourier_seeds(n, m));
        let orthogonal = orthogonal_mterm_with(f, m, s, &o)?;

        let mut b = best_opts.clone();
        b.seeds.push(orthogonal.gamma.clone());
        let best = best_mterm_with(f, m, s, &b)?;
        rows.push(ChainRow { n, m, s, best, orthogonal, fourier });
    }
    Ok(ChainReport { rows })
}
