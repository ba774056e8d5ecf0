//! Duality lower bounds.
//!
//! For any `h` with `‖h‖_{s'} ≤ 1` and `∫ h(t) e^{ikt} dt = 0` for all
//! `k ∈ γ`, the value `|∫ f h|` bounds from below the error of every
//! approximant supported on `γ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::norm::NormIndex;
use crate::poly::TrigPoly;
use crate::spectral::poly_norm;

use super::{canonical_gamma, ApproxError};

/// Slack allowed on `‖h‖_{s'} ≤ 1`.
pub const WITNESS_NORM_TOL: f64 = 1e-9;
/// Largest `|ĥ(−k)|`, `k ∈ γ`, accepted as orthogonal.
pub const WITNESS_ORTHO_TOL: f64 = 1e-12;

/// A dual function `h` annihilating the frequency set `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub poly: TrigPoly,
    pub s_conj: NormIndex,
    /// Frequencies `h` is orthogonal to, sorted.
    pub gamma: Vec<i64>,
    /// Frequency of the single-harmonic witness, when `h = e^{−ik*t}/2π`.
    pub k_star: Option<i64>,
}

impl Witness {
    /// `‖h‖_{s'}`.
    pub fn norm(&self) -> f64 {
        poly_norm(&self.poly, self.s_conj)
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        let norm = self.norm();
        if norm > 1.0 + WITNESS_NORM_TOL {
            return Err(ApproxError::WitnessNorm { norm, s_conj: self.s_conj });
        }
        for &k in &self.gamma {
            let residual = self.poly.coeff(-k).norm();
            if residual > WITNESS_ORTHO_TOL {
                return Err(ApproxError::WitnessNotOrthogonal { k, residual });
            }
        }
        Ok(())
    }
}

/// `|∫_{−π}^{π} f(t) h(t) dt| = |2π Σ_k f̂(k) ĥ(−k)|`, after checking the
/// witness constraints.
pub fn duality_value(f: &TrigPoly, w: &Witness) -> Result<f64, ApproxError> {
    w.validate()?;
    let sum: Complex64 = f.iter().map(|(k, c)| c * w.poly.coeff(-k)).sum();
    Ok((2.0 * PI * sum).norm())
}

fn single_harmonic(k_star: i64, s: NormIndex, gamma: Vec<i64>) -> Witness {
    let poly = TrigPoly::from_terms(&[(-k_star, Complex64::new(1.0 / (2.0 * PI), 0.0))]).expect("finite");
    Witness { poly, s_conj: s.conjugate(), gamma, k_star: Some(k_star) }
}

/// `T(t) = e^{−ik*t}/2π` for a frequency set of size `2n`, with `k*` the free
/// frequency in `[−n, n]` of largest `|f̂(k*)|` (ties to smaller `|k|`, then
/// positive `k`).
pub fn standard_witness(gamma: &[i64], n: usize, s: NormIndex, f: &TrigPoly) -> Result<Witness, ApproxError> {
    let gamma = canonical_gamma(gamma)?;
    if gamma.len() != 2 * n {
        return Err(ApproxError::WitnessSize { expected: 2 * n, got: gamma.len() });
    }
    let n = n as i64;
    let k_star = (-n..=n)
        .filter(|k| gamma.binary_search(k).is_err())
        .max_by(|&a, &b| {
            f.coeff(a)
                .norm()
                .total_cmp(&f.coeff(b).norm())
                .then(b.abs().cmp(&a.abs()))
                .then(a.cmp(&b))
        })
        .ok_or(ApproxError::NoFreeFrequency(n))?;
    Ok(single_harmonic(k_star, s, gamma))
}

/// Lower bound on `e_m(f)_s`, valid for every `s ∈ [1, ∞]`.
///
/// Any `m` frequencies leave at least `2N+1−m` of the window `[−N, N]` free,
/// and each free `k` yields `|f̂(k)|` through the witness `e^{−ikt}/2π`. The
/// bound is therefore the `(2N+1−m)`-th smallest `|f̂(k)|`; the returned
/// witness realizes it on the frequency set that covers everything else.
/// `None` when `m` covers the whole window.
pub fn witness_certificate(f: &TrigPoly, m: usize, s: NormIndex) -> Option<(f64, Witness)> {
    let mut order: Vec<i64> = f.iter().map(|(k, _)| k).collect();
    let w = order.len();
    if m >= w {
        return None;
    }
    // ascending magnitude; ties put larger |k| (then negative k) first
    order.sort_by(|&a, &b| {
        f.coeff(a)
            .norm()
            .total_cmp(&f.coeff(b).norm())
            .then(b.abs().cmp(&a.abs()))
            .then(a.cmp(&b))
    });
    let free = w - m;
    let k_star = order[free - 1];
    let mut gamma = order[free..].to_vec();
    gamma.sort_unstable();
    let value = f.coeff(k_star).norm();
    Some((value, single_harmonic(k_star, s, gamma)))
}
