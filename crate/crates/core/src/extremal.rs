//! The extremal polynomial
//!
//! ```text
//! f*(ψ; n; t) = C₁ ( ψ(1) / (2(n+A)²) + Σ_{k=1}^{n} ψ(k)/(n−k+A)² cos kt )
//! ```
//!
//! whose `(ψ,β)`-derivative sits in the unit ball of every `L_p` once
//! `2π C₁ Σ (n−k+A)^{−2} ≤ 1`, and whose `2n`-term approximation error is
//! bounded below through the single-harmonic witness. With
//! `A ≥ 8 K₀ (K₀+1)` the weights `ψ(t)/(n−t+A)²` do not increase on `[1, n]`,
//! which puts the smallest harmonic weight at `k = n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::norm::NormIndex;
use crate::poly::TrigPoly;
use crate::psi::{self, Evidence, PsiError, PsiFunction};
use crate::spectral::{poly_norm, psi_beta_derivative, ClassParams};

/// Slack on the unit-ball membership check.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Grid points used by [`check_psi_n_monotone`].
pub const MONOTONE_GRID: usize = 1024;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExtremalError {
    #[error("psi = {psi} is not accepted: {flag} is {evidence}")]
    NotAdmissible { psi: PsiFunction, flag: &'static str, evidence: Evidence },
    #[error("invalid constant: {0}")]
    InvalidConstant(String),
    #[error(transparent)]
    Psi(#[from] PsiError),
}

/// `A = 8 K₀ (K₀ + 1)`, the smallest admissible shift.
pub fn compute_a(k0: f64) -> Result<f64, ExtremalError> {
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(ExtremalError::InvalidConstant(format!("K0 = {k0} must be positive")));
    }
    Ok(8.0 * k0 * (k0 + 1.0))
}

/// Largest `C₁` with `2π C₁ Σ_{k=1}^{n} (n−k+A)^{−2} ≤ 1`.
pub fn compute_c1(n: usize, a: f64) -> Result<f64, ExtremalError> {
    if n == 0 {
        return Err(ExtremalError::InvalidConstant("n must be >= 1".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(ExtremalError::InvalidConstant(format!("A = {a} must be positive")));
    }
    Ok(1.0 / (2.0 * PI * weight_sum(n, a)))
}

/// `Σ_{k=1}^{n} (n−k+A)^{−2}`, summed from the smallest term up.
fn weight_sum(n: usize, a: f64) -> f64 {
    (1..=n).rev().map(|k| (n as f64 - k as f64 + a).powi(-2)).rev().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalFunction {
    pub psi: PsiFunction,
    pub n: usize,
    pub k0: f64,
    pub a: f64,
    pub c1: f64,
    pub poly: TrigPoly,
}

impl ExtremalFunction {
    /// `f*` for explicit constants; no admissibility checks on `ψ`.
    pub fn with_constants(psi: PsiFunction, n: usize, k0: f64, a: f64, c1: f64) -> Result<Self, ExtremalError> {
        psi.validate()?;
        if n == 0 {
            return Err(ExtremalError::InvalidConstant("n must be >= 1".into()));
        }
        let nf = n as f64;
        let terms: Vec<f64> = (0..=n)
            .map(|k| {
                let w = psi.extended(k as i64)?;
                let shift = if k == 0 { nf + a } else { nf - k as f64 + a };
                Ok(c1 * w / (2.0 * shift * shift))
            })
            .collect::<Result<_, PsiError>>()?;
        let poly = TrigPoly::from_fn(n, |k| Complex64::new(terms[k.unsigned_abs() as usize], 0.0))
            .map_err(|e| ExtremalError::InvalidConstant(e.to_string()))?;
        Ok(ExtremalFunction { psi, n, k0, a, c1, poly })
    }

    /// `2π C₁ Σ_{k=1}^{n} (n−k+A)^{−2}`; equals one for the default `C₁`.
    pub fn crude_bound(&self) -> f64 {
        2.0 * PI * self.c1 * weight_sum(self.n, self.a)
    }
}

/// Builds `f*(ψ; n; ·)` with `K₀` from the probe (analytic for `exp(−α t^r)`),
/// `A` at its threshold and `C₁` at equality.
pub fn build_fstar(psi: &PsiFunction, n: usize) -> Result<ExtremalFunction, ExtremalError> {
    let ch = psi::classify(psi, psi::DEFAULT_T_MAX)?;
    let flags = [
        ("in_M", ch.membership.in_m),
        ("in_M_plus_inf", ch.membership.in_m_plus_inf),
        ("in_M_prime_inf", ch.membership.in_m_prime_inf),
    ];
    if let Some(&(flag, evidence)) = flags.iter().find(|(_, e)| !e.is_yes()) {
        return Err(ExtremalError::NotAdmissible { psi: *psi, flag, evidence });
    }
    let k0 = ch.k0;
    let a = compute_a(k0)?;
    let c1 = compute_c1(n.max(1), a)?;
    ExtremalFunction::with_constants(*psi, n, k0, a, c1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub beta: f64,
    pub p: NormIndex,
    /// `‖(f*)^ψ_β‖_p` on the policy grid.
    pub norm: f64,
    pub crude_bound: f64,
    pub passed: bool,
}

/// Checks `‖(f*)^ψ_β‖_p ≤ 1` directly and through the crude bound.
pub fn verify_membership(fs: &ExtremalFunction, beta: f64, p: NormIndex) -> MembershipReport {
    let params = ClassParams { psi: fs.psi, beta, p };
    let d = psi_beta_derivative(&fs.poly, &params);
    let norm = poly_norm(&d, p);
    let crude_bound = fs.crude_bound();
    let passed = norm <= 1.0 + MEMBERSHIP_TOL && norm <= crude_bound + MEMBERSHIP_TOL && crude_bound <= 1.0 + 1e-12;
    MembershipReport { beta, p, norm, crude_bound, passed }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub n: usize,
    pub a: f64,
    pub passed: bool,
    /// First grid point where monotonicity or the sign condition failed.
    pub offending_t: Option<f64>,
    /// `min_{1≤k≤n} ψ(k)/(n−k+A)²`.
    pub integer_min: f64,
    /// `ψ(n)/A²`.
    pub value_at_n: f64,
}

/// Checks that `ψ_n(t) = ψ(t)/(n−t+A)²` does not increase on `[1, n]` and that
/// `2 − (|ψ'(t)|/ψ(t))(n−t+A) ≤ 0` pointwise.
pub fn check_psi_n_monotone(psi: &PsiFunction, n: usize, a: f64) -> Result<MonotoneReport, ExtremalError> {
    if n == 0 {
        return Err(ExtremalError::InvalidConstant("n must be >= 1".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(ExtremalError::InvalidConstant(format!("A = {a} must be positive")));
    }
    let nf = n as f64;
    let ln_psi_n = |t: f64| -> Result<f64, PsiError> { Ok(psi.ln_eval(t)? - 2.0 * (nf - t + a).ln()) };

    let integer_min = (1..=n)
        .map(|k| ln_psi_n(k as f64).map(f64::exp))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let value_at_n = psi.eval(nf)? / (a * a);

    let mut offending_t = None;
    if n > 1 {
        let step = (nf - 1.0) / (MONOTONE_GRID - 1) as f64;
        let mut prev = ln_psi_n(1.0)?;
        for i in 0..MONOTONE_GRID {
            let t = if i + 1 == MONOTONE_GRID { nf } else { 1.0 + i as f64 * step };
            let cur = ln_psi_n(t)?;
            let sign = 2.0 - psi.log_slope(t)? * (nf - t + a);
            if cur > prev + 1e-12f64.ln_1p() || sign > 1e-12 {
                offending_t = Some(t);
                break;
            }
            prev = cur;
        }
    }
    Ok(MonotoneReport { n, a, passed: offending_t.is_none(), offending_t, integer_min, value_at_n })
}

/// `C₁ ψ(n) / (2A²)`, the lower bound on `e_{2n}(f*)_s` read off at `k = n`.
pub fn lower_bound_value(fs: &ExtremalFunction) -> f64 {
    let psi_n = fs.psi.eval(fs.n as f64).expect("n >= 1");
    fs.c1 * psi_n / (2.0 * fs.a * fs.a)
}

/// `(C₁/2) min_{0≤k≤n} ψ(k)/(n−k+A)²` with `ψ(0) = ψ(1)`: the witness bound
/// before the minimum is located. Differs from [`lower_bound_value`] when the
/// constant term is the smallest coefficient, which happens at `n = 1`.
pub fn certified_lower_bound(fs: &ExtremalFunction) -> f64 {
    fs.poly.coeffs().iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
}
