//! Generators `ψ` of the convolution classes and their half-decay
//! characteristics.
//!
//! For a positive, convex, decreasing `ψ` on `[1, ∞)` the characteristic
//! `η(t)` is the point where `ψ` has dropped to half of `ψ(t)`, and
//! `μ(t) = t / (η(t) − t)`. Generators with `μ ↑ ∞` and a bounded gap
//! `η(t) − t ≤ K₀` produce classes of functions analytic in a strip; these are
//! the generators the extremal construction accepts.
//!
//! Everything here is evaluated in log space where it matters, so the
//! characteristics stay accurate far past the point where `ψ(t)` itself
//! underflows an `f64`.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative tolerance of [`PsiFunction::inverse`].
pub const INVERSE_TOL: f64 = 1e-12;
/// Iteration cap of the bisection fallback.
pub const BISECTION_MAX_ITERS: usize = 200;
/// Default right end of the probe grid.
pub const DEFAULT_T_MAX: f64 = 1e3;
/// Default number of probe grid points.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// `μ(t_max) / μ(1)` above which `μ` is considered to grow without bound.
const MU_GROWTH_THRESHOLD: f64 = 10.0;
/// `ψ(t_max) / ψ(1)` below which `ψ → 0` is accepted.
const DECAY_THRESHOLD: f64 = 1e-3;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PsiError {
    #[error("argument {0} is not finite")]
    NonFinite(f64),
    #[error("argument {0} is negative")]
    Negative(f64),
    #[error("argument {0} lies below the domain start t = 1")]
    BelowDomain(f64),
    #[error("value {y} outside the range (0, psi(1)] = (0, {max}]")]
    OutOfRange { y: f64, max: f64 },
    #[error("eta(t) = t at t = {0}: psi is flat there")]
    Singular(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bisection did not bracket a root for ln y = {0}")]
    NoBracket(f64),
}

/// A generator `ψ(t)`, `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PsiFunction {
    /// `ψ(t) = exp(−α t^r)`, `α > 0`, `r ≥ 1`.
    ExpPower { alpha: f64, r: f64 },
    /// `ψ(t) = t^{−r}`, `r > 0` (the Weyl–Nagy case).
    Power { r: f64 },
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiFunction::ExpPower { alpha, r } => write!(f, "exp(-{alpha} t^{r})"),
            PsiFunction::Power { r } => write!(f, "t^-{r}"),
        }
    }
}

fn check_arg(t: f64) -> Result<(), PsiError> {
    if !t.is_finite() {
        return Err(PsiError::NonFinite(t));
    }
    if t < 0.0 {
        return Err(PsiError::Negative(t));
    }
    if t < 1.0 {
        return Err(PsiError::BelowDomain(t));
    }
    Ok(())
}

impl PsiFunction {
    pub fn exp_power(alpha: f64, r: f64) -> Result<Self, PsiError> {
        let psi = PsiFunction::ExpPower { alpha, r };
        psi.validate()?;
        Ok(psi)
    }

    pub fn power(r: f64) -> Result<Self, PsiError> {
        let psi = PsiFunction::Power { r };
        psi.validate()?;
        Ok(psi)
    }

    pub fn validate(&self) -> Result<(), PsiError> {
        match *self {
            PsiFunction::ExpPower { alpha, r } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(PsiError::InvalidParameter(format!("alpha = {alpha} must be > 0")));
                }
                if !(r >= 1.0 && r.is_finite()) {
                    return Err(PsiError::InvalidParameter(format!("r = {r} must be >= 1")));
                }
            }
            PsiFunction::Power { r } => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(PsiError::InvalidParameter(format!("r = {r} must be > 0")));
                }
            }
        }
        Ok(())
    }

    /// `ln ψ(t)` without domain checks.
    fn ln_raw(&self, t: f64) -> f64 {
        match *self {
            PsiFunction::ExpPower { alpha, r } => -alpha * t.powf(r),
            PsiFunction::Power { r } => -r * t.ln(),
        }
    }

    /// `ln ψ(t)` for `t ≥ 1`.
    pub fn ln_eval(&self, t: f64) -> Result<f64, PsiError> {
        check_arg(t)?;
        Ok(self.ln_raw(t))
    }

    /// `ψ(t)` for `t ≥ 1`. May underflow to zero far out on the tail; use
    /// [`ln_eval`](Self::ln_eval) there.
    pub fn eval(&self, t: f64) -> Result<f64, PsiError> {
        Ok(self.ln_eval(t)?.exp())
    }

    /// The sequence `ψ(k)` extended to `k = 0` by `ψ(0) = ψ(1)`.
    pub fn extended(&self, k: i64) -> Result<f64, PsiError> {
        if k < 0 {
            return Err(PsiError::Negative(k as f64));
        }
        self.eval(k.max(1) as f64)
    }

    /// `ln ψ(k)` with the same `ψ(0) = ψ(1)` extension.
    pub fn ln_extended(&self, k: i64) -> Result<f64, PsiError> {
        if k < 0 {
            return Err(PsiError::Negative(k as f64));
        }
        self.ln_eval(k.max(1) as f64)
    }

    /// Right derivative `ψ'(t+0)`; both families are smooth so this is the
    /// classical derivative.
    pub fn right_derivative(&self, t: f64) -> Result<f64, PsiError> {
        check_arg(t)?;
        Ok(match *self {
            PsiFunction::ExpPower { alpha, r } => -alpha * r * t.powf(r - 1.0) * self.ln_raw(t).exp(),
            PsiFunction::Power { r } => -r * t.powf(-r - 1.0),
        })
    }

    /// Logarithmic slope `|ψ'(t)| / ψ(t)`, finite where `ψ` underflows.
    pub fn log_slope(&self, t: f64) -> Result<f64, PsiError> {
        check_arg(t)?;
        Ok(match *self {
            PsiFunction::ExpPower { alpha, r } => alpha * r * t.powf(r - 1.0),
            PsiFunction::Power { r } => r / t,
        })
    }

    /// `ψ^{-1}(y)` for `y ∈ (0, ψ(1)]`.
    pub fn inverse(&self, y: f64) -> Result<f64, PsiError> {
        let max = self.ln_raw(1.0).exp();
        if !(y > 0.0) || !y.is_finite() || y > max * (1.0 + 4.0 * f64::EPSILON) {
            return Err(PsiError::OutOfRange { y, max });
        }
        self.inverse_ln(y.ln())
    }

    /// `ψ^{-1}` taking `ln y` instead of `y`.
    pub fn inverse_ln(&self, ln_y: f64) -> Result<f64, PsiError> {
        let ln_max = self.ln_raw(1.0);
        let slack = 4.0 * f64::EPSILON * ln_max.abs().max(1.0);
        if !ln_y.is_finite() || ln_y > ln_max + slack {
            return Err(PsiError::OutOfRange { y: ln_y.exp(), max: ln_max.exp() });
        }
        let t = match *self {
            PsiFunction::ExpPower { alpha, r } => (-ln_y / alpha).max(0.0).powf(1.0 / r),
            PsiFunction::Power { r } => (-ln_y / r).exp(),
        }
        .max(1.0);
        // |ψ(t) − y| ≤ tol·y  ⇔  |ln ψ(t) − ln y| ≲ tol
        if (self.ln_raw(t) - ln_y).abs() <= INVERSE_TOL {
            return Ok(t);
        }
        monotone_inverse(|t| self.ln_raw(t), ln_y)
    }

    /// `η(t) = ψ^{-1}(ψ(t)/2)`.
    pub fn eta(&self, t: f64) -> Result<f64, PsiError> {
        check_arg(t)?;
        self.inverse_ln(self.ln_raw(t) - LN_2)
    }

    /// `η(t) − t`, evaluated without cancellation for the closed-form kinds.
    pub fn eta_gap(&self, t: f64) -> Result<f64, PsiError> {
        check_arg(t)?;
        Ok(match *self {
            PsiFunction::ExpPower { alpha, r } => {
                // η^r = t^r + ln2/α
                let rel = (LN_2 / alpha) / t.powf(r);
                t * (rel.ln_1p() / r).exp_m1()
            }
            PsiFunction::Power { r } => t * (LN_2 / r).exp_m1(),
        })
    }

    /// `μ(t) = t / (η(t) − t)`.
    pub fn mu(&self, t: f64) -> Result<f64, PsiError> {
        let gap = self.eta_gap(t)?;
        if !(gap > 0.0) {
            return Err(PsiError::Singular(t));
        }
        Ok(t / gap)
    }

    /// Analytic `sup_{t ≥ 1} (η(t) − t)` where one is known: for `exp(−α t^r)`
    /// the gap is nonincreasing and peaks at `t = 1`.
    pub fn analytic_k0(&self) -> Option<f64> {
        match *self {
            PsiFunction::ExpPower { alpha, r } => Some(((LN_2 / alpha).ln_1p() / r).exp_m1()),
            PsiFunction::Power { .. } => None,
        }
    }
}

/// Inverts a strictly decreasing `ln ψ` on `[1, ∞)` by growing a bracket
/// geometrically and bisecting.
pub fn monotone_inverse(ln_psi: impl Fn(f64) -> f64, ln_y: f64) -> Result<f64, PsiError> {
    let mut lo = 1.0;
    if ln_psi(lo) <= ln_y {
        return Ok(lo);
    }
    let mut hi = 2.0;
    let mut grown = 0;
    while ln_psi(hi) > ln_y {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 1100 || !hi.is_finite() {
            return Err(PsiError::NoBracket(ln_y));
        }
    }
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if ln_psi(mid) > ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Geometric grid `1 = t₁ < … < t_G = t_max`.
pub fn probe_grid(t_max: f64, points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { t_max } else { t_max.powf(i as f64 / last) })
        .collect()
}

/// Largest `η(t) − t` over the probe grid; for `exp(−α t^r)` the analytic peak
/// at `t = 1` is folded in.
pub fn estimate_k0(psi: &PsiFunction, t_max: f64, grid_points: usize) -> Result<f64, PsiError> {
    if !(t_max >= 2.0) {
        return Err(PsiError::InvalidParameter(format!("t_max = {t_max} must be >= 2")));
    }
    if grid_points < 16 {
        return Err(PsiError::InvalidParameter(format!("grid_points = {grid_points} must be >= 16")));
    }
    let mut k0 = 0.0f64;
    for t in probe_grid(t_max, grid_points) {
        k0 = k0.max(psi.eta_gap(t)?);
    }
    if let Some(analytic) = psi.analytic_k0() {
        k0 = k0.max(analytic);
    }
    Ok(k0)
}

/// Outcome of a finite-grid membership probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Yes,
    No,
    Inconclusive,
}

impl Evidence {
    pub fn is_yes(self) -> bool {
        self == Evidence::Yes
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::Yes => "true",
            Evidence::No => "false",
            Evidence::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub in_m: Evidence,
    pub in_m_plus_inf: Evidence,
    pub in_m_prime_inf: Evidence,
}

/// Characteristics of a generator on `[1, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiCharacteristics {
    pub psi: PsiFunction,
    pub t_max: f64,
    pub k0: f64,
    pub membership: Membership,
}

impl PsiCharacteristics {
    pub fn eta_at(&self, t: f64) -> Result<f64, PsiError> {
        self.psi.eta(t)
    }

    pub fn mu_at(&self, t: f64) -> Result<f64, PsiError> {
        self.psi.mu(t)
    }

    /// The constant `b` in the lower bound `μ(t) ≥ 1/K₀`.
    pub fn b(&self) -> f64 {
        1.0 / self.k0
    }
}

fn ln_mean_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln() - LN_2
}

fn probe_in_m(psi: &PsiFunction, grid: &[f64]) -> Evidence {
    let ln: Vec<f64> = grid.iter().map(|&t| psi.ln_raw(t)).collect();
    if ln.iter().any(|v| !v.is_finite()) {
        return Evidence::No;
    }
    for w in ln.windows(2) {
        if w[1] > w[0] + 1e-12 * w[0].abs().max(1.0) {
            return Evidence::No;
        }
    }
    for (i, w) in grid.windows(2).enumerate() {
        let mid = psi.ln_raw(0.5 * (w[0] + w[1]));
        let chord = ln_mean_exp(ln[i], ln[i + 1]);
        if mid > chord + 1e-12 * chord.abs().max(1.0) {
            return Evidence::No;
        }
    }
    let decay = ln[ln.len() - 1] - ln[0];
    if decay < DECAY_THRESHOLD.ln() {
        Evidence::Yes
    } else {
        Evidence::Inconclusive
    }
}

/// Classifies `ψ` into `𝔐`, `𝔐⁺∞`, `𝔐′∞` from evidence on the probe grid.
///
/// `μ` must be nondecreasing from `t = 1` on; early non-monotonicity makes
/// the `𝔐⁺∞` verdict inconclusive rather than negative.
pub fn classify(psi: &PsiFunction, t_max: f64) -> Result<PsiCharacteristics, PsiError> {
    psi.validate()?;
    if !(t_max >= 10.0) {
        return Err(PsiError::InvalidParameter(format!("t_max = {t_max} must be >= 10")));
    }
    let grid = probe_grid(t_max, DEFAULT_GRID_POINTS);
    let k0 = estimate_k0(psi, t_max, DEFAULT_GRID_POINTS)?;

    let in_m = probe_in_m(psi, &grid);

    let mu: Vec<f64> = grid.iter().map(|&t| psi.mu(t)).collect::<Result<_, _>>()?;
    let monotone = mu.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    let growth = mu[mu.len() - 1] / mu[0];
    let in_m_plus_inf = match in_m {
        Evidence::No => Evidence::No,
        _ if !monotone => Evidence::Inconclusive,
        _ if growth <= 1.0 + 1e-9 => Evidence::No,
        Evidence::Yes if growth > MU_GROWTH_THRESHOLD => Evidence::Yes,
        _ => Evidence::Inconclusive,
    };

    let gaps: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| psi.eta_gap(t).map(|g| (t, g)))
        .collect::<Result<_, _>>()?;
    let first = gaps.iter().filter(|(t, _)| *t <= 10.0).map(|g| g.1).fold(0.0, f64::max);
    let last = gaps.iter().filter(|(t, _)| *t >= t_max / 10.0).map(|g| g.1).fold(0.0, f64::max);
    let bounded = if last <= first * (1.0 + 1e-6) {
        Evidence::Yes
    } else if last > 2.0 * first {
        Evidence::No
    } else {
        Evidence::Inconclusive
    };
    let in_m_prime_inf = match (in_m_plus_inf, bounded) {
        (Evidence::No, _) | (_, Evidence::No) => Evidence::No,
        (Evidence::Yes, Evidence::Yes) => Evidence::Yes,
        _ => Evidence::Inconclusive,
    };

    Ok(PsiCharacteristics {
        psi: *psi,
        t_max,
        k0,
        membership: Membership { in_m, in_m_plus_inf, in_m_prime_inf },
    })
}
