//! Synthesis, analysis and `L_p` quadrature on uniform grids, plus the
//! Fourier multipliers that define the convolution classes.
//!
//! Norms follow the unnormalized convention `‖f‖_p = (∫₀^{2π} |f|^p dt)^{1/p}`,
//! evaluated with the rectangle rule, which is exact for inner products of
//! trigonometric polynomials and spectrally accurate for other smooth
//! periodic integrands.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::norm::NormIndex;
use crate::poly::{GridSignal, PolyError, TrigPoly};
use crate::psi::{PsiError, PsiFunction};

/// Share of energy above the requested degree that flags aliasing.
pub const ALIASING_THRESHOLD: f64 = 1e-8;
/// Smallest `ln ψ(k)` a class sample keeps.
pub const MIN_LN_PSI: f64 = -690.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid of {m} points cannot resolve degree {degree} (need at least {need})")]
    Undersampled { m: usize, degree: usize, need: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error("density has zero mean-free part and cannot be normalized")]
    ZeroDensity,
    #[error("derivative round trip drifted by {0:e}")]
    RoundTrip(f64),
}

/// Oversampling applied when a polynomial is put on a grid for a norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    pub oversample_finite: usize,
    pub oversample_inf: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy { oversample_finite: 8, oversample_inf: 32 }
    }
}

impl GridPolicy {
    /// Power-of-two grid size for a degree-`degree` polynomial in `L_p`.
    pub fn grid_size(&self, degree: usize, p: NormIndex) -> usize {
        let factor = if p.is_infinite() { self.oversample_inf } else { self.oversample_finite };
        (factor.max(1) * (2 * degree + 1)).next_power_of_two().max(2)
    }
}

/// Parameters of the class `L^ψ_{β,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub psi: PsiFunction,
    pub beta: f64,
    pub p: NormIndex,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Values `Σ_k c_k e^{ik t_j}` at the `M` grid nodes.
pub fn synthesize(poly: &TrigPoly, m: usize) -> Result<GridSignal, SpectralError> {
    if !m.is_power_of_two() {
        return Err(PolyError::NotPowerOfTwo(m).into());
    }
    let need = 2 * poly.degree() + 1;
    if m < need {
        return Err(SpectralError::Undersampled { m, degree: poly.degree(), need });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in poly.iter() {
        buf[k.rem_euclid(m as i64) as usize] = c;
    }
    fft_in_place(&mut buf, true);
    if poly.is_real() {
        for v in &mut buf {
            v.im = 0.0;
        }
    }
    Ok(GridSignal::new(buf)?)
}

/// Result of [`analyze`]: the degree-`N` coefficients and the share of
/// signal energy sitting above degree `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub poly: TrigPoly,
    pub discarded_energy: f64,
}

impl Analysis {
    pub fn is_aliased(&self) -> bool {
        self.discarded_energy > ALIASING_THRESHOLD
    }
}

/// Discrete Fourier coefficients `c_k = (1/M) Σ_j v_j e^{−ik t_j}`, `|k| ≤ N`.
pub fn analyze(signal: &GridSignal, n: usize) -> Result<Analysis, SpectralError> {
    let m = signal.len();
    let need = 2 * n + 2;
    if m < need {
        return Err(SpectralError::Undersampled { m, degree: n, need });
    }
    let mut buf = signal.values().to_vec();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / m as f64;
    for v in &mut buf {
        *v *= scale;
    }
    let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let poly = TrigPoly::from_fn(n, |k| buf[k.rem_euclid(m as i64) as usize])?;
    let kept = poly.mass();
    let discarded_energy = if total > 0.0 { ((total - kept) / total).max(0.0) } else { 0.0 };
    if discarded_energy > ALIASING_THRESHOLD {
        log::warn!("analyze: {discarded_energy:e} of the energy lies above degree {n}");
    }
    Ok(Analysis { poly, discarded_energy })
}

/// Rectangle-rule `L_p` norm; `max_j |v_j|` for `p = ∞`.
pub fn lp_norm(signal: &GridSignal, p: NormIndex) -> f64 {
    norm_of_values(signal.values(), p)
}

pub(crate) fn norm_of_values(values: &[Complex64], p: NormIndex) -> f64 {
    let h = 2.0 * PI / values.len() as f64;
    match p {
        NormIndex::Infinity => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        NormIndex::Finite(q) if q == 1.0 => h * values.iter().map(|v| v.norm()).sum::<f64>(),
        NormIndex::Finite(q) if q == 2.0 => h.sqrt() * crate::poly::hypot_sum(values.iter().copied()),
        NormIndex::Finite(q) => {
            // scale by the max to keep |v|^q in range
            let top = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            let s: f64 = values.iter().map(|v| (v.norm() / top).powf(q)).sum();
            top * (h * s).powf(1.0 / q)
        }
    }
}

/// `‖P‖_p` on the policy grid.
pub fn poly_norm_with(poly: &TrigPoly, p: NormIndex, policy: &GridPolicy) -> f64 {
    let m = policy.grid_size(poly.degree(), p);
    let signal = synthesize(poly, m).expect("policy grid resolves the degree");
    lp_norm(&signal, p)
}

/// `‖P‖_p` on the default grid policy.
pub fn poly_norm(poly: &TrigPoly, p: NormIndex) -> f64 {
    poly_norm_with(poly, p, &GridPolicy::default())
}

/// `e^{i(βπ/2)·sign}` with exact values at whole quarter turns.
pub fn quarter_turn(beta: f64, sign: i64) -> Complex64 {
    if sign == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let turns = (beta * sign.signum() as f64).rem_euclid(4.0);
    if turns.fract() == 0.0 {
        return match turns as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, turns * PI / 2.0)
}

/// Truncated kernel `Ψ_β` together with a bound on the dropped tail.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPoly {
    pub poly: TrigPoly,
    /// Upper bound on `Σ_{k>N} ψ(k)`; infinite when the series diverges.
    pub tail_bound: f64,
}

/// Degree-`N` truncation of `Ψ_β(t) = Σ_{k≥1} ψ(k) cos(kt − βπ/2)`.
pub fn kernel_poly(psi: &PsiFunction, beta: f64, n: usize) -> Result<KernelPoly, SpectralError> {
    psi.validate()?;
    let poly = TrigPoly::from_fn(n, |k| {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = psi.eval(k.unsigned_abs() as f64).expect("k >= 1") / 2.0;
        quarter_turn(beta, -k.signum()) * w
    })?;
    Ok(KernelPoly { poly, tail_bound: kernel_tail_bound(psi, n) })
}

/// Upper bound on `Σ_{k>N} ψ(k)`.
pub fn kernel_tail_bound(psi: &PsiFunction, n: usize) -> f64 {
    match *psi {
        PsiFunction::Power { r } => {
            if r <= 1.0 {
                f64::INFINITY
            } else {
                // Σ_{k>N} k^{−r} ≤ ∫_N^∞ t^{−r} dt, and ≤ ζ(r) tail from 1 when N = 0
                let base = (n.max(1)) as f64;
                let head = if n == 0 { 1.0 } else { 0.0 };
                head + base.powf(1.0 - r) / (r - 1.0)
            }
        }
        PsiFunction::ExpPower { .. } => {
            let mut sum = 0.0;
            let mut k = n as f64 + 1.0;
            loop {
                let term = psi.eval(k).expect("k >= 1");
                sum += term;
                if term == 0.0 || term <= sum * 1e-18 {
                    // remaining terms decay at least geometrically with ratio ψ(k+1)/ψ(k)
                    let ratio = psi.eval(k + 1.0).expect("k >= 1") / term.max(f64::MIN_POSITIVE);
                    if ratio < 1.0 {
                        sum += term * ratio / (1.0 - ratio);
                    }
                    break sum;
                }
                k += 1.0;
            }
        }
    }
}

/// Smallest degree whose kernel tail drops below `rel_tol · ψ(1)`.
pub fn kernel_truncation_degree(psi: &PsiFunction, rel_tol: f64) -> Option<usize> {
    let target = rel_tol * psi.eval(1.0).ok()?;
    (1..=100_000).find(|&n| kernel_tail_bound(psi, n) < target)
}

fn inv_psi_at(psi: &PsiFunction, k: i64) -> f64 {
    (-psi.ln_eval(k.unsigned_abs() as f64).expect("k >= 1")).exp()
}

/// The `(ψ,β)`-derivative: `d_k = f̂(k)/ψ(|k|) · e^{i(βπ/2) sign k}`, `d₀ = 0`.
pub fn psi_beta_derivative(f: &TrigPoly, params: &ClassParams) -> TrigPoly {
    f.map(|k, c| {
        if k == 0 || c == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            c * inv_psi_at(&params.psi, k) * quarter_turn(params.beta, k.signum())
        }
    })
}

/// Applies the convolution with `Ψ_β`: `f̂(k) = ψ(|k|) φ̂(k) e^{−i(βπ/2) sign k}`,
/// `f̂(0) = 0`.
fn convolve(phi: &TrigPoly, params: &ClassParams) -> TrigPoly {
    phi.map(|k, c| {
        if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            c * params.psi.eval(k.unsigned_abs() as f64).expect("k >= 1") * quarter_turn(params.beta, -k.signum())
        }
    })
}

/// A member of `L^ψ_{β,p}` built from the density `φ`.
///
/// The mean of `φ` is discarded, as are harmonics with `ψ(|k|) < e^{−690}`. With `normalize` set, the mean-free part is
/// scaled to unit `L_p` norm, so the returned function's `(ψ,β)`-derivative
/// lies on the unit sphere of `L_p`.
pub fn class_sample(phi: &TrigPoly, params: &ClassParams, normalize: bool) -> Result<TrigPoly, SpectralError> {
    params.psi.validate()?;
    // harmonics whose image would underflow cannot be recovered by the
    // derivative; drop them so the round trip stays exact
    let centered = phi.map(|k, c| {
        let keep = k != 0 && params.psi.ln_eval(k.unsigned_abs() as f64).is_ok_and(|l| l >= MIN_LN_PSI);
        if keep {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let density = if normalize {
        let norm = poly_norm(&centered, params.p);
        if norm == 0.0 {
            return Err(SpectralError::ZeroDensity);
        }
        centered.scale(1.0 / norm)
    } else {
        centered
    };
    let f = convolve(&density, params);
    let back = psi_beta_derivative(&f, params);
    let drift = back.max_coeff_diff(&density);
    let scale = density.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if drift > 1e-10 * scale {
        return Err(SpectralError::RoundTrip(drift));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn synthesize_basic_signals() {
        let one = TrigPoly::from_terms(&[(0, c(1.0, 0.0))]).unwrap();
        let s = synthesize(&one, 8).unwrap();
        assert!(s.values().iter().all(|v| (*v - c(1.0, 0.0)).norm() < 1e-15));

        let cos = TrigPoly::cosine(1, 1.0);
        let s = synthesize(&cos, 8).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            assert!((v.re - s.node(j).cos()).abs() < 1e-15);
        }

        let sin = TrigPoly::from_terms(&[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))]).unwrap();
        let s = synthesize(&sin, 8).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            assert!((v.re - s.node(j).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn synthesize_rejects_undersampling() {
        let p = TrigPoly::cosine(4, 1.0);
        assert!(matches!(synthesize(&p, 8), Err(SpectralError::Undersampled { .. })));
        assert!(matches!(synthesize(&p, 12), Err(SpectralError::Poly(PolyError::NotPowerOfTwo(12)))));
    }

    #[test]
    fn analyze_examples() {
        let s = GridSignal::sample(16, |_| 3.5).unwrap();
        let a = analyze(&s, 4).unwrap();
        assert!((a.poly.coeff(0) - c(3.5, 0.0)).norm() < 1e-15);
        assert!(a.poly.support().iter().all(|&k| k == 0 || a.poly.coeff(k).norm() < 1e-15));

        let s = GridSignal::sample(32, |t| (5.0 * t).cos()).unwrap();
        let a = analyze(&s, 6).unwrap();
        assert!((a.poly.coeff(5) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((a.poly.coeff(-5) - c(0.5, 0.0)).norm() < 1e-14);
        assert!(!a.is_aliased());

        let a = analyze(&s, 3).unwrap();
        assert!(a.is_aliased());
        assert!(analyze(&s, 15).is_ok());
        assert!(analyze(&s, 16).is_err());
    }

    #[test]
    fn norm_examples() {
        let one = GridSignal::sample(64, |_| 1.0).unwrap();
        assert!((lp_norm(&one, NormIndex::TWO) - (2.0 * PI).sqrt()).abs() < 1e-14);
        let cos = GridSignal::sample(256, f64::cos).unwrap();
        assert!((lp_norm(&cos, NormIndex::TWO) - PI.sqrt()).abs() < 1e-13);
        let cos = GridSignal::sample(4096, f64::cos).unwrap();
        assert!((lp_norm(&cos, NormIndex::ONE) - 4.0).abs() < 1e-6);
        assert!((lp_norm(&cos, NormIndex::Infinity) - 1.0).abs() < 1e-15);
        // p = 3 against ∫|cos|³ = 8/3
        let p3 = lp_norm(&cos, NormIndex::Finite(3.0));
        assert!((p3 - (8.0f64 / 3.0).cbrt()).abs() < 1e-6);
    }

    #[test]
    fn kernel_examples() {
        let psi = PsiFunction::exp_power(1.0, 1.0).unwrap();
        let k = kernel_poly(&psi, 0.0, 2).unwrap();
        let e = |x: f64| (-x).exp();
        assert!((k.poly.coeff(1) - c(e(1.0) / 2.0, 0.0)).norm() < 1e-16);
        assert!((k.poly.coeff(-2) - c(e(2.0) / 2.0, 0.0)).norm() < 1e-16);
        assert_eq!(k.poly.coeff(0), c(0.0, 0.0));
        assert!(k.poly.is_real());
        // Σ_{k>2} e^{−k} = e^{−3}/(1 − e^{−1})
        let tail = e(3.0) / (1.0 - e(1.0));
        assert!((k.tail_bound - tail).abs() < 1e-15);

        let k1 = kernel_poly(&psi, 1.0, 1).unwrap();
        assert_eq!(k1.poly.coeff(1), c(0.0, -e(1.0) / 2.0));
        assert_eq!(k1.poly.coeff(-1), c(0.0, e(1.0) / 2.0));

        let k4 = kernel_poly(&psi, 4.0, 5).unwrap();
        let k0 = kernel_poly(&psi, 0.0, 5).unwrap();
        assert_eq!(k4.poly, k0.poly);

        let k = kernel_poly(&psi, 0.37, 6).unwrap();
        assert!(k.poly.is_real());
    }

    #[test]
    fn truncation_degree_certifies_tail() {
        let psi = PsiFunction::exp_power(1.0, 1.0).unwrap();
        let n = kernel_truncation_degree(&psi, 1e-12).unwrap();
        assert!(kernel_tail_bound(&psi, n) < 1e-12 * psi.eval(1.0).unwrap());
        assert!(kernel_tail_bound(&psi, n - 1) >= 1e-12 * psi.eval(1.0).unwrap());
        assert!(kernel_tail_bound(&PsiFunction::power(1.0).unwrap(), 10).is_infinite());
    }

    #[test]
    fn derivative_of_kernel_is_dirichlet_like() {
        let psi = PsiFunction::exp_power(1.0, 1.0).unwrap();
        for beta in [0.0, 1.0, 0.3, 2.5] {
            let k = kernel_poly(&psi, beta, 6).unwrap();
            let params = ClassParams { psi, beta, p: NormIndex::TWO };
            let d = psi_beta_derivative(&k.poly, &params);
            for (j, v) in d.iter() {
                let want = if j == 0 { 0.0 } else { 0.5 };
                assert!((v - c(want, 0.0)).norm() < 1e-14, "beta {beta} k {j}: {v}");
            }
        }
    }

    #[test]
    fn derivative_kills_constant_and_inverts_single_harmonic() {
        let psi = PsiFunction::exp_power(1.0, 1.0).unwrap();
        let params = ClassParams { psi, beta: 0.0, p: NormIndex::TWO };
        let only_c0 = TrigPoly::from_terms(&[(0, c(2.0, 0.0))]).unwrap();
        assert_eq!(psi_beta_derivative(&only_c0, &params).mass(), 0.0);

        let f = TrigPoly::cosine(3, psi.eval(3.0).unwrap());
        let d = psi_beta_derivative(&f, &params);
        assert!(d.max_coeff_diff(&TrigPoly::cosine(3, 1.0)) < 1e-15);
    }

    #[test]
    fn class_sample_examples() {
        let psi = PsiFunction::exp_power(1.0, 1.0).unwrap();
        for p in [NormIndex::ONE, NormIndex::TWO, NormIndex::Infinity] {
            let params = ClassParams { psi, beta: 0.0, p };
            let phi = TrigPoly::cosine(1, 1.0);
            let f = class_sample(&phi, &params, true).unwrap();
            let scaled = phi.scale(1.0 / poly_norm(&phi, p));
            assert!(f.max_coeff_diff(&scaled.scale(psi.eval(1.0).unwrap())) < 1e-15);
        }

        let params = ClassParams { psi, beta: 2.0, p: NormIndex::TWO };
        let phi = TrigPoly::from_terms(&[(0, c(4.0, 0.0)), (2, c(0.3, 0.1)), (-2, c(0.3, -0.1))]).unwrap();
        let f = class_sample(&phi, &params, false).unwrap();
        assert_eq!(f.coeff(0), c(0.0, 0.0));
        let want = -phi.coeff(2) * psi.eval(2.0).unwrap();
        assert!((f.coeff(2) - want).norm() < 1e-16);
        assert!((f.coeff(-2) - want.conj()).norm() < 1e-16);

        let constant = TrigPoly::from_terms(&[(0, c(1.0, 0.0))]).unwrap();
        assert_eq!(class_sample(&constant, &params, true), Err(SpectralError::ZeroDensity));
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(quarter_turn(1.0, 1), c(0.0, 1.0));
        assert_eq!(quarter_turn(1.0, -1), c(0.0, -1.0));
        assert_eq!(quarter_turn(2.0, 1), c(-1.0, 0.0));
        assert_eq!(quarter_turn(-3.0, 1), c(0.0, 1.0));
        assert_eq!(quarter_turn(7.5, 0), c(1.0, 0.0));
        let z = quarter_turn(0.5, 1);
        assert!((z - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn grid_policy_sizes() {
        let g = GridPolicy::default();
        assert_eq!(g.grid_size(0, NormIndex::TWO), 8);
        assert_eq!(g.grid_size(8, NormIndex::TWO), 256);
        assert_eq!(g.grid_size(8, NormIndex::Infinity), 1024);
    }
}
