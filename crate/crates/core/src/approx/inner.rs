//! Inner problem: best coefficients on a fixed frequency set.
//!
//! For `s = 2` the answer is the Fourier coefficients themselves. Otherwise
//! the discretized `L_s` error is minimized by iteratively reweighted least
//! squares; `s = 1` and `s = ∞` go through the smooth surrogates `L_{1.01}`
//! and `L_64` and are then polished by a diminishing-step subgradient method
//! on the true objective. Every reported error is the true discretized norm of
//! an actual approximant, hence an upper bound on the infimum.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::norm::NormIndex;
use crate::poly::TrigPoly;
use crate::spectral::{norm_of_values, GridPolicy};

use super::ApproxError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Surrogate exponent used for `s = 1`.
pub const L1_SURROGATE: f64 = 1.01;
/// Surrogate exponent used for `s = ∞`.
pub const LINF_SURROGATE: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Relative change of successive errors that stops the reweighting.
    pub rel_tol: f64,
    pub polish_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iters: 100, rel_tol: 1e-9, polish_steps: 200 }
    }
}

/// Best coefficients found on one frequency set.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFit {
    /// Sorted frequency set.
    pub gamma: Vec<i64>,
    /// Coefficients aligned with `gamma`.
    pub coeffs: Vec<Complex64>,
    pub error: f64,
    pub converged: bool,
}

/// Evaluates approximation errors of one function on the grid fixed by the
/// grid policy.
pub struct Evaluator<'a> {
    f: &'a TrigPoly,
    s: NormIndex,
    m: usize,
    /// Largest `|f̂(k)|`; the grid holds `f/scale` so tiny functions stay clear
    /// of the subnormal range.
    scale: f64,
    f_grid: Vec<Complex64>,
    opts: SolverOptions,
}

impl<'a> Evaluator<'a> {
    pub fn new(f: &'a TrigPoly, s: NormIndex, policy: &GridPolicy, opts: SolverOptions) -> Self {
        let m = policy.grid_size(f.degree(), s);
        let top = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let scale = if top > 0.0 { top } else { 1.0 };
        let mut f_grid = vec![ZERO; m];
        for (k, c) in f.iter() {
            f_grid[k.rem_euclid(m as i64) as usize] = c / scale;
        }
        fft(&mut f_grid, true);
        Evaluator { f, s, m, scale, f_grid, opts }
    }

    pub fn function(&self) -> &TrigPoly {
        self.f
    }

    pub fn norm_index(&self) -> NormIndex {
        self.s
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.m as i64) as usize
    }

    fn in_window(&self, k: i64) -> bool {
        k.unsigned_abs() as usize <= self.f.degree()
    }

    /// `‖f‖_s`, the error of the empty approximant.
    pub fn norm_of_f(&self) -> f64 {
        if self.s.is_two() {
            return self.f.l2_norm();
        }
        norm_of_values(&self.f_grid, self.s) * self.scale
    }

    fn residual(&self, active: &[i64], coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![ZERO; self.m];
        for (&k, &c) in active.iter().zip(coeffs) {
            buf[self.slot(k)] = c;
        }
        fft(&mut buf, true);
        for (b, f) in buf.iter_mut().zip(&self.f_grid) {
            *b = *f - *b;
        }
        buf
    }

    fn parseval_tail(&self, gamma: &[i64]) -> f64 {
        let tail: Vec<Complex64> =
            self.f.iter().filter(|(k, _)| gamma.binary_search(k).is_err()).map(|(_, c)| c).collect();
        (2.0 * PI).sqrt() * crate::poly::hypot_sum(tail.into_iter())
    }

    /// Error with coefficients pinned to `f̂(k)`, `k ∈ gamma` (sorted).
    pub fn pinned_error(&self, gamma: &[i64]) -> f64 {
        if self.s.is_two() {
            return self.parseval_tail(gamma);
        }
        let active: Vec<i64> = gamma.iter().copied().filter(|&k| self.in_window(k)).collect();
        let coeffs: Vec<Complex64> = active.iter().map(|&k| self.f.coeff(k) / self.scale).collect();
        norm_of_values(&self.residual(&active, &coeffs), self.s) * self.scale
    }

    /// Best coefficients on `gamma`; `gamma` must be sorted and distinct.
    pub fn fit(&self, gamma: &[i64]) -> InnerFit {
        let active: Vec<i64> = gamma.iter().copied().filter(|&k| self.in_window(k)).collect();
        // everything below works on f/scale
        let pinned: Vec<Complex64> = active.iter().map(|&k| self.f.coeff(k) / self.scale).collect();
        let pack = |coeffs: &[Complex64]| -> Vec<Complex64> {
            gamma
                .iter()
                .map(|k| active.binary_search(k).map(|i| coeffs[i] * self.scale).unwrap_or(ZERO))
                .collect()
        };

        if self.s.is_two() || active.is_empty() {
            let error = if self.s.is_two() { self.parseval_tail(gamma) } else { self.norm_of_f() };
            return InnerFit { gamma: gamma.to_vec(), coeffs: pack(&pinned), error, converged: true };
        }

        let mut best = Best::new(pinned.clone(), norm_of_values(&self.residual(&active, &pinned), self.s));
        if best.error == 0.0 {
            return InnerFit { gamma: gamma.to_vec(), coeffs: pack(&best.coeffs), error: 0.0, converged: true };
        }

        let target = match self.s {
            NormIndex::Infinity => LINF_SURROGATE,
            NormIndex::Finite(p) if p == 1.0 => L1_SURROGATE,
            NormIndex::Finite(p) => p,
        };
        let converged = self.irls(&active, target, pinned, &mut best);
        if self.s.is_one() || self.s.is_infinite() {
            self.polish(&active, &mut best);
        }
        InnerFit { gamma: gamma.to_vec(), coeffs: pack(&best.coeffs), error: best.error * self.scale, converged }
    }

    /// Reweighted least squares towards the `L_p` minimizer. Tracks the best
    /// iterate under the true objective in `best`.
    fn irls(&self, active: &[i64], p: f64, init: Vec<Complex64>, best: &mut Best) -> bool {
        let mut coeffs = init;
        let mut residual = self.residual(active, &coeffs);
        let r_max = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let mut eps = 0.1 * r_max;
        let eps_floor = 1e-10 * self.f_grid.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut p_k = if p > 2.0 { 2.0 } else { p };
        let mut last: Option<f64> = None;

        for _ in 0..self.opts.max_iters {
            if p > 2.0 {
                p_k = (p_k * 1.5).min(p);
            }
            let top = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
            if top == 0.0 {
                return true;
            }
            let weights: Vec<f64> = if p_k < 2.0 {
                residual
                    .iter()
                    .map(|r| (r.norm_sqr() + eps * eps).powf((p_k - 2.0) / 2.0))
                    .collect()
            } else {
                residual.iter().map(|r| (r.norm() / top).powf(p_k - 2.0).max(1e-300)).collect()
            };
            let Some(ls) = self.weighted_ls(active, &weights) else {
                return false;
            };
            if p_k > 2.0 {
                let q = 1.0 / (p_k - 1.0);
                for (c, l) in coeffs.iter_mut().zip(&ls) {
                    *c += (*l - *c) * q;
                }
            } else {
                coeffs = ls;
            }
            residual = self.residual(active, &coeffs);
            best.offer(&coeffs, norm_of_values(&residual, self.s));
            eps = (eps * 0.1).max(eps_floor);

            if p_k == p {
                let obj = norm_of_values(&residual, NormIndex::Finite(p));
                if let Some(prev) = last {
                    let smoothing_done = p_k >= 2.0 || eps <= eps_floor;
                    if smoothing_done && (prev - obj).abs() <= self.opts.rel_tol * prev.max(f64::MIN_POSITIVE) {
                        return true;
                    }
                }
                last = Some(obj);
            }
        }
        false
    }

    /// Solves `min Σ_j w_j |f_j − Σ_k c_k e^{ik t_j}|²` through the normal
    /// equations, whose Gram matrix is Toeplitz in the frequency differences.
    fn weighted_ls(&self, active: &[i64], weights: &[f64]) -> Option<Vec<Complex64>> {
        let g = active.len();
        let mut wt: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        fft(&mut wt, true);
        let mut wf: Vec<Complex64> = weights.iter().zip(&self.f_grid).map(|(&w, f)| f * w).collect();
        fft(&mut wf, false);

        let gram = DMatrix::from_fn(g, g, |a, b| wt[self.slot(active[b] - active[a])]);
        let rhs = DVector::from_iterator(g, active.iter().map(|&k| wf[self.slot(k)]));
        let sol = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram.lu().solve(&rhs)?,
        };
        sol.iter().all(|c| c.re.is_finite() && c.im.is_finite()).then(|| sol.iter().copied().collect())
    }

    /// Diminishing-step subgradient descent on the true `L_1` / `L_∞` error.
    fn polish(&self, active: &[i64], best: &mut Best) {
        let mut coeffs = best.coeffs.clone();
        let scale = if self.s.is_infinite() { best.error } else { best.error / (2.0 * PI) };
        let step0 = 0.25 * scale;
        let h = 2.0 * PI / self.m as f64;
        for t in 0..self.opts.polish_steps {
            let residual = self.residual(active, &coeffs);
            let grad: Vec<Complex64> = if self.s.is_infinite() {
                let (j, r) = residual
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                    .expect("grid is nonempty");
                if r.norm() == 0.0 {
                    return;
                }
                let u = r / r.norm();
                active
                    .iter()
                    .map(|&k| -u * Complex64::from_polar(1.0, -2.0 * PI * (k * j as i64) as f64 / self.m as f64))
                    .collect()
            } else {
                let mut u: Vec<Complex64> = residual
                    .iter()
                    .map(|r| if r.norm() > 0.0 { r / r.norm() } else { ZERO })
                    .collect();
                fft(&mut u, false);
                active.iter().map(|&k| -u[self.slot(k)] * h).collect()
            };
            let gnorm = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
            if gnorm == 0.0 {
                return;
            }
            let step = step0 / ((t + 1) as f64).sqrt() / gnorm;
            for (c, g) in coeffs.iter_mut().zip(&grad) {
                *c -= g * step;
            }
            let err = norm_of_values(&self.residual(active, &coeffs), self.s);
            best.offer(&coeffs, err);
        }
    }
}

struct Best {
    coeffs: Vec<Complex64>,
    error: f64,
}

impl Best {
    fn new(coeffs: Vec<Complex64>, error: f64) -> Self {
        Best { coeffs, error }
    }

    fn offer(&mut self, coeffs: &[Complex64], error: f64) {
        if error < self.error {
            self.error = error;
            self.coeffs.copy_from_slice(coeffs);
        }
    }
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    crate::spectral::fft_in_place(buf, inverse);
}

/// Best coefficients of `f` on `gamma` in `L_s`, with `gamma` confined to the
/// window `[−window, window]`.
pub fn best_coeffs_on_set(
    f: &TrigPoly,
    gamma: &[i64],
    s: NormIndex,
    window: usize,
) -> Result<InnerFit, ApproxError> {
    let sorted = super::canonical_gamma(gamma)?;
    if let Some(&k) = sorted.iter().find(|k| k.unsigned_abs() as usize > window) {
        return Err(ApproxError::OutsideWindow { k, window });
    }
    let ev = Evaluator::new(f, s, &GridPolicy::default(), SolverOptions::default());
    Ok(ev.fit(&sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{poly_norm, synthesize};

    fn cos_sum(terms: &[(usize, f64)]) -> TrigPoly {
        let mut t = Vec::new();
        for &(k, a) in terms {
            let half = Complex64::new(a / 2.0, 0.0);
            if k == 0 {
                t.push((0, Complex64::new(a, 0.0)));
            } else {
                t.push((k as i64, half));
                t.push((-(k as i64), half));
            }
        }
        TrigPoly::from_terms(&t).unwrap()
    }

    #[test]
    fn l2_closed_form() {
        let f = cos_sum(&[(1, 1.0), (2, 0.5)]);
        let fit = best_coeffs_on_set(&f, &[-1, 1], NormIndex::TWO, 2).unwrap();
        assert!((fit.error - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert_eq!(fit.coeffs, vec![Complex64::new(0.5, 0.0); 2]);
        let full = best_coeffs_on_set(&f, &[-2, -1, 1, 2], NormIndex::TWO, 2).unwrap();
        assert_eq!(full.error, 0.0);
    }

    #[test]
    fn linf_best_constant_for_cos2t() {
        let f = cos_sum(&[(2, 1.0)]);
        let fit = best_coeffs_on_set(&f, &[0], NormIndex::Infinity, 2).unwrap();
        // oracle: scan constants; sup |cos 2t − c| = 1 + |c|
        let scan = (-100..=100).map(|i| 1.0 + (i as f64 / 100.0).abs()).fold(f64::INFINITY, f64::min);
        assert!((fit.error - scan).abs() < 1e-12);
        assert!(fit.coeffs[0].norm() < 1e-12);
    }

    #[test]
    fn rejects_out_of_window_and_duplicates() {
        let f = cos_sum(&[(1, 1.0)]);
        assert!(matches!(
            best_coeffs_on_set(&f, &[3], NormIndex::TWO, 1),
            Err(ApproxError::OutsideWindow { k: 3, window: 1 })
        ));
        assert!(best_coeffs_on_set(&f, &[1, 1], NormIndex::TWO, 1).is_err());
    }

    #[test]
    fn irls_improves_on_pinned_coefficients() {
        // cos t + 0.6 cos 3t approximated on {±1}: in L_∞ the coefficient on
        // cos t can absorb part of cos 3t
        let f = cos_sum(&[(1, 1.0), (3, 0.6)]);
        for s in [NormIndex::ONE, NormIndex::Finite(1.5), NormIndex::Finite(4.0), NormIndex::Infinity] {
            let ev = Evaluator::new(&f, s, &GridPolicy::default(), SolverOptions::default());
            let pinned = ev.pinned_error(&[-1, 1]);
            let fit = ev.fit(&[-1, 1]);
            assert!(fit.error <= pinned, "{s}: {} > {pinned}", fit.error);
            // reported error is the norm of the actual approximant
            let approx = TrigPoly::from_terms(&[(-1, fit.coeffs[0]), (1, fit.coeffs[1])]).unwrap();
            let resid = TrigPoly::from_fn(3, |k| f.coeff(k) - approx.coeff(k)).unwrap();
            let direct = poly_norm(&resid, s);
            assert!((direct - fit.error).abs() < 1e-12 * direct.max(1.0), "{s}: {direct} vs {}", fit.error);
        }
    }

    #[test]
    fn linf_fit_beats_pinned_significantly() {
        // uniform approximation of cos t + 0.6 cos 2t by a constant: with
        // x = cos t the residual is 1.2x² + x − 0.6 − c, whose range on [−1, 1]
        // is [−1/4.8 − 0.6 − c, 1.6 − c]; the best c centres it
        let f = cos_sum(&[(1, 1.0), (2, 0.6)]);
        let ev = Evaluator::new(&f, NormIndex::Infinity, &GridPolicy::default(), SolverOptions::default());
        assert!((ev.pinned_error(&[0]) - 1.6).abs() < 1e-12);
        let fit = ev.fit(&[0]);
        let exact = (2.2 + 1.0 / 4.8) / 2.0;
        // the grid may miss the interior extremum slightly
        assert!(fit.error >= exact * (1.0 - 1e-3), "{}", fit.error);
        assert!(fit.error <= exact * (1.0 + 1e-3), "{} vs {exact}", fit.error);
        // oracle: 1-D scan over real c
        let m = 1024;
        let mut best = f64::INFINITY;
        for i in 0..=4000 {
            let c = -2.0 + i as f64 * 1e-3;
            let p = cos_sum(&[(0, -c), (1, 1.0), (2, 0.6)]);
            let v = crate::spectral::lp_norm(&synthesize(&p, m).unwrap(), NormIndex::Infinity);
            best = best.min(v);
        }
        assert!(fit.error <= best * (1.0 + 1e-3), "fit {} vs scan {best}", fit.error);
    }
}
