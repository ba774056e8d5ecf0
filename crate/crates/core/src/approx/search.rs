//! Search over frequency sets of size `m`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::norm::NormIndex;
use crate::poly::TrigPoly;
use crate::spectral::GridPolicy;

use super::duality::witness_certificate;
use super::inner::{Evaluator, InnerFit, SolverOptions};
use super::{canonical_gamma, ApproxError, MTermResult, Method, Strategy, ENUMERATION_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub strategy: Strategy,
    pub enumeration_cap: u64,
    /// Swap evaluations allowed per term, `GreedySwap` only.
    pub swap_budget_per_term: usize,
    /// Extra frequency sets evaluated alongside the search. The result is the
    /// best of the search and the seeds.
    pub seeds: Vec<Vec<i64>>,
    pub policy: GridPolicy,
    pub solver: SolverOptions,
}

impl SearchOptions {
    pub fn new(strategy: Strategy) -> Self {
        SearchOptions {
            strategy,
            enumeration_cap: ENUMERATION_CAP,
            swap_budget_per_term: 50,
            seeds: Vec::new(),
            policy: GridPolicy::default(),
            solver: SolverOptions::default(),
        }
    }

    pub fn with_seeds(mut self, seeds: Vec<Vec<i64>>) -> Self {
        self.seeds = seeds;
        self
    }
}

/// Window indices ranked for greedy selection: larger `|f̂(k)|` first, ties
/// to smaller `|k|`, then to positive `k`.
pub fn greedy_order(f: &TrigPoly) -> Vec<i64> {
    let mut idx: Vec<i64> = f.iter().map(|(k, _)| k).collect();
    idx.sort_by(|&a, &b| {
        f.coeff(b)
            .norm()
            .total_cmp(&f.coeff(a).norm())
            .then(a.abs().cmp(&b.abs()))
            .then(b.cmp(&a))
    });
    idx
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Lexicographic `m`-combinations of `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    fn new(n: usize, m: usize) -> Self {
        Combinations { idx: (0..m).collect(), n, done: m > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let m = self.idx.len();
        let mut i = m;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - m + i {
                self.idx[i] += 1;
                for j in i + 1..m {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

struct Candidate {
    gamma: Vec<i64>,
    coeffs: Vec<Complex64>,
    error: f64,
    converged: bool,
}

/// Memoized objective over sorted frequency sets.
struct Objective<'a> {
    eval: Box<dyn Fn(&[i64]) -> InnerFit + 'a>,
    cache: RefCell<HashMap<Vec<i64>, (f64, Vec<Complex64>, bool)>>,
}

impl<'a> Objective<'a> {
    fn new(eval: impl Fn(&[i64]) -> InnerFit + 'a) -> Self {
        Objective { eval: Box::new(eval), cache: RefCell::new(HashMap::new()) }
    }

    fn candidate(&self, gamma: Vec<i64>) -> Candidate {
        if let Some((error, coeffs, converged)) = self.cache.borrow().get(&gamma) {
            return Candidate { gamma, coeffs: coeffs.clone(), error: *error, converged: *converged };
        }
        let fit = (self.eval)(&gamma);
        self.cache.borrow_mut().insert(gamma.clone(), (fit.error, fit.coeffs.clone(), fit.converged));
        Candidate { gamma, coeffs: fit.coeffs, error: fit.error, converged: fit.converged }
    }
}

fn sorted(mut g: Vec<i64>) -> Vec<i64> {
    g.sort_unstable();
    g
}

/// Frequencies `N+1, −N−1, N+2, …` used to pad a set past the window.
fn padding(degree: usize, count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    let mut k = degree as i64 + 1;
    while out.len() < count {
        out.push(k);
        if out.len() < count {
            out.push(-k);
        }
        k += 1;
    }
    out
}

fn run_search(
    f: &TrigPoly,
    m: usize,
    opts: &SearchOptions,
    objective: &Objective<'_>,
) -> Result<Candidate, ApproxError> {
    let window: Vec<i64> = f.iter().map(|(k, _)| k).collect();
    let w = window.len();

    if m >= w {
        let mut g = window.clone();
        g.extend(padding(f.degree(), m - w));
        return Ok(objective.candidate(sorted(g)));
    }

    let mut best = match opts.strategy {
        Strategy::Exhaustive => {
            let count = binomial(w as u64, m as u64);
            if count > opts.enumeration_cap {
                return Err(ApproxError::EnumerationCap { count, cap: opts.enumeration_cap });
            }
            let mut best: Option<Candidate> = None;
            for combo in Combinations::new(w, m) {
                let c = objective.candidate(combo.iter().map(|&i| window[i]).collect());
                if best.as_ref().is_none_or(|b| c.error < b.error) {
                    best = Some(c);
                }
            }
            best.expect("at least one subset")
        }
        Strategy::Greedy => objective.candidate(sorted(greedy_order(f)[..m].to_vec())),
        Strategy::GreedySwap => {
            let mut current = objective.candidate(sorted(greedy_order(f)[..m].to_vec()));
            let mut budget = opts.swap_budget_per_term * m.max(1);
            'outer: while budget > 0 && current.error > 0.0 {
                let outside: Vec<i64> =
                    window.iter().copied().filter(|k| current.gamma.binary_search(k).is_err()).collect();
                let mut step: Option<Candidate> = None;
                for &drop in &current.gamma {
                    for &add in &outside {
                        if budget == 0 {
                            break;
                        }
                        budget -= 1;
                        let g: Vec<i64> =
                            current.gamma.iter().copied().filter(|&k| k != drop).chain(std::iter::once(add)).collect();
                        let c = objective.candidate(sorted(g));
                        if step.as_ref().is_none_or(|s| c.error < s.error) {
                            step = Some(c);
                        }
                    }
                }
                match step {
                    Some(s) if s.error < current.error * (1.0 - 1e-12) => current = s,
                    _ => break 'outer,
                }
            }
            current
        }
    };

    for seed in &opts.seeds {
        let g = canonical_gamma(seed)?;
        if g.len() != m {
            continue;
        }
        let c = objective.candidate(g);
        if c.error < best.error {
            best = c;
        }
    }
    Ok(best)
}

fn finish(f: &TrigPoly, m: usize, s: NormIndex, method: Method, c: Candidate) -> MTermResult {
    MTermResult {
        m,
        s,
        gamma: c.gamma,
        coeffs: c.coeffs,
        error: c.error,
        method,
        certificate: witness_certificate(f, m, s).map(|(v, _)| v),
        converged: c.converged,
    }
}

/// Best `m`-term approximation `e_m(f)_s` with freely fitted coefficients.
pub fn best_mterm(f: &TrigPoly, m: usize, s: NormIndex, strategy: Strategy) -> Result<MTermResult, ApproxError> {
    best_mterm_with(f, m, s, &SearchOptions::new(strategy))
}

pub fn best_mterm_with(f: &TrigPoly, m: usize, s: NormIndex, opts: &SearchOptions) -> Result<MTermResult, ApproxError> {
    let ev = Evaluator::new(f, s, &opts.policy, opts.solver);
    let method = match opts.strategy {
        Strategy::Exhaustive => Method::Exhaustive,
        Strategy::Greedy => Method::Greedy,
        Strategy::GreedySwap => Method::GreedySwap,
    };
    if m == 0 {
        let c = Candidate { gamma: vec![], coeffs: vec![], error: ev.norm_of_f(), converged: true };
        return Ok(finish(f, 0, s, method, c));
    }
    let objective = Objective::new(|g: &[i64]| ev.fit(g));
    let c = run_search(f, m, opts, &objective)?;
    Ok(finish(f, m, s, method, c))
}

/// Best orthogonal `m`-term approximation `e⊥_m(f)_s`: coefficients pinned
/// to `f̂(k)`.
pub fn orthogonal_mterm(f: &TrigPoly, m: usize, s: NormIndex, strategy: Strategy) -> Result<MTermResult, ApproxError> {
    orthogonal_mterm_with(f, m, s, &SearchOptions::new(strategy))
}

pub fn orthogonal_mterm_with(
    f: &TrigPoly,
    m: usize,
    s: NormIndex,
    opts: &SearchOptions,
) -> Result<MTermResult, ApproxError> {
    let ev = Evaluator::new(f, s, &opts.policy, opts.solver);
    let method = match opts.strategy {
        Strategy::Exhaustive => Method::OrthogonalExhaustive,
        Strategy::Greedy => Method::OrthogonalGreedy,
        Strategy::GreedySwap => Method::OrthogonalGreedySwap,
    };
    if m == 0 {
        let c = Candidate { gamma: vec![], coeffs: vec![], error: ev.norm_of_f(), converged: true };
        return Ok(finish(f, 0, s, method, c));
    }
    let objective = Objective::new(|g: &[i64]| InnerFit {
        gamma: g.to_vec(),
        coeffs: g.iter().map(|&k| f.coeff(k)).collect(),
        error: ev.pinned_error(g),
        converged: true,
    });
    let c = run_search(f, m, opts, &objective)?;
    Ok(finish(f, m, s, method, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_sum(terms: &[(usize, f64)]) -> TrigPoly {
        let mut t = Vec::new();
        for &(k, a) in terms {
            if k == 0 {
                t.push((0, Complex64::new(a, 0.0)));
            } else {
                t.push((k as i64, Complex64::new(a / 2.0, 0.0)));
                t.push((-(k as i64), Complex64::new(a / 2.0, 0.0)));
            }
        }
        TrigPoly::from_terms(&t).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(17, 12), 6188);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u64::MAX);
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(4, 0).count(), 1);
    }

    #[test]
    fn empty_set_gives_norm() {
        let f = TrigPoly::cosine(1, 1.0);
        let r = best_mterm(&f, 0, NormIndex::TWO, Strategy::Exhaustive).unwrap();
        assert!((r.error - PI.sqrt()).abs() < 1e-14);
        assert!(r.gamma.is_empty());
    }

    #[test]
    fn exhaustive_two_terms() {
        let f = cos_sum(&[(1, 1.0), (2, 0.5)]);
        let r = best_mterm(&f, 2, NormIndex::TWO, Strategy::Exhaustive).unwrap();
        assert_eq!(r.gamma, vec![-1, 1]);
        assert!((r.error - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert_eq!(r.method, Method::Exhaustive);
    }

    #[test]
    fn orthogonal_linf_example() {
        let f = cos_sum(&[(1, 1.0), (5, 0.1)]);
        let r = orthogonal_mterm(&f, 2, NormIndex::Infinity, Strategy::Exhaustive).unwrap();
        assert_eq!(r.gamma, vec![-1, 1]);
        assert!((r.error - 0.1).abs() < 1e-12);
        assert_eq!(r.method, Method::OrthogonalExhaustive);
    }

    #[test]
    fn support_covered_means_zero_error() {
        let f = cos_sum(&[(1, 1.0), (3, 0.5)]);
        for s in [NormIndex::ONE, NormIndex::TWO, NormIndex::Infinity] {
            let r = orthogonal_mterm(&f, 4, s, Strategy::Greedy).unwrap();
            assert!(r.error < 1e-14, "{s}");
            let r = best_mterm(&f, 9, s, Strategy::Greedy).unwrap();
            assert_eq!(r.gamma.len(), 9);
            assert!(r.error < 1e-14);
        }
    }

    #[test]
    fn exhaustive_cap_refuses() {
        let f = TrigPoly::from_fn(12, |k| Complex64::new(1.0 / (1 + k.abs()) as f64, 0.0)).unwrap();
        let mut opts = SearchOptions::new(Strategy::Exhaustive);
        opts.enumeration_cap = 100;
        assert!(matches!(
            best_mterm_with(&f, 5, NormIndex::TWO, &opts),
            Err(ApproxError::EnumerationCap { count: 53130, cap: 100 })
        ));
    }

    #[test]
    fn greedy_tie_breaks() {
        let f = cos_sum(&[(1, 1.0), (2, 1.0)]);
        assert_eq!(greedy_order(&f), vec![1, -1, 2, -2, 0]);
    }

    #[test]
    fn seeds_can_only_improve() {
        let f = cos_sum(&[(1, 1.0), (2, 0.5), (3, 0.25)]);
        let base = best_mterm(&f, 2, NormIndex::Infinity, Strategy::Greedy).unwrap();
        let opts = SearchOptions::new(Strategy::Greedy).with_seeds(vec![vec![-3, 3], vec![1, 2]]);
        let seeded = best_mterm_with(&f, 2, NormIndex::Infinity, &opts).unwrap();
        assert!(seeded.error <= base.error);
    }
}
