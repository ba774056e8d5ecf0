//! Finite trigonometric polynomials and uniform grid samples.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `(Σ |c|²)^{1/2}` without squaring tiny magnitudes into the subnormal range.
pub fn hypot_sum(coeffs: impl Iterator<Item = Complex64> + Clone) -> f64 {
    let scale = coeffs.clone().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    coeffs.map(|c| (c / scale).norm_sqr()).sum::<f64>().sqrt() * scale
}

/// Tolerance of the conjugate-symmetry test behind [`TrigPoly::is_real`].
pub const REAL_TOL: f64 = 1e-14;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("expected {expected} coefficients for degree {degree}, got {got}")]
    Length { degree: usize, expected: usize, got: usize },
    #[error("coefficient at k = {0} is not finite")]
    NonFinite(i64),
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// `Σ_{k=−N}^{N} c_k e^{ikx}` with `c_k = f̂(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
    is_real: bool,
}

impl TrigPoly {
    /// Builds from the coefficient vector ordered `k = −N, …, N`.
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        let expected = 2 * degree + 1;
        if coeffs.len() != expected {
            return Err(PolyError::Length { degree, expected, got: coeffs.len() });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite(i as i64 - degree as i64));
        }
        let is_real = (0..=degree).all(|k| {
            let a = coeffs[degree + k];
            let b = coeffs[degree - k];
            (a - b.conj()).norm() <= REAL_TOL
        });
        Ok(TrigPoly { degree, coeffs, is_real })
    }

    pub fn from_fn(degree: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self, PolyError> {
        let n = degree as i64;
        TrigPoly::new(degree, (-n..=n).map(&mut f).collect())
    }

    pub fn zero(degree: usize) -> Self {
        TrigPoly { degree, coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1], is_real: true }
    }

    /// Builds from sparse `(k, c_k)` pairs; the degree is the largest `|k|`.
    /// Repeated indices accumulate.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Result<Self, PolyError> {
        let degree = terms.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for &(k, c) in terms {
            coeffs[(k + degree as i64) as usize] += c;
        }
        TrigPoly::new(degree, coeffs)
    }

    /// `a cos(kx)` as a polynomial.
    pub fn cosine(k: usize, a: f64) -> Self {
        let half = Complex64::new(a / 2.0, 0.0);
        if k == 0 {
            return TrigPoly::from_terms(&[(0, Complex64::new(a, 0.0))]).expect("finite");
        }
        TrigPoly::from_terms(&[(k as i64, half), (-(k as i64), half)]).expect("finite")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c_k`, zero outside `[−N, N]`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    /// Coefficients ordered `k = −N, …, N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n, c))
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    /// Indices with a nonzero coefficient.
    pub fn support(&self) -> Vec<i64> {
        self.iter().filter(|(_, c)| c.norm() != 0.0).map(|(k, _)| k).collect()
    }

    /// `Σ_k |c_k|²`.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖P‖₂ = (2π Σ |c_k|²)^{1/2}` under the unnormalized norm.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * PI).sqrt() * hypot_sum(self.coeffs.iter().copied())
    }

    /// Coefficient-wise map, keeping the degree.
    pub fn map(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        TrigPoly::from_fn(self.degree, |k| f(k, self.coeff(k))).expect("map produced non-finite coefficient")
    }

    /// Copy with the listed coefficients set to zero.
    pub fn without(&self, indices: &[i64]) -> Self {
        let mut out = self.clone();
        for &k in indices {
            if k.unsigned_abs() as usize <= self.degree {
                out.coeffs[(k + self.degree as i64) as usize] = Complex64::new(0.0, 0.0);
            }
        }
        out.is_real = TrigPoly::new(out.degree, out.coeffs.clone()).map(|p| p.is_real).unwrap_or(false);
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|_, c| c * a)
    }

    /// Pointwise value `Σ c_k e^{ikx}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * x)).sum()
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_diff(&self, other: &TrigPoly) -> f64 {
        let n = self.degree.max(other.degree) as i64;
        (-n..=n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }
}

/// Samples at `t_j = 2πj/M`, `M` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    values: Vec<Complex64>,
}

impl GridSignal {
    pub fn new(values: Vec<Complex64>) -> Result<Self, PolyError> {
        if !values.len().is_power_of_two() {
            return Err(PolyError::NotPowerOfTwo(values.len()));
        }
        Ok(GridSignal { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, PolyError> {
        GridSignal::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` on the `M`-point grid.
    pub fn sample(m: usize, f: impl Fn(f64) -> f64) -> Result<Self, PolyError> {
        let vals: Vec<f64> = (0..m).map(|j| f(node(j, m))).collect();
        GridSignal::from_real(&vals)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn node(&self, j: usize) -> f64 {
        node(j, self.values.len())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

/// `t_j = 2πj/M`.
pub fn node(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}
