//! The `L_p` norm index, `p ∈ [1, ∞]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A norm index `p` with `1 ≤ p ≤ ∞`.
///
/// `p = 1` and `p = ∞` are represented exactly; everything else is a finite
/// `f64` strictly above one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormRepr", into = "NormRepr")]
pub enum NormIndex {
    Finite(f64),
    Infinity,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NormIndexError {
    #[error("norm index must satisfy p >= 1, got {0}")]
    BelowOne(f64),
    #[error("norm index is not a number: {0:?}")]
    Unparsable(String),
}

impl NormIndex {
    pub const ONE: NormIndex = NormIndex::Finite(1.0);
    pub const TWO: NormIndex = NormIndex::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self, NormIndexError> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormIndex::Infinity);
        }
        if !(p >= 1.0) {
            return Err(NormIndexError::BelowOne(p));
        }
        Ok(NormIndex::Finite(p))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, NormIndex::Infinity)
    }

    pub fn is_two(self) -> bool {
        matches!(self, NormIndex::Finite(p) if p == 2.0)
    }

    pub fn is_one(self) -> bool {
        matches!(self, NormIndex::Finite(p) if p == 1.0)
    }

    /// The exponent as an `f64` (`f64::INFINITY` for `p = ∞`).
    pub fn value(self) -> f64 {
        match self {
            NormIndex::Finite(p) => p,
            NormIndex::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate `s'` with `1/s + 1/s' = 1`; `1 ↔ ∞`.
    pub fn conjugate(self) -> NormIndex {
        match self {
            NormIndex::Infinity => NormIndex::ONE,
            NormIndex::Finite(p) if p == 1.0 => NormIndex::Infinity,
            NormIndex::Finite(p) => NormIndex::Finite(p / (p - 1.0)),
        }
    }

    /// Short label used in file names and CSV cells (`1`, `2`, `inf`, `1.5`).
    pub fn label(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormIndex::Infinity => f.write_str("inf"),
            NormIndex::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for NormIndex {
    type Err = NormIndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(NormIndex::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| NormIndexError::Unparsable(t.to_string()))?;
                if p.is_nan() {
                    return Err(NormIndexError::Unparsable(t.to_string()));
                }
                NormIndex::finite(p)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NormRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<NormRepr> for NormIndex {
    type Error = NormIndexError;

    fn try_from(r: NormRepr) -> Result<Self, Self::Error> {
        match r {
            NormRepr::Number(p) => NormIndex::finite(p),
            NormRepr::Text(s) => s.parse(),
        }
    }
}

impl From<NormIndex> for NormRepr {
    fn from(n: NormIndex) -> Self {
        match n {
            NormIndex::Infinity => NormRepr::Text("inf".into()),
            NormIndex::Finite(p) => NormRepr::Number(p),
        }
    }
}
