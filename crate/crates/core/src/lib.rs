//! Best `m`-term trigonometric approximation of periodic convolution classes
//! generated by rapidly decaying sequences `ψ`.
//!
//! The crate is organized bottom-up:
//!
//! * [`psi`] — generators `ψ`, their inverse and the characteristics `η`, `μ`, `K₀`;
//! * [`poly`] and [`spectral`] — trigonometric polynomials, FFT grids, `L_p`
//!   norms and the `(ψ,β)` multipliers;
//! * [`approx`] — Fourier-sum, best `m`-term and best orthogonal `m`-term
//!   errors with duality certificates;
//! * [`extremal`] — the polynomial that realizes the lower bound;
//! * [`io`] — CSV formats.

pub mod approx;
pub mod extremal;
pub mod io;
pub mod norm;
pub mod poly;
pub mod psi;
pub mod spectral;

pub use approx::{ApproxError, MTermResult, Method, Strategy};
pub use extremal::{build_fstar, ExtremalError, ExtremalFunction};
pub use norm::NormIndex;
pub use poly::{GridSignal, TrigPoly};
pub use psi::{classify, Evidence, PsiCharacteristics, PsiError, PsiFunction};
pub use spectral::{ClassParams, GridPolicy, SpectralError};
