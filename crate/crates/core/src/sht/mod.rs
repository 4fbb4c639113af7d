//! Real spherical-harmonic transforms on the equiangular grid.
//!
//! Harmonics are real and orthonormal over the sphere:
//!
//! ```text
//! Y(l, 0)  = Pbar(l, 0)(cos theta)
//! Y(l, m)  = sqrt(2) Pbar(l, m)(cos theta) cos(m phi)     m > 0
//! Y(l, -m) = sqrt(2) Pbar(l, m)(cos theta) sin(m phi)     m > 0
//! ```
//!
//! so a constant field `f = 1` has `c(0, 0) = sqrt(4 pi)`.

mod coeffs;
pub mod legendre;
mod transform;

pub use coeffs::{power_spectrum, PowerSpectrum, ShCoefficients};
pub use transform::{eval_ylm, forward_sht, inverse_sht, ShtPlan};
