//! Shadow-boundary amplitudes for knife-edge diffraction and their hp
//! best approximation on graded meshes.
//!
//! * [`specfun`]: complex Fresnel integral `Fr`, `F(z) = e^{-iz^2} Fr(z)`,
//!   the Faddeeva function and a quadrature oracle.
//! * [`geometry`]: analytic continuation of `r(s)`, `mu(s)` and the
//!   analyticity regions in the complex `s`-plane.
//! * [`amplitudes`]: the knife-edge field `E(r, psi)`, its geometrical-optics
//!   splitting, the amplitudes `h`, `g` and the shadow-boundary amplitude `V`.
//! * [`hpspace`]: geometric meshes, Gauss-Legendre rules and piecewise
//!   Legendre `L^2` projection.
//! * [`experiments`]: convergence sweeps, rate fits and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod amplitudes;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hpspace;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
