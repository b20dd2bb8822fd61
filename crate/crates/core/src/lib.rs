//! Surface and volume Fourier transforms, Helmholtz layer potentials and
//! zero-sphere symmetry checks for smooth closed surfaces in three dimensions.
//!
//! A closed surface `S` bounding a domain `D` is probed through
//!
//! * the constant-density surface transform `F_S(kβ) = ∫_S e^{ikβ·s} ds`,
//! * the indicator transform `F_D(kβ) = ∫_D e^{ikβ·x} dx`,
//! * the single-layer potential `u(x) = c ∫_S g(x,t) dt` and the volume
//!   potential `w(x) = ∫_D g(x,t) dt` with the outgoing Helmholtz kernel `g`.
//!
//! For a sphere of radius `a` the surface transform vanishes on the whole
//! frequency sphere `|ξ| = k` exactly when `j₀(ka) = 0`, and the indicator
//! transform of a ball vanishes when `sin(ka) = ka cos(ka)`. The [`symmetry`]
//! module runs consistency checks of these characterizations, [`fourier`]
//! scans wavenumbers for zero spheres and [`recovery`] searches star-shaped
//! surfaces for a minimizer of the sphericity residual.

pub mod cli;
pub mod defaults;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod kernels;
pub mod potentials;
pub mod recovery;
pub mod symmetry;

pub use error::{Error, Result};
pub use kernels::WaveNumber;

/// Points and vectors in ℝ³.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex value of a transform or potential at one evaluation point.
pub type ComplexAmplitude = num_complex::Complex64;
