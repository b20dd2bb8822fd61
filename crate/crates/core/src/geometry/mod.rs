//! Shapes, quadratures and direction grids.
//!
//! Analytic surfaces are radial graphs `x = c + r(θ,φ) r̂` about a center:
//! star shapes expanded in real spherical harmonics (degree ≤ 8) and
//! ellipsoids. Both are integrated with Gauss–Legendre in `cos θ` times the
//! trapezoid rule in `φ`, which converges spectrally for analytic radius
//! functions. Triangle meshes read from OFF files are integrated panel by
//! panel with the edge-midpoint rule.
//!
//! For an integrand `e^{ikβ·x}` choose `n_theta ≥ 10 + 4·k·r_max` (see
//! [`crate::defaults::required_n_theta`]); below that the quadrature stops
//! resolving the oscillation and errors grow quickly.

pub mod harmonics;
pub mod mesh;
pub mod quadrature;
pub mod shape;

pub use mesh::{load_mesh, mesh_quadrature, parse_off, TriMesh};
pub use quadrature::{
    direction_grid, gauss_legendre, surface_quadrature, volume_quadrature, DirectionGrid, SurfaceQuadrature,
    VolumeQuadrature,
};
pub use shape::{Ellipsoid, ShCoefficient, Shape, StarShape, SurfaceFrame};

use crate::Vec3;

/// Position of a point relative to a closed surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Inside,
    Outside,
    /// Within the caller's band of the surface; carries the distance estimate.
    NearSurface(f64),
}

/// Classifies `x` against `shape` with the near-surface band `band`.
pub fn point_locate(shape: &Shape, x: &Vec3, band: f64) -> Location {
    shape.locate(x, band)
}

#[inline]
pub fn direction_from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// `(θ, φ)` of a unit vector with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[inline]
pub fn angles_from_direction(d: &Vec3) -> (f64, f64) {
    let theta = d.z.clamp(-1.0, 1.0).acos();
    let mut phi = d.y.atan2(d.x);
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    if phi >= 2.0 * std::f64::consts::PI {
        phi = 0.0;
    }
    (theta, phi)
}
