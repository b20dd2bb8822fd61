use std::f64::consts::PI;

use nalgebra::Rotation3;
use serde::{Deserialize, Serialize};

use super::harmonics::{real_sph_harm, real_sph_harm_with_derivatives};
use super::quadrature::gauss_legendre;
use super::{angles_from_direction, direction_from_angles, Location};
use crate::{Error, Result, Vec3};

/// Highest spherical-harmonic degree accepted in a [`StarShape`].
pub const MAX_DEGREE: usize = 8;

/// Coefficients with magnitude at or below this count as zero when deciding
/// whether a star shape is a sphere.
pub const SPHERE_COEFF_TOLERANCE: f64 = 1e-9;

/// Polar angles closer than this to a pole are moved off it before
/// differentiating the radius.
const POLE_NUDGE: f64 = 1e-7;

/// One term `c_lm Y_lm` of a star-shape radius expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShCoefficient {
    pub l: usize,
    pub m: i32,
    pub value: f64,
}

impl ShCoefficient {
    pub fn new(l: usize, m: i32, value: f64) -> Self {
        Self { l, m, value }
    }
}

/// Radius, outward unit normal and direction at one point of a radial surface.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceFrame {
    pub direction: Vec3,
    pub radius: f64,
    pub normal: Vec3,
}

impl SurfaceFrame {
    pub fn point(&self, center: &Vec3) -> Vec3 {
        center + self.radius * self.direction
    }
}

/// Star-shaped surface `r(θ,φ) = a₀ (1 + Σ c_lm Y_lm(θ,φ))` about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShape {
    base_radius: f64,
    coeffs: Vec<ShCoefficient>,
    center: Vec3,
    min_radius: f64,
    max_radius: f64,
}

/// Smallest and largest radius of `a₀ (1 + Σ c Y)` on a dense probe grid.
pub fn probe_radius_range(base_radius: f64, coeffs: &[ShCoefficient]) -> (f64, f64) {
    let n = 2 * MAX_DEGREE + 24;
    let (mu, _) = gauss_legendre(n);
    let n_phi = 2 * n;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    // poles are included explicitly
    let thetas = mu.iter().map(|x| x.acos()).chain([0.0, PI]);
    for theta in thetas {
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let r = base_radius * (1.0 + expansion(coeffs, theta, phi));
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

fn expansion(coeffs: &[ShCoefficient], theta: f64, phi: f64) -> f64 {
    coeffs.iter().map(|c| c.value * real_sph_harm(c.l, c.m, theta, phi)).sum()
}

impl StarShape {
    pub fn new(base_radius: f64, coeffs: Vec<ShCoefficient>, center: Vec3) -> Result<Self> {
        if !(base_radius > 0.0) || !base_radius.is_finite() {
            return Err(Error::InvalidShape(format!("base radius must be positive, got {base_radius}")));
        }
        for c in &coeffs {
            if c.l > MAX_DEGREE {
                return Err(Error::InvalidShape(format!("degree {} exceeds the cap {MAX_DEGREE}", c.l)));
            }
            if c.m.unsigned_abs() as usize > c.l {
                return Err(Error::InvalidShape(format!("order {} exceeds degree {}", c.m, c.l)));
            }
            if !c.value.is_finite() {
                return Err(Error::InvalidShape("non-finite coefficient".into()));
            }
        }
        if !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidShape("non-finite center".into()));
        }
        let (min_radius, max_radius) = probe_radius_range(base_radius, &coeffs);
        if min_radius <= 0.0 {
            return Err(Error::InvalidShape(format!(
                "radius function reaches {min_radius:e} <= 0"
            )));
        }
        Ok(Self { base_radius, coeffs, center, min_radius, max_radius })
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), Vec3::zeros())
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn coeffs(&self) -> &[ShCoefficient] {
        &self.coeffs
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn min_radius(&self) -> f64 {
        self.min_radius
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Largest coefficient magnitude; zero for a sphere.
    pub fn max_perturbation(&self) -> f64 {
        self.coeffs.iter().map(|c| c.value.abs()).fold(0.0, f64::max)
    }

    /// `r(θ, φ)`; rejects angles outside `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn star_radius(&self, theta: f64, phi: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("angles out of range: θ = {theta}, φ = {phi}")));
        }
        let r = self.radius_at(theta, phi);
        if r <= 0.0 {
            return Err(Error::InvalidShape(format!("radius {r:e} at θ = {theta}, φ = {phi}")));
        }
        Ok(r)
    }

    #[inline]
    pub fn radius_at(&self, theta: f64, phi: f64) -> f64 {
        self.base_radius * (1.0 + expansion(&self.coeffs, theta, phi))
    }

    /// `(r, ∂_θ r, ∂_φ r)`.
    fn radius_with_derivatives(&self, theta: f64, phi: f64) -> (f64, f64, f64) {
        let mut s = (1.0, 0.0, 0.0);
        for c in &self.coeffs {
            let y = real_sph_harm_with_derivatives(c.l, c.m, theta, phi);
            s.0 += c.value * y.value;
            s.1 += c.value * y.d_theta;
            s.2 += c.value * y.d_phi;
        }
        (self.base_radius * s.0, self.base_radius * s.1, self.base_radius * s.2)
    }

    /// Radius and outward normal at `(θ, φ)`. The normal is parallel to
    /// `x_θ × x_φ`, i.e. to `r r̂ − r_θ θ̂ − (r_φ / sin θ) φ̂`.
    pub fn frame(&self, theta: f64, phi: f64) -> SurfaceFrame {
        let direction = direction_from_angles(theta, phi);
        if self.coeffs.is_empty() {
            return SurfaceFrame { direction, radius: self.base_radius, normal: direction };
        }
        let t = theta.clamp(POLE_NUDGE, PI - POLE_NUDGE);
        let (r, r_t, r_p) = self.radius_with_derivatives(t, phi);
        let radius = if t == theta { r } else { self.radius_at(theta, phi) };
        let (st, ct) = t.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let e_r = Vec3::new(st * cp, st * sp, ct);
        let e_t = Vec3::new(ct * cp, ct * sp, -st);
        let e_p = Vec3::new(-sp, cp, 0.0);
        let normal = (r * e_r - r_t * e_t - (r_p / st) * e_p).normalize();
        SurfaceFrame { direction, radius, normal }
    }

    /// Rotation about the origin, re-fitting the coefficients on a grid that
    /// integrates every degree ≤ 8 product exactly.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Result<Self> {
        let mut degrees: Vec<usize> = self.coeffs.iter().map(|c| c.l).collect();
        degrees.sort_unstable();
        degrees.dedup();
        let n = MAX_DEGREE + 2;
        let n_phi = 2 * MAX_DEGREE + 4;
        let (mu, wmu) = gauss_legendre(n);
        let inverse = rotation.inverse();
        let mut samples = Vec::with_capacity(n * n_phi);
        for (x, w) in mu.iter().zip(&wmu) {
            let theta = x.acos();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let (t0, p0) = angles_from_direction(&(inverse * direction_from_angles(theta, phi)));
                let f = expansion(&self.coeffs, t0, p0);
                samples.push((theta, phi, w * 2.0 * PI / n_phi as f64, f));
            }
        }
        let mut coeffs = Vec::new();
        for &l in &degrees {
            for m in -(l as i32)..=l as i32 {
                let value: f64 = samples
                    .iter()
                    .map(|&(t, p, w, f)| w * f * real_sph_harm(l, m, t, p))
                    .sum();
                coeffs.push(ShCoefficient::new(l, m, value));
            }
        }
        Self::new(self.base_radius, coeffs, rotation * self.center)
    }
}

/// Ellipsoid `Σ (x_b,i / a_i)² = 1` in body coordinates `x_b = Rᵀ(x − c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    axes: [f64; 3],
    center: Vec3,
    rotation: Rotation3<f64>,
}

impl Ellipsoid {
    pub fn new(axes: [f64; 3], center: Vec3) -> Result<Self> {
        if axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidShape(format!("ellipsoid axes must be positive, got {axes:?}")));
        }
        Ok(Self { axes, center, rotation: Rotation3::identity() })
    }

    pub fn axes(&self) -> [f64; 3] {
        self.axes
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.rotation
    }

    fn radius_dir(&self, direction: &Vec3) -> f64 {
        let d = self.rotation.inverse() * direction;
        let q: f64 = (0..3).map(|i| (d[i] / self.axes[i]).powi(2)).sum();
        1.0 / q.sqrt()
    }

    fn frame_dir(&self, direction: Vec3) -> SurfaceFrame {
        let radius = self.radius_dir(&direction);
        let p = self.rotation.inverse() * (radius * direction);
        let g = Vec3::new(
            p.x / self.axes[0].powi(2),
            p.y / self.axes[1].powi(2),
            p.z / self.axes[2].powi(2),
        );
        let normal = (self.rotation * g).normalize();
        SurfaceFrame { direction, radius, normal }
    }

    /// Surface area of a spheroid with two equal axes, `None` otherwise.
    pub fn spheroid_area(&self) -> Option<f64> {
        let [a, b, c] = self.axes;
        let (eq, polar) = if a == b {
            (a, c)
        } else if a == c {
            (a, b)
        } else if b == c {
            (b, a)
        } else {
            return None;
        };
        Some(if polar > eq {
            let e = (1.0 - (eq / polar).powi(2)).sqrt();
            2.0 * PI * eq * eq * (1.0 + polar / (eq * e) * e.asin())
        } else if polar < eq {
            let e = (1.0 - (polar / eq).powi(2)).sqrt();
            2.0 * PI * eq * eq * (1.0 + (1.0 - e * e) / e * e.atanh())
        } else {
            4.0 * PI * eq * eq
        })
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI / 3.0 * self.axes.iter().product::<f64>()
    }
}

/// A closed radial surface about its center.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Star(StarShape),
    Ellipsoid(Ellipsoid),
}

impl From<StarShape> for Shape {
    fn from(s: StarShape) -> Self {
        Shape::Star(s)
    }
}

impl From<Ellipsoid> for Shape {
    fn from(e: Ellipsoid) -> Self {
        Shape::Ellipsoid(e)
    }
}

impl Shape {
    pub fn sphere(radius: f64) -> Result<Self> {
        StarShape::sphere(radius).map(Shape::Star)
    }

    pub fn ellipsoid(axes: [f64; 3]) -> Result<Self> {
        Ellipsoid::new(axes, Vec3::zeros()).map(Shape::Ellipsoid)
    }

    pub fn center(&self) -> Vec3 {
        match self {
            Shape::Star(s) => s.center,
            Shape::Ellipsoid(e) => e.center,
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            Shape::Star(s) => s.max_radius,
            Shape::Ellipsoid(e) => e.axes.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn min_radius(&self) -> f64 {
        match self {
            Shape::Star(s) => s.min_radius,
            Shape::Ellipsoid(e) => e.axes.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// Radius of the shape when it is exactly a sphere.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self {
            Shape::Star(s) if s.max_perturbation() <= SPHERE_COEFF_TOLERANCE => {
                // a pure Y₀₀ term only rescales
                let c00: f64 = s.coeffs.iter().filter(|c| c.l == 0).map(|c| c.value).sum();
                Some(s.base_radius * (1.0 + c00 * real_sph_harm(0, 0, 0.0, 0.0)))
            }
            Shape::Ellipsoid(e) if e.axes[0] == e.axes[1] && e.axes[1] == e.axes[2] => Some(e.axes[0]),
            _ => None,
        }
    }

    /// Radius in the unit direction `direction` (relative to the center).
    pub fn radius(&self, direction: &Vec3) -> f64 {
        match self {
            Shape::Star(s) => {
                let (t, p) = angles_from_direction(direction);
                s.radius_at(t, p)
            }
            Shape::Ellipsoid(e) => e.radius_dir(direction),
        }
    }

    pub fn frame(&self, theta: f64, phi: f64) -> SurfaceFrame {
        match self {
            Shape::Star(s) => s.frame(theta, phi),
            Shape::Ellipsoid(e) => e.frame_dir(direction_from_angles(theta, phi)),
        }
    }

    pub fn translated(&self, shift: &Vec3) -> Shape {
        let mut out = self.clone();
        match &mut out {
            Shape::Star(s) => s.center += shift,
            Shape::Ellipsoid(e) => e.center += shift,
        }
        out
    }

    /// Rotation about the origin.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Result<Shape> {
        Ok(match self {
            Shape::Star(s) => Shape::Star(s.rotated(rotation)?),
            Shape::Ellipsoid(e) => Shape::Ellipsoid(Ellipsoid {
                axes: e.axes,
                center: rotation * e.center,
                rotation: rotation * e.rotation,
            }),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Shape::Star(s) => {
                let c = s.center;
                if let Some(a) = self.sphere_radius() {
                    return format!("sphere a={a} center=({}, {}, {})", c.x, c.y, c.z);
                }
                let terms: Vec<String> =
                    s.coeffs.iter().map(|t| format!("{}*Y[{},{}]", t.value, t.l, t.m)).collect();
                format!("star a0={} [{}] center=({}, {}, {})", s.base_radius, terms.join(" + "), c.x, c.y, c.z)
            }
            Shape::Ellipsoid(e) => {
                let c = e.center;
                format!("ellipsoid axes={:?} center=({}, {}, {})", e.axes, c.x, c.y, c.z)
            }
        }
    }

    /// Classifies `x` against the surface. The gap is the radial distance
    /// `|x − c| − r(x̂)` scaled by `N·x̂`, a first-order distance estimate.
    pub fn locate(&self, x: &Vec3, band: f64) -> Location {
        let rel = x - self.center();
        let rho = rel.norm();
        if rho == 0.0 {
            return Location::Inside;
        }
        let dir = rel / rho;
        let (t, p) = angles_from_direction(&dir);
        let frame = self.frame(t, p);
        let gap = (rho - frame.radius) * frame.normal.dot(&dir);
        if gap.abs() < band {
            Location::NearSurface(gap.abs())
        } else if gap < 0.0 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Parameter intervals `[ρ₀, ρ₁]` with `x + ρβ ∈ D`, `ρ ≥ 0`.
    pub fn ray_segments(&self, x: &Vec3, beta: &Vec3) -> Vec<(f64, f64)> {
        match self {
            Shape::Star(s) if s.coeffs.is_empty() => {
                quadric_segment(&(x - s.center), beta, [s.base_radius; 3])
            }
            Shape::Star(s) => star_segments(s, x, beta),
            Shape::Ellipsoid(e) => {
                let inv = e.rotation.inverse();
                quadric_segment(&(inv * (x - e.center)), &(inv * beta), e.axes)
            }
        }
    }
}

fn quadric_segment(p: &Vec3, d: &Vec3, axes: [f64; 3]) -> Vec<(f64, f64)> {
    let mut qa = 0.0;
    let mut qb = 0.0;
    let mut qc = -1.0;
    for i in 0..3 {
        let s = 1.0 / (axes[i] * axes[i]);
        qa += d[i] * d[i] * s;
        qb += 2.0 * p[i] * d[i] * s;
        qc += p[i] * p[i] * s;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (mut r0, mut r1) = if q == 0.0 {
        let h = (-qc / qa).sqrt();
        (-h, h)
    } else {
        (q / qa, qc / q)
    };
    if r0 > r1 {
        std::mem::swap(&mut r0, &mut r1);
    }
    if r1 <= 0.0 {
        return Vec::new();
    }
    vec![(r0.max(0.0), r1)]
}

fn star_segments(s: &StarShape, x: &Vec3, beta: &Vec3) -> Vec<(f64, f64)> {
    let gap = |rho: f64| {
        let p = x + rho * beta - s.center;
        let n = p.norm();
        if n == 0.0 {
            return -s.min_radius;
        }
        let (t, ph) = angles_from_direction(&(p / n));
        n - s.radius_at(t, ph)
    };
    let rho_max = (x - s.center).norm() + 1.05 * s.max_radius;
    const SAMPLES: usize = 256;
    let mut crossings = Vec::new();
    let mut prev_rho = 0.0;
    let mut prev = gap(0.0);
    let starts_inside = prev < 0.0;
    for i in 1..=SAMPLES {
        let rho = rho_max * i as f64 / SAMPLES as f64;
        let cur = gap(rho);
        if (cur < 0.0) != (prev < 0.0) {
            let (mut lo, mut hi, f_lo) = (prev_rho, rho, prev);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (gap(mid) < 0.0) == (f_lo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev = cur;
        prev_rho = rho;
    }
    let mut bounds = Vec::with_capacity(crossings.len() + 1);
    if starts_inside {
        bounds.push(0.0);
    }
    bounds.extend(crossings);
    bounds.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}
