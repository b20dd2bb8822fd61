use std::f64::consts::PI;

use super::shape::Shape;
use super::direction_from_angles;
use crate::{Error, Result, Vec3};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending and
/// mirrored exactly about zero.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess for the i-th largest root
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Nodes, outward unit normals and area weights approximating `∫_S · ds`.
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub nodes: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Largest distance between neighbouring nodes.
    pub spacing: f64,
    pub center: Vec3,
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest node distance from the center.
    pub fn max_radius(&self) -> f64 {
        self.nodes.iter().map(|s| (s - self.center).norm()).fold(0.0, f64::max)
    }

    /// `Σ w_i (s_i − c)·N_i / 3`, the enclosed volume by the divergence theorem.
    pub fn enclosed_volume(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.normals)
            .zip(&self.weights)
            .map(|((s, n), w)| w * (s - self.center).dot(n) / 3.0)
            .sum()
    }

    pub fn translated(&self, shift: &Vec3) -> Self {
        Self {
            nodes: self.nodes.iter().map(|s| s + shift).collect(),
            center: self.center + shift,
            ..self.clone()
        }
    }
}

/// Nodes and volume weights approximating `∫_D · dx`.
#[derive(Debug, Clone)]
pub struct VolumeQuadrature {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub spacing: f64,
    pub shape: Shape,
}

impl VolumeQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Unit vectors on S² with weights summing to 4π. `antipode[q]` is the index
/// of `−β_q`, and the pair is stored as exact negations of each other.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub antipode: Vec<usize>,
}

impl DirectionGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Indices `q` with `q < antipode[q]`; one representative of each pair.
    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&q| q < self.antipode[q])
    }
}

/// Angular product rule: Gauss–Legendre in cos θ times the trapezoid rule in
/// φ. Yields `(θ, φ, weight)` in row-major `(θ, φ)` order.
fn angular_grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64, f64)> {
    let (mu, wmu) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in mu.iter().zip(&wmu) {
        let theta = x.acos();
        for j in 0..n_phi {
            out.push((theta, j as f64 * dphi, w * dphi));
        }
    }
    out
}

fn check_orders(pairs: &[(&str, usize, usize)]) -> Result<()> {
    for &(name, value, min) in pairs {
        if value < min {
            return Err(Error::InvalidOrder(format!("{name} = {value} is below the minimum {min}")));
        }
    }
    Ok(())
}

/// Largest neighbour distance on a `(θ, φ)` product grid of points.
fn grid_spacing(points: &[Vec3], n_theta: usize, n_phi: usize) -> f64 {
    let idx = |i: usize, j: usize| i * n_phi + j % n_phi;
    let mut h: f64 = 0.0;
    for i in 0..n_theta {
        for j in 0..n_phi {
            let p = &points[idx(i, j)];
            h = h.max((p - points[idx(i, j + 1)]).norm());
            if i + 1 < n_theta {
                h = h.max((p - points[idx(i + 1, j)]).norm());
            }
        }
    }
    h
}

/// Product rule on the radial parametrization `x(θ,φ) = c + r(θ,φ) r̂`, with
/// area weights from `|x_θ × x_φ| = r² / (N·r̂)` per unit solid angle.
pub fn surface_quadrature(shape: &Shape, n_theta: usize, n_phi: usize) -> Result<SurfaceQuadrature> {
    check_orders(&[("n_theta", n_theta, 8), ("n_phi", n_phi, 8)])?;
    let center = shape.center();
    let grid = angular_grid(n_theta, n_phi);
    let mut nodes = Vec::with_capacity(grid.len());
    let mut normals = Vec::with_capacity(grid.len());
    let mut weights = Vec::with_capacity(grid.len());
    for &(theta, phi, w) in &grid {
        let f = shape.frame(theta, phi);
        let cos_angle = f.normal.dot(&f.direction);
        if !(f.radius > 0.0) || !(cos_angle > 0.0) {
            return Err(Error::InvalidShape(format!("surface is not star-shaped at θ = {theta}, φ = {phi}")));
        }
        nodes.push(f.point(&center));
        normals.push(f.normal);
        weights.push(w * f.radius * f.radius / cos_angle);
    }
    let spacing = grid_spacing(&nodes, n_theta, n_phi);
    Ok(SurfaceQuadrature { nodes, normals, weights, spacing, center })
}

/// Radial Gauss–Legendre on `[0, r(θ,φ)]` nested in the angular product rule;
/// the weights carry the `ρ²` Jacobian.
pub fn volume_quadrature(shape: &Shape, n_r: usize, n_theta: usize, n_phi: usize) -> Result<VolumeQuadrature> {
    check_orders(&[("n_r", n_r, 8), ("n_theta", n_theta, 8), ("n_phi", n_phi, 8)])?;
    let center = shape.center();
    let (t, wt) = gauss_legendre(n_r);
    let radial: Vec<(f64, f64)> = t.iter().zip(&wt).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let grid = angular_grid(n_theta, n_phi);
    let mut nodes = Vec::with_capacity(grid.len() * n_r);
    let mut weights = Vec::with_capacity(grid.len() * n_r);
    let mut outer = Vec::with_capacity(grid.len());
    for &(theta, phi, w) in &grid {
        let dir = direction_from_angles(theta, phi);
        let r = shape.frame(theta, phi).radius;
        if !(r > 0.0) {
            return Err(Error::InvalidShape(format!("nonpositive radius at θ = {theta}, φ = {phi}")));
        }
        for &(s, ws) in &radial {
            nodes.push(center + r * s * dir);
            weights.push(w * r * r * r * s * s * ws);
        }
        outer.push(center + r * dir);
    }
    let max_r = shape.max_radius();
    let radial_gap = radial
        .windows(2)
        .map(|p| p[1].0 - p[0].0)
        .chain([1.0 - radial[n_r - 1].0])
        .fold(0.0, f64::max);
    let spacing = grid_spacing(&outer, n_theta, n_phi).max(radial_gap * max_r);
    Ok(VolumeQuadrature { nodes, weights, spacing, shape: shape.clone() })
}

/// Gauss–Legendre × trapezoid directions on S², closed under `β ↦ −β`.
pub fn direction_grid(n_theta: usize, n_phi: usize) -> Result<DirectionGrid> {
    check_orders(&[("n_theta", n_theta, 4), ("n_phi", n_phi, 4)])?;
    if n_phi % 2 != 0 {
        return Err(Error::InvalidOrder(format!("n_phi = {n_phi} must be even")));
    }
    let grid = angular_grid(n_theta, n_phi);
    let mut directions: Vec<Vec3> = grid.iter().map(|&(t, p, _)| direction_from_angles(t, p)).collect();
    let mut weights: Vec<f64> = grid.iter().map(|g| g.2).collect();
    let antipode: Vec<usize> = (0..grid.len())
        .map(|q| {
            let (i, j) = (q / n_phi, q % n_phi);
            (n_theta - 1 - i) * n_phi + (j + n_phi / 2) % n_phi
        })
        .collect();
    for q in 0..directions.len() {
        let a = antipode[q];
        if a < q {
            directions[q] = -directions[a];
            weights[q] = weights[a];
        }
    }
    Ok(DirectionGrid { directions, weights, antipode })
}
