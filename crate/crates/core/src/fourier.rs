//! Surface and volume Fourier transforms on the frequency sphere `|ξ| = k`,
//! the normalized sphericity residual, and wavenumber scans for zero spheres.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults::{Orders, REFINE_TOLERANCE};
use crate::geometry::{surface_quadrature, volume_quadrature, DirectionGrid, Shape, SurfaceQuadrature, VolumeQuadrature};
use crate::kernels::{check_unit, TransformKind};
use crate::{ComplexAmplitude, Error, Result, Vec3, WaveNumber};

/// A weighted point set whose exponential sums are Fourier transforms.
pub trait TransformSource: Sync {
    fn points(&self) -> &[Vec3];
    fn point_weights(&self) -> &[f64];

    /// The `k → 0` value of the transform (area or volume).
    fn total_weight(&self) -> f64 {
        self.point_weights().iter().sum()
    }
}

impl TransformSource for SurfaceQuadrature {
    fn points(&self) -> &[Vec3] {
        &self.nodes
    }
    fn point_weights(&self) -> &[f64] {
        &self.weights
    }
}

impl TransformSource for VolumeQuadrature {
    fn points(&self) -> &[Vec3] {
        &self.nodes
    }
    fn point_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `Σ w_i e^{ik β·x_i}` in node order.
#[inline]
fn exponential_sum(points: &[Vec3], weights: &[f64], k: f64, beta: &Vec3) -> ComplexAmplitude {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, w) in points.iter().zip(weights) {
        let (s, c) = (k * beta.dot(x)).sin_cos();
        re += w * c;
        im += w * s;
    }
    ComplexAmplitude::new(re, im)
}

/// Quadrature value of `∫_S e^{ikβ·s} ds`.
pub fn surface_transform(quad: &SurfaceQuadrature, k: WaveNumber, beta: &Vec3) -> Result<ComplexAmplitude> {
    check_unit(beta)?;
    Ok(exponential_sum(&quad.nodes, &quad.weights, k.get(), beta))
}

/// Quadrature value of `∫_D e^{ikβ·x} dx`.
pub fn volume_transform(vquad: &VolumeQuadrature, k: WaveNumber, beta: &Vec3) -> Result<ComplexAmplitude> {
    check_unit(beta)?;
    Ok(exponential_sum(&vquad.nodes, &vquad.weights, k.get(), beta))
}

/// Transform of any [`TransformSource`] at `kβ`.
pub fn transform<Q: TransformSource + ?Sized>(source: &Q, k: WaveNumber, beta: &Vec3) -> Result<ComplexAmplitude> {
    check_unit(beta)?;
    Ok(exponential_sum(source.points(), source.point_weights(), k.get(), beta))
}

/// Max and weighted-L² size of `|F(kβ)|` over a direction grid, both divided
/// by the `k → 0` value `A` of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub l2: f64,
}

/// `|F(kβ_q)|` for every direction of the grid. Only one direction of each
/// antipodal pair is summed since `F(−β) = conj F(β)`.
pub fn transform_magnitudes<Q: TransformSource + ?Sized>(source: &Q, k: WaveNumber, dirs: &DirectionGrid) -> Vec<f64> {
    let reps: Vec<usize> = dirs.representatives().collect();
    let values: Vec<f64> = reps
        .par_iter()
        .map(|&q| exponential_sum(source.points(), source.point_weights(), k.get(), &dirs.directions[q]).norm())
        .collect();
    let mut out = vec![0.0; dirs.len()];
    for (&q, v) in reps.iter().zip(values) {
        out[q] = v;
        out[dirs.antipode[q]] = v;
    }
    out
}

/// Sphericity residual: `max_q |F(kβ_q)| / A` and
/// `(Σ_q ω_q |F(kβ_q)|² / 4π)^{1/2} / A`.
pub fn zero_sphere_residual<Q: TransformSource + ?Sized>(source: &Q, k: WaveNumber, dirs: &DirectionGrid) -> Residual {
    let norm = source.total_weight();
    let mags = transform_magnitudes(source, k, dirs);
    let max = mags.iter().cloned().fold(0.0, f64::max) / norm;
    let l2 = (mags.iter().zip(&dirs.weights).map(|(m, w)| w * m * m).sum::<f64>() / (4.0 * PI)).sqrt() / norm;
    Residual { max, l2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub k: f64,
    pub residual_max: f64,
    pub residual_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub shape: String,
    pub mode: TransformKind,
    pub quadrature: Orders,
    pub directions: (usize, usize),
    pub threshold: f64,
}

/// Residuals sampled on a uniform k grid, and the refined local minima that
/// fell below the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCurve {
    pub metadata: CurveMetadata,
    pub samples: Vec<ResidualSample>,
    pub candidates: Vec<ResidualSample>,
    /// Every refined local minimum, candidate or not.
    pub refined_minima: Vec<ResidualSample>,
}

impl ResidualCurve {
    /// Smallest `residual_max` over the samples and refined minima.
    pub fn floor(&self) -> f64 {
        self.samples
            .iter()
            .chain(&self.refined_minima)
            .map(|s| s.residual_max)
            .fold(f64::INFINITY, f64::min)
    }

    /// `k,residual_max,residual_l2` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,residual_max,residual_l2\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", s.k, s.residual_max, s.residual_l2);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub threshold: f64,
}

impl ScanConfig {
    fn validate(&self) -> Result<()> {
        if !(self.k_min > 0.0 && self.k_min < self.k_max && self.k_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scan range needs 0 < k_min < k_max, got [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.n_k < 2 {
            return Err(Error::InvalidArgument(format!("n_k = {} must be at least 2", self.n_k)));
        }
        Ok(())
    }

    fn k_at(&self, i: usize) -> f64 {
        self.k_min + (self.k_max - self.k_min) * i as f64 / (self.n_k - 1) as f64
    }
}

/// Scans a shape's surface or volume transform over `[k_min, k_max]`.
pub fn scan_wavenumbers(
    shape: &Shape,
    mode: TransformKind,
    config: &ScanConfig,
    orders: Orders,
    dirs: &DirectionGrid,
) -> Result<ResidualCurve> {
    let metadata = CurveMetadata {
        shape: shape.describe(),
        mode,
        quadrature: orders,
        directions: direction_orders(dirs),
        threshold: config.threshold,
    };
    match mode {
        TransformKind::Surface => {
            let q = surface_quadrature(shape, orders.n_theta, orders.n_phi)?;
            scan_source(&q, metadata, config, dirs)
        }
        TransformKind::Volume => {
            let q = volume_quadrature(shape, orders.n_r, orders.n_theta, orders.n_phi)?;
            scan_source(&q, metadata, config, dirs)
        }
    }
}

fn direction_orders(dirs: &DirectionGrid) -> (usize, usize) {
    // rows share a polar angle; count them from the first column
    let first = dirs.directions[0].z;
    let n_phi = dirs.directions.iter().take_while(|d| d.z == first).count();
    (dirs.len() / n_phi.max(1), n_phi)
}

/// Scans an already built point set (for example a mesh quadrature).
pub fn scan_source<Q: TransformSource + ?Sized>(
    source: &Q,
    metadata: CurveMetadata,
    config: &ScanConfig,
    dirs: &DirectionGrid,
) -> Result<ResidualCurve> {
    config.validate()?;
    let residual_at = |k: f64| -> Result<ResidualSample> {
        let r = zero_sphere_residual(source, WaveNumber::new(k)?, dirs);
        Ok(ResidualSample { k, residual_max: r.max, residual_l2: r.l2 })
    };
    let samples = (0..config.n_k).map(|i| residual_at(config.k_at(i))).collect::<Result<Vec<_>>>()?;

    let mut refined_minima = Vec::new();
    for i in 1..samples.len() - 1 {
        let (prev, cur, next) = (samples[i - 1].residual_max, samples[i].residual_max, samples[i + 1].residual_max);
        if cur <= prev && cur < next {
            let k = golden_section(|k| residual_at(k).map(|s| s.residual_max), samples[i - 1].k, samples[i + 1].k)?;
            let refined = residual_at(k)?;
            // the bracket interior may be no better than the sampled point
            refined_minima.push(if refined.residual_max <= cur { refined } else { samples[i] });
        }
    }
    let candidates = refined_minima.iter().copied().filter(|s| s.residual_max <= config.threshold).collect();
    Ok(ResidualCurve { metadata, samples, candidates, refined_minima })
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, to
/// [`REFINE_TOLERANCE`] in the argument.
fn golden_section(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > REFINE_TOLERANCE {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::direction_grid;
    use crate::kernels::j0_unchecked;
    use approx::assert_relative_eq;

    fn k(v: f64) -> WaveNumber {
        WaveNumber::new(v).unwrap()
    }

    fn unit_sphere() -> SurfaceQuadrature {
        surface_quadrature(&Shape::sphere(1.0).unwrap(), 48, 96).unwrap()
    }

    #[test]
    fn sphere_surface_transform() {
        let q = unit_sphere();
        let beta = Vec3::new(2.0, -1.0, 2.0) / 3.0;
        assert!(surface_transform(&q, k(PI), &beta).unwrap().norm() < 1e-8);
        let f = surface_transform(&q, k(1.0), &beta).unwrap();
        assert_relative_eq!(f.re, 4.0 * PI * 1f64.sin(), max_relative = 1e-12);
        assert!(f.im.abs() < 1e-12);
        assert_relative_eq!(f.re, 10.5742, epsilon = 1e-4);
        let f = surface_transform(&q, k(1e-8), &beta).unwrap();
        assert_relative_eq!(f.re, q.area(), max_relative = 1e-14);
        assert!(surface_transform(&q, k(1.0), &Vec3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn ball_volume_transform() {
        let v = volume_quadrature(&Shape::sphere(1.0).unwrap(), 24, 32, 64).unwrap();
        let beta = Vec3::z();
        let f = volume_transform(&v, k(1.0), &beta).unwrap();
        let exact = 4.0 * PI * (1f64.sin() - 1f64.cos());
        assert_relative_eq!(f.re, exact, max_relative = 1e-12);
        assert_relative_eq!(f.re, 3.7846, epsilon = 1e-4);
        let kv = crate::kernels::zero_wavenumbers(1.0, TransformKind::Volume, 1).unwrap()[0];
        assert!(volume_transform(&v, kv, &beta).unwrap().norm() < 1e-8);
        let f = volume_transform(&v, k(1e-9), &beta).unwrap();
        assert_relative_eq!(f.re, 4.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn residual_examples() {
        let q = unit_sphere();
        let dirs = direction_grid(16, 32).unwrap();
        assert!(zero_sphere_residual(&q, k(PI), &dirs).max <= 1e-8);
        let r = zero_sphere_residual(&q, k(PI / 2.0), &dirs);
        assert_relative_eq!(r.max, 2.0 / PI, max_relative = 1e-12);
        assert!(r.l2 <= r.max * (4.0 * PI).sqrt());
        let shifted = surface_quadrature(
            &Shape::sphere(1.0).unwrap().translated(&Vec3::new(0.3, -0.1, 0.2)),
            48,
            96,
        )
        .unwrap();
        assert!(zero_sphere_residual(&shifted, k(PI), &dirs).max <= 1e-8);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let q = surface_quadrature(&Shape::ellipsoid([1.0, 0.9, 1.2]).unwrap(), 32, 64).unwrap();
        let beta = Vec3::new(0.48, -0.6, 0.64);
        let f = surface_transform(&q, k(2.7), &beta).unwrap();
        let g = surface_transform(&q, k(2.7), &(-beta)).unwrap();
        assert_eq!(f, g.conj());
    }

    #[test]
    fn sphere_scan_finds_j0_zeros() {
        let shape = Shape::sphere(1.0).unwrap();
        let dirs = direction_grid(6, 12).unwrap();
        let cfg = ScanConfig { k_min: 2.0, k_max: 7.0, n_k: 101, threshold: 1e-6 };
        let curve = scan_wavenumbers(&shape, TransformKind::Surface, &cfg, Orders::for_wavenumber(7.0, 1.0), &dirs).unwrap();
        let found: Vec<f64> = curve.candidates.iter().map(|c| c.k).collect();
        assert_eq!(found.len(), 2, "{found:?}");
        assert!((found[0] - PI).abs() < 1e-8);
        assert!((found[1] - 2.0 * PI).abs() < 1e-8);
        for s in &curve.samples {
            assert_relative_eq!(s.residual_max, j0_unchecked(s.k).abs(), epsilon = 1e-12);
        }
        let csv = curve.to_csv();
        assert_eq!(csv.lines().count(), 102);
        assert!(csv.starts_with("k,residual_max,residual_l2\n"));
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let shape = Shape::sphere(1.0).unwrap();
        let dirs = direction_grid(4, 8).unwrap();
        let orders = Orders::for_wavenumber(1.0, 1.0);
        for cfg in [
            ScanConfig { k_min: 0.0, k_max: 1.0, n_k: 5, threshold: 1e-6 },
            ScanConfig { k_min: 2.0, k_max: 1.0, n_k: 5, threshold: 1e-6 },
            ScanConfig { k_min: 1.0, k_max: 2.0, n_k: 1, threshold: 1e-6 },
        ] {
            assert!(scan_wavenumbers(&shape, TransformKind::Surface, &cfg, orders, &dirs).is_err());
        }
    }

    #[test]
    fn golden_section_finds_kink() {
        let x = golden_section(|x| Ok((x - 0.3).abs()), 0.0, 1.0).unwrap();
        assert!((x - 0.3).abs() < 1e-10);
    }
}
