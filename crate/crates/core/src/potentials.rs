//! Single-layer and volume potentials of the outgoing Helmholtz kernel, their
//! one-sided boundary limits, far-field amplitudes and PDE residuals.
//!
//! Direct quadrature of `g(x, ·)` is only trusted at least
//! [`COLLAR_SPACINGS`] node spacings away from every node. Boundary limits
//! are taken along the normal on an offset ladder `ε₀ > ε₁ > …` outside the
//! collar and extrapolated polynomially to `ε = 0`. Interior values of the
//! volume potential use polar coordinates centered at the target, where the
//! `ρ²` Jacobian cancels the kernel singularity and the radial integral is
//! done in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::defaults::{COLLAR_SPACINGS, DIFFERENCE_FRACTION, LADDER_SPACINGS};
use crate::fourier::transform;
use crate::geometry::{direction_grid, DirectionGrid, Location, Shape, SurfaceQuadrature, VolumeQuadrature};
use crate::kernels::{check_unit, green_at_distance};
use crate::{ComplexAmplitude, Error, Result, Vec3, WaveNumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    SingleLayer,
    VolumePotential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: Vec3,
    pub value: ComplexAmplitude,
    pub kind: FieldKind,
}

fn collar_sum(points: &[Vec3], weights: &[f64], spacing: f64, k: f64, x: &Vec3) -> Result<ComplexAmplitude> {
    let collar = COLLAR_SPACINGS * spacing;
    let mut nearest = f64::INFINITY;
    let mut re = 0.0;
    let mut im = 0.0;
    for (s, w) in points.iter().zip(weights) {
        let d = (x - s).norm();
        nearest = nearest.min(d);
        let g = green_at_distance(d, k);
        re += w * g.re;
        im += w * g.im;
    }
    if !(nearest >= collar * (1.0 - 1e-12)) {
        return Err(Error::NearSingular { distance: nearest, collar });
    }
    Ok(ComplexAmplitude::new(re, im))
}

/// `c Σ_i w_i g(x, s_i, k)`, the quadrature value of `c ∫_S g(x,t) dt`.
pub fn single_layer(quad: &SurfaceQuadrature, k: WaveNumber, c: f64, x: &Vec3) -> Result<ComplexAmplitude> {
    Ok(c * collar_sum(&quad.nodes, &quad.weights, quad.spacing, k.get(), x)?)
}

/// How [`volume_potential`] treats targets inside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum VolumeRule {
    /// Direct quadrature; interior targets are rejected.
    Direct,
    /// Polar coordinates centered at the target, angular product rule of the
    /// given orders. Valid anywhere.
    TargetCentered { n_theta: usize, n_phi: usize },
}

/// Quadrature value of `w(x) = ∫_D g(x,t) dt`.
pub fn volume_potential(vquad: &VolumeQuadrature, k: WaveNumber, x: &Vec3, rule: VolumeRule) -> Result<ComplexAmplitude> {
    match rule {
        VolumeRule::Direct => {
            let collar = COLLAR_SPACINGS * vquad.spacing;
            match vquad.shape.locate(x, collar) {
                Location::Inside => Err(Error::InteriorWithoutSubtraction),
                Location::NearSurface(distance) => Err(Error::NearSingular { distance, collar }),
                Location::Outside => collar_sum(&vquad.nodes, &vquad.weights, vquad.spacing, k.get(), x),
            }
        }
        VolumeRule::TargetCentered { n_theta, n_phi } => {
            let dirs = direction_grid(n_theta, n_phi)?;
            Ok(target_centered_volume_potential(&vquad.shape, k, x, &dirs))
        }
    }
}

/// `∫_D g(x,t) dt = (1/4π) ∫_{S²} Σ_segments ∫ ρ e^{ikρ} dρ dβ` with polar
/// coordinates about `x`.
pub fn target_centered_volume_potential(shape: &Shape, k: WaveNumber, x: &Vec3, dirs: &DirectionGrid) -> ComplexAmplitude {
    let k = k.get();
    let mut sum = ComplexAmplitude::new(0.0, 0.0);
    for (beta, w) in dirs.directions.iter().zip(&dirs.weights) {
        for (r0, r1) in shape.ray_segments(x, beta) {
            sum += *w * (radial_moment(r1, k) - radial_moment(r0, k));
        }
    }
    sum / (4.0 * PI)
}

/// `∫₀^ρ t e^{ikt} dt`.
fn radial_moment(rho: f64, k: f64) -> ComplexAmplitude {
    let z = k * rho;
    if z < 1.0 {
        // Σ (ikρ)ⁿ ρ² / (n! (n+2))
        let mut term = ComplexAmplitude::new(rho * rho, 0.0);
        let mut sum = term / 2.0;
        let iz = ComplexAmplitude::new(0.0, z);
        for n in 1..30 {
            term *= iz / n as f64;
            sum += term / (n + 2) as f64;
        }
        sum
    } else {
        let e = ComplexAmplitude::from_polar(1.0, z);
        (e * ComplexAmplitude::new(1.0, -z) - 1.0) / (k * k)
    }
}

/// Which side of the surface a one-sided limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// From inside `D`, along `−N`.
    Interior,
    /// From the exterior, along `+N`.
    Exterior,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

/// An extrapolated limit with the size of its last correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub value: ComplexAmplitude,
    pub error_estimate: f64,
}

/// Ladder `LADDER_SPACINGS · h` for a quadrature of spacing `h`.
pub fn default_ladder(spacing: f64) -> Vec<f64> {
    LADDER_SPACINGS.iter().map(|m| m * spacing).collect()
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 3 || ladder.iter().any(|e| !(*e > 0.0)) || ladder.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::LadderNotMonotone);
    }
    Ok(())
}

/// Polynomial extrapolation to 0 of samples `f(ε_j)`. Successive estimates
/// add one ladder point at a time starting from the smallest offset; the
/// error estimate is the last correction, and a last correction larger than
/// the previous one (and above `floor`) counts as divergence.
pub fn extrapolate_to_zero(eps: &[f64], values: &[ComplexAmplitude], floor: f64) -> Result<Limit> {
    let n = eps.len();
    assert_eq!(n, values.len());
    // order points by increasing offset
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
    let xs: Vec<f64> = idx.iter().map(|&i| eps[i]).collect();
    let mut p: Vec<ComplexAmplitude> = idx.iter().map(|&i| values[i]).collect();
    // Neville: after round m, p[i] interpolates points i..=i+m at 0
    let mut estimates = vec![p[0]];
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (p[i] * (-xj) - p[i + 1] * (-xi)) / (xi - xj);
        }
        estimates.push(p[0]);
    }
    let diffs: Vec<f64> = estimates.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let last = diffs[diffs.len() - 1];
    if diffs.len() >= 2 {
        let previous = diffs[diffs.len() - 2];
        if last > previous && last > floor {
            return Err(Error::ExtrapolationDivergence { previous, last });
        }
    }
    Ok(Limit { value: estimates[n - 1], error_estimate: last })
}

/// One-sided limits of a field and of its normal derivative at `point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSidedLimits {
    pub value: Limit,
    pub normal_derivative: Limit,
}

/// Evaluates `f(p ± εN)` and the centered difference
/// `(f(p ± εN + δN) − f(p ± εN − δN)) / 2δ` with `δ = ε/4` on the ladder,
/// then extrapolates both to `ε = 0`. The difference error is a polynomial in
/// `ε`, so the extrapolation removes it along with the offset error.
pub fn one_sided_limits<F>(field: F, point: &Vec3, normal: &Vec3, side: Side, ladder: &[f64], scale: f64) -> Result<OneSidedLimits>
where
    F: Fn(&Vec3) -> Result<ComplexAmplitude>,
{
    check_ladder(ladder)?;
    let mut values = Vec::with_capacity(ladder.len());
    let mut derivs = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let x = point + side.sign() * eps * normal;
        let delta = DIFFERENCE_FRACTION * eps;
        values.push(field(&x)?);
        let hi = field(&(x + delta * normal))?;
        let lo = field(&(x - delta * normal))?;
        derivs.push((hi - lo) / (2.0 * delta));
    }
    let floor = 1e-4 * scale;
    Ok(OneSidedLimits {
        value: extrapolate_to_zero(ladder, &values, floor)?,
        normal_derivative: extrapolate_to_zero(ladder, &derivs, floor)?,
    })
}

/// `(u_N)` at surface node `surface_index`, approached from `side`.
pub fn boundary_normal_derivative(
    quad: &SurfaceQuadrature,
    k: WaveNumber,
    c: f64,
    surface_index: usize,
    side: Side,
    ladder: &[f64],
) -> Result<Limit> {
    let point = quad
        .nodes
        .get(surface_index)
        .ok_or_else(|| Error::InvalidArgument(format!("surface index {surface_index} out of range")))?;
    let normal = &quad.normals[surface_index];
    let limits = one_sided_limits(|x| single_layer(quad, k, c, x), point, normal, side, ladder, c.abs().max(1.0))?;
    Ok(limits.normal_derivative)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub surface_index: usize,
    pub point: Vec3,
    pub interior: Limit,
    pub exterior: Limit,
    pub jump: ComplexAmplitude,
}

/// Normal-derivative limits on both sides at a set of surface nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub density: f64,
    pub records: Vec<JumpRecord>,
    /// `max |(u_N)₊ − (u_N)₋ − c|`.
    pub max_jump_error: f64,
    /// `max |(u_N)₋|`.
    pub max_exterior: f64,
}

pub fn jump_report(quad: &SurfaceQuadrature, k: WaveNumber, c: f64, indices: &[usize], ladder: &[f64]) -> Result<JumpReport> {
    let mut records = Vec::with_capacity(indices.len());
    for &i in indices {
        let interior = boundary_normal_derivative(quad, k, c, i, Side::Interior, ladder)?;
        let exterior = boundary_normal_derivative(quad, k, c, i, Side::Exterior, ladder)?;
        records.push(JumpRecord {
            surface_index: i,
            point: quad.nodes[i],
            interior,
            exterior,
            jump: interior.value - exterior.value,
        });
    }
    let max_jump_error = records.iter().map(|r| (r.jump - c).norm()).fold(0.0, f64::max);
    let max_exterior = records.iter().map(|r| r.exterior.value.norm()).fold(0.0, f64::max);
    Ok(JumpReport { density: c, records, max_jump_error, max_exterior })
}

/// `count` node indices spread evenly through the quadrature.
pub fn spread_indices(len: usize, count: usize) -> Vec<usize> {
    (0..count).map(|j| (2 * j + 1) * len / (2 * count)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldRecord {
    pub radius: f64,
    /// `4πR e^{−ikR} u(−Rβ)`.
    pub amplitude: ComplexAmplitude,
    /// `|amplitude − c F_S(kβ)|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldComparison {
    pub beta: Vec3,
    /// `c F_S(kβ)`.
    pub transform: ComplexAmplitude,
    pub records: Vec<FarFieldRecord>,
    /// Least-squares slope of `ln|u|` against `ln r` along `x = −rβ`.
    pub decay_exponent: f64,
    /// Same fit for `|u_r − iku|`.
    pub radiation_exponent: f64,
}

/// Radii `[5, 40]·r_max`, eight geometric samples, used for the decay fits.
pub fn decay_fit_radii(r_max: f64) -> Vec<f64> {
    (0..8).map(|j| 5.0 * r_max * 8f64.powf(j as f64 / 7.0)).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Compares the far-field amplitude of `u` along `x = −Rβ` with the surface
/// transform, and fits the decay exponents of `u` and of `u_r − iku`.
pub fn far_field_compare(quad: &SurfaceQuadrature, k: WaveNumber, c: f64, beta: &Vec3, radii: &[f64]) -> Result<FarFieldComparison> {
    check_unit(beta)?;
    let r_max = quad.nodes.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let minimum = 5.0 * r_max;
    if let Some(&radius) = radii.iter().find(|&&r| r < minimum) {
        return Err(Error::RadiusTooSmall { radius, minimum });
    }
    let kv = k.get();
    let transform = c * transform(quad, k, beta)?;
    let u = |r: f64| single_layer(quad, k, c, &(-r * beta));
    let records = radii
        .iter()
        .map(|&radius| {
            let amplitude = 4.0 * PI * radius * ComplexAmplitude::from_polar(1.0, -kv * radius) * u(radius)?;
            Ok(FarFieldRecord { radius, amplitude, error: (amplitude - transform).norm() })
        })
        .collect::<Result<Vec<_>>>()?;

    let fit_radii = decay_fit_radii(r_max);
    let magnitudes = fit_radii.iter().map(|&r| u(r).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let h = 1e-3 * r_max;
    let radiation = fit_radii
        .iter()
        .map(|&r| {
            let ur = (u(r + h)? - u(r - h)?) / (2.0 * h);
            Ok((ur - ComplexAmplitude::new(0.0, kv) * u(r)?).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FarFieldComparison {
        beta: *beta,
        transform,
        records,
        decay_exponent: log_log_slope(&fit_radii, &magnitudes),
        radiation_exponent: log_log_slope(&fit_radii, &radiation),
    })
}

/// Seven-point approximation of `(∇² + k²) f` at `x` with step `h`.
pub fn helmholtz_residual<F>(field: F, k: WaveNumber, x: &Vec3, h: f64) -> Result<ComplexAmplitude>
where
    F: Fn(&Vec3) -> Result<ComplexAmplitude>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("stencil step must be positive, got {h}")));
    }
    let center = field(x)?;
    let mut lap = -6.0 * center;
    for axis in 0..3 {
        let mut e = Vec3::zeros();
        e[axis] = h;
        lap += field(&(x + e))? + field(&(x - e))?;
    }
    Ok(lap / (h * h) + k.get() * k.get() * center)
}
