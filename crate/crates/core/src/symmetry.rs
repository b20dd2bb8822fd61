//! Consistency checks of the zero-sphere characterizations.
//!
//! Each check compares a computed quantity with a tolerance. A check that
//! misses its tolerance by less than [`GUARD_BAND`]× is reported as marginal;
//! only a miss by the full guard factor makes the report's verdict
//! `violated`. A `consistent` verdict is agreement within quadrature error,
//! not a proof.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults::{
    required_n_theta, Orders, DIRECTION_ORDERS, EQUIVALENCE_CONSTANT, GUARD_BAND, NEAR_FIELD_ORDERS, STENCIL_STEP,
    TARGET_CENTERED_ORDERS, VOLUME_LADDER_UNIT, ZERO_THRESHOLD,
};
use crate::fourier::{scan_wavenumbers, zero_sphere_residual, ResidualSample, ScanConfig};
use crate::geometry::{direction_grid, surface_quadrature, volume_quadrature, Shape, SurfaceQuadrature};
use crate::kernels::{sph_bessel_j0, zero_wavenumbers, TransformKind};
use crate::potentials::{
    default_ladder, helmholtz_residual, jump_report, one_sided_limits, single_layer, spread_indices,
    target_centered_volume_potential, volume_potential, Side, VolumeRule,
};
use crate::{ComplexAmplitude, Error, Result, Vec3, WaveNumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Missed the tolerance, but by less than the guard factor.
    Marginal,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub k: Option<f64>,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub status: Status,
}

impl Check {
    pub fn at_most(name: &str, k: Option<f64>, value: f64, tolerance: f64) -> Self {
        let status = if value <= tolerance {
            Status::Pass
        } else if value < GUARD_BAND * tolerance {
            Status::Marginal
        } else {
            Status::Fail
        };
        Self { name: name.into(), k, value, bound: Bound::AtMost, tolerance, status }
    }

    pub fn at_least(name: &str, k: Option<f64>, value: f64, tolerance: f64) -> Self {
        let status = if value >= tolerance {
            Status::Pass
        } else if value > tolerance / GUARD_BAND {
            Status::Marginal
        } else {
            Status::Fail
        };
        Self { name: name.into(), k, value, bound: Bound::AtLeast, tolerance, status }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExteriorNorm {
    pub k: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpStatistics {
    pub k: f64,
    pub probes: usize,
    pub max_jump_error: f64,
    pub max_exterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub shape: String,
    pub mode: TransformKind,
    pub k_values: Vec<f64>,
    pub residuals: Vec<ResidualSample>,
    pub exterior_norms: Vec<ExteriorNorm>,
    pub jumps: Vec<JumpStatistics>,
    pub checks: Vec<Check>,
    pub tolerances: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl TheoremReport {
    fn new(shape: &Shape, mode: TransformKind) -> Self {
        Self {
            shape: shape.describe(),
            mode,
            k_values: Vec::new(),
            residuals: Vec::new(),
            exterior_norms: Vec::new(),
            jumps: Vec::new(),
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
            verdict: Verdict::Consistent,
        }
    }

    fn finish(mut self) -> Self {
        self.verdict = if self.checks.iter().any(|c| c.status == Status::Fail) {
            Verdict::Violated
        } else {
            Verdict::Consistent
        };
        self
    }

    fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    /// Checks with the given name.
    pub fn checks_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }

    /// Largest value among checks with the given name.
    pub fn max_value(&self, name: &str) -> Option<f64> {
        self.checks_named(name).map(|c| c.value).reduce(f64::max)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Quadrature orders used by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessOrders {
    /// Orders for transforms and far probes; `None` applies the resolution rule.
    pub transform: Option<Orders>,
    pub near_field: (usize, usize),
    pub directions: (usize, usize),
    pub target_centered: (usize, usize),
}

impl Default for HarnessOrders {
    fn default() -> Self {
        Self {
            transform: None,
            near_field: NEAR_FIELD_ORDERS,
            directions: DIRECTION_ORDERS,
            target_centered: TARGET_CENTERED_ORDERS,
        }
    }
}

impl HarnessOrders {
    /// Transform orders for wavenumbers up to `k_max`, checked against the
    /// resolution rule.
    pub fn resolve(&self, k_max: f64, r_max: f64) -> Result<Orders> {
        let orders = self.transform.unwrap_or_else(|| Orders::for_wavenumber(k_max, r_max));
        let required = required_n_theta(k_max, r_max);
        for n_theta in [orders.n_theta, self.near_field.0] {
            if n_theta < required {
                return Err(Error::UnderResolved { n_theta, k: k_max, required });
            }
        }
        Ok(orders)
    }
}

/// The 26 face, edge and corner directions of a cube.
pub fn cube_directions() -> Vec<Vec3> {
    let mut out = Vec::with_capacity(26);
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for l in -1i32..=1 {
                if (i, j, l) != (0, 0, 0) {
                    out.push(Vec3::new(i as f64, j as f64, l as f64).normalize());
                }
            }
        }
    }
    out
}

/// Probe points on shells of the given radii about `center`.
pub fn shell_probes(center: &Vec3, radii: &[f64]) -> Vec<Vec3> {
    let dirs = cube_directions();
    radii.iter().flat_map(|r| dirs.iter().map(move |d| center + *r * d)).collect()
}

/// `max 4π|x − center| |u(x)| / A` over the cube probes on shells at
/// `2 r_max` and `5 r_max`, for unit density. On a sphere this is `|j₀(ka)|`.
pub fn exterior_field_norm(quad: &SurfaceQuadrature, k: WaveNumber) -> Result<f64> {
    let center = quad.center;
    let r_max = quad.max_radius();
    let area = quad.area();
    shell_probes(&center, &[2.0 * r_max, 5.0 * r_max])
        .iter()
        .map(|x| Ok(4.0 * PI * (x - center).norm() * single_layer(quad, k, 1.0, x)?.norm() / area))
        .try_fold(0.0, |acc: f64, v: Result<f64>| Ok(acc.max(v?)))
}

/// Sphere checks at the first `n` surface zeros `k = mπ/a`.
pub fn verify_sphere_zero(a: f64, n: usize, orders: &HarnessOrders) -> Result<TheoremReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one zero must be requested".into()));
    }
    let ks = zero_wavenumbers(a, TransformKind::Surface, n)?;
    sphere_checks(a, &ks, orders)
}

/// The same checks at arbitrary wavenumbers; away from the zeros the
/// residual and exterior checks are expected to fail.
pub fn verify_sphere_at(a: f64, ks: &[WaveNumber], orders: &HarnessOrders) -> Result<TheoremReport> {
    sphere_checks(a, ks, orders)
}

struct SphereMeasurement {
    k: f64,
    residual: ResidualSample,
    exterior: f64,
    interior: f64,
    jump: JumpStatistics,
}

fn sphere_checks(a: f64, ks: &[WaveNumber], orders: &HarnessOrders) -> Result<TheoremReport> {
    let shape = Shape::sphere(a)?;
    let k_max = ks.iter().map(|k| k.get()).fold(0.0, f64::max);
    let o = orders.resolve(k_max, a)?;
    let quad = surface_quadrature(&shape, o.n_theta, o.n_phi)?;
    let near = surface_quadrature(&shape, orders.near_field.0, orders.near_field.1)?;
    let dirs = direction_grid(orders.directions.0, orders.directions.1)?;
    let ladder = default_ladder(near.spacing);
    let probes = spread_indices(near.len(), 12);
    let interior_limit = a - 4.0 * near.spacing;
    let cube = cube_directions();

    let measurements = ks
        .par_iter()
        .map(|&k| {
            let kv = k.get();
            let r = zero_sphere_residual(&quad, k, &dirs);
            let exterior = shell_probes(&Vec3::zeros(), &[2.0 * a, 5.0 * a])
                .iter()
                .map(|x| single_layer(&quad, k, 1.0, x).map(|u| u.norm() / a))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            // u = c a e^{ika} j₀(kr) inside
            let mut interior: f64 = 0.0;
            for j in 0..20 {
                let r = interior_limit * (j as f64 + 0.5) / 20.0;
                let x = r * cube[j % cube.len()];
                let exact = a * ComplexAmplitude::from_polar(1.0, kv * a) * sph_bessel_j0(kv * r)?;
                interior = interior.max((single_layer(&near, k, 1.0, &x)? - exact).norm());
            }
            let jr = jump_report(&near, k, 1.0, &probes, &ladder)?;
            Ok(SphereMeasurement {
                k: kv,
                residual: ResidualSample { k: kv, residual_max: r.max, residual_l2: r.l2 },
                exterior,
                interior,
                jump: JumpStatistics {
                    k: kv,
                    probes: probes.len(),
                    max_jump_error: jr.max_jump_error,
                    max_exterior: jr.max_exterior,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = TheoremReport::new(&shape, TransformKind::Surface);
    report.tolerance("residual_max", ZERO_THRESHOLD);
    report.tolerance("exterior_field", 1e-6);
    report.tolerance("interior_field", 1e-6);
    report.tolerance("jump", 1e-3);
    report.tolerance("exterior_normal_derivative", 1e-3);
    for m in measurements {
        let k = Some(m.k);
        report.k_values.push(m.k);
        report.checks.push(Check::at_most("residual_max", k, m.residual.residual_max, ZERO_THRESHOLD));
        report.checks.push(Check::at_most("exterior_field", k, m.exterior, 1e-6));
        report.checks.push(Check::at_most("interior_field", k, m.interior, 1e-6));
        report.checks.push(Check::at_most("jump", k, m.jump.max_jump_error, 1e-3));
        report.checks.push(Check::at_most("exterior_normal_derivative", k, m.jump.max_exterior, 1e-3));
        report.residuals.push(m.residual);
        report.exterior_norms.push(ExteriorNorm { k: m.k, value: m.exterior });
        report.jumps.push(m.jump);
    }
    Ok(report.finish())
}

/// Ball checks at the first `n` volume zeros: vanishing volume residual,
/// vanishing exterior potential, vanishing boundary value and normal
/// derivative from inside, and `(∇²+k²)w = −1` at interior points.
pub fn verify_ball_zero(a: f64, n: usize, orders: &HarnessOrders) -> Result<TheoremReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one zero must be requested".into()));
    }
    let ks = zero_wavenumbers(a, TransformKind::Volume, n)?;
    ball_checks(a, &ks, orders)
}

pub fn verify_ball_at(a: f64, ks: &[WaveNumber], orders: &HarnessOrders) -> Result<TheoremReport> {
    ball_checks(a, ks, orders)
}

fn ball_checks(a: f64, ks: &[WaveNumber], orders: &HarnessOrders) -> Result<TheoremReport> {
    let shape = Shape::sphere(a)?;
    let k_max = ks.iter().map(|k| k.get()).fold(0.0, f64::max);
    let o = orders.resolve(k_max, a)?;
    let vquad = volume_quadrature(&shape, o.n_r, o.n_theta, o.n_phi)?;
    let dirs = direction_grid(orders.directions.0, orders.directions.1)?;
    let rays = direction_grid(orders.target_centered.0, orders.target_centered.1)?;
    let ladder: Vec<f64> = default_ladder(VOLUME_LADDER_UNIT * a);
    let cube = cube_directions();
    let boundary: Vec<Vec3> = [(0.4, 0.3), (1.1, 2.0), (1.6, 4.0), (2.2, 0.9), (2.9, 5.5), (0.05, 1.0)]
        .iter()
        .map(|&(t, p)| crate::geometry::direction_from_angles(t, p))
        .collect();
    let h = STENCIL_STEP * a;

    let rows = ks
        .par_iter()
        .map(|&k| {
            let kv = k.get();
            let r = zero_sphere_residual(&vquad, k, &dirs);
            let exterior = shell_probes(&Vec3::zeros(), &[2.0 * a, 5.0 * a])
                .iter()
                .map(|x| volume_potential(&vquad, k, x, VolumeRule::Direct).map(|w| w.norm() / (a * a)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let field = |x: &Vec3| Ok(target_centered_volume_potential(&shape, k, x, &rays));
            let mut boundary_value: f64 = 0.0;
            let mut boundary_derivative: f64 = 0.0;
            for d in &boundary {
                let lim = one_sided_limits(field, &(a * d), d, Side::Interior, &ladder, a * a)?;
                boundary_value = boundary_value.max(lim.value.value.norm() / (a * a));
                boundary_derivative = boundary_derivative.max(lim.normal_derivative.value.norm() / a);
            }
            let mut helmholtz: f64 = 0.0;
            for j in 0..10 {
                let x = 0.8 * a * (j as f64 + 0.5) / 10.0 * cube[(3 * j) % cube.len()];
                helmholtz = helmholtz.max((helmholtz_residual(field, k, &x, h)? + 1.0).norm());
            }
            Ok((kv, r, exterior, boundary_value, boundary_derivative, helmholtz))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = TheoremReport::new(&shape, TransformKind::Volume);
    report.tolerance("residual_max", ZERO_THRESHOLD);
    report.tolerance("exterior_field", 1e-5);
    report.tolerance("boundary_value", 1e-3);
    report.tolerance("boundary_normal_derivative", 1e-3);
    report.tolerance("interior_helmholtz", 2e-3);
    for (kv, r, exterior, bv, bd, helm) in rows {
        let k = Some(kv);
        report.k_values.push(kv);
        report.residuals.push(ResidualSample { k: kv, residual_max: r.max, residual_l2: r.l2 });
        report.exterior_norms.push(ExteriorNorm { k: kv, value: exterior });
        report.checks.push(Check::at_most("residual_max", k, r.max, ZERO_THRESHOLD));
        report.checks.push(Check::at_most("exterior_field", k, exterior, 1e-5));
        report.checks.push(Check::at_most("boundary_value", k, bv, 1e-3));
        report.checks.push(Check::at_most("boundary_normal_derivative", k, bd, 1e-3));
        report.checks.push(Check::at_most("interior_helmholtz", k, helm, 2e-3));
    }
    Ok(report.finish())
}

/// Scans `shape` and checks the outcome against what a sphere would give:
/// zeros exactly at the sphere's zero wavenumbers, or no zero at all for any
/// other shape.
pub fn discriminate_shape(
    shape: &Shape,
    mode: TransformKind,
    config: &ScanConfig,
    orders: &HarnessOrders,
) -> Result<TheoremReport> {
    let r_max = shape.max_radius();
    let o = orders.resolve(config.k_max, r_max)?;
    let dirs = direction_grid(orders.directions.0, orders.directions.1)?;
    let curve = scan_wavenumbers(shape, mode, config, o, &dirs)?;

    let mut report = TheoremReport::new(shape, mode);
    report.k_values = curve.candidates.iter().map(|s| s.k).collect();
    report.residuals = curve.refined_minima.clone();
    report.tolerance("threshold", config.threshold);
    match shape.sphere_radius() {
        Some(a) => {
            let mut expected = Vec::new();
            for k in zero_wavenumbers(a, mode, (config.k_max * a / PI).ceil() as usize + 1)? {
                if k.get() >= config.k_min && k.get() <= config.k_max {
                    expected.push(k.get());
                }
            }
            let location_tol = 1e-6 / a;
            let near = |k: f64, list: &[f64]| list.iter().any(|e| (e - k).abs() <= location_tol);
            let found: Vec<f64> = curve.candidates.iter().map(|s| s.k).collect();
            let spurious = found.iter().filter(|&&k| !near(k, &expected)).count();
            let missed = expected.iter().filter(|&&k| !near(k, &found)).count();
            let offset = found
                .iter()
                .map(|k| expected.iter().map(|e| (e - k).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            report.tolerance("zero_location", location_tol);
            report.checks.push(Check::at_most("spurious_candidates", None, spurious as f64, 0.0));
            report.checks.push(Check::at_most("missed_zeros", None, missed as f64, 0.0));
            report.checks.push(Check::at_most("zero_location", None, offset, location_tol));
        }
        None => {
            report.checks.push(Check::at_least("residual_floor", None, curve.floor(), config.threshold));
            report.checks.push(Check::at_most("candidates", None, curve.candidates.len() as f64, 0.0));
        }
    }
    Ok(report.finish())
}

/// Co-vanishing of the Fourier residual `ρ_F` and the normalized exterior
/// field `ρ_E` of the unit single layer, at each wavenumber.
pub fn verify_equivalence(shape: &Shape, ks: &[WaveNumber], orders: &HarnessOrders) -> Result<TheoremReport> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("no wavenumbers given".into()));
    }
    let r_max = shape.max_radius();
    let k_max = ks.iter().map(|k| k.get()).fold(0.0, f64::max);
    let o = orders.resolve(k_max, r_max)?;
    let quad = surface_quadrature(shape, o.n_theta, o.n_phi)?;
    let dirs = direction_grid(orders.directions.0, orders.directions.1)?;
    let rows = ks
        .par_iter()
        .map(|&k| {
            let r = zero_sphere_residual(&quad, k, &dirs);
            Ok((k.get(), r, exterior_field_norm(&quad, k)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let (c, tol) = (EQUIVALENCE_CONSTANT, ZERO_THRESHOLD);
    let mut report = TheoremReport::new(shape, TransformKind::Surface);
    report.tolerance("constant", c);
    report.tolerance("zero_threshold", tol);
    for (kv, r, rho_e) in rows {
        let k = Some(kv);
        report.k_values.push(kv);
        report.residuals.push(ResidualSample { k: kv, residual_max: r.max, residual_l2: r.l2 });
        report.exterior_norms.push(ExteriorNorm { k: kv, value: rho_e });
        report.checks.push(Check::at_most("exterior_bound", k, rho_e, c * r.max + tol));
        report.checks.push(Check::at_most("fourier_bound", k, r.max, c * rho_e + tol));
        let disagree = (r.max <= tol) != (rho_e <= tol);
        report.checks.push(Check::at_most("co_vanishing", k, disagree as u8 as f64, 0.0));
    }
    Ok(report.finish())
}

/// Data `(∇²+k²)w = c₀` in `D`, `w = c₁`, `w_N = c₂` on `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverdeterminedData {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: WaveNumber,
}

impl OverdeterminedData {
    /// `|c₁ − c₀/k²| + |c₂|`.
    pub fn nondegeneracy(&self) -> f64 {
        let k = self.k.get();
        (self.c1 - self.c0 / (k * k)).abs() + self.c2.abs()
    }
}

/// Whether the data are non-degenerate, `|c₁ − c₀/k²| + |c₂| > 0`.
pub fn check_overdetermination(data: &OverdeterminedData) -> bool {
    data.nondegeneracy() > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarShape;
    use crate::geometry::ShCoefficient;
    use nalgebra::Rotation3;

    fn k(v: f64) -> WaveNumber {
        WaveNumber::new(v).unwrap()
    }

    #[test]
    fn check_status_uses_guard_band() {
        assert_eq!(Check::at_most("x", None, 1e-6, 1e-6).status, Status::Pass);
        assert_eq!(Check::at_most("x", None, 5e-6, 1e-6).status, Status::Marginal);
        assert_eq!(Check::at_most("x", None, 1e-5, 1e-6).status, Status::Fail);
        assert_eq!(Check::at_most("x", None, f64::NAN, 1e-6).status, Status::Fail);
        assert_eq!(Check::at_least("x", None, 2e-7, 1e-6).status, Status::Marginal);
        assert_eq!(Check::at_least("x", None, 1e-8, 1e-6).status, Status::Fail);
        assert_eq!(Check::at_most("n", None, 1.0, 0.0).status, Status::Fail);
    }

    #[test]
    fn cube_directions_are_distinct_units() {
        let d = cube_directions();
        assert_eq!(d.len(), 26);
        for (i, a) in d.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-15);
            assert!(d[i + 1..].iter().all(|b| (a - b).norm() > 0.1));
        }
    }

    #[test]
    fn overdetermination_examples() {
        let data = OverdeterminedData { c0: -1.0, c1: 0.0, c2: 0.0, k: k(1.0) };
        assert!(check_overdetermination(&data));
        assert_eq!(data.nondegeneracy(), 1.0);
        let kk = 1.7;
        let degenerate = OverdeterminedData { c0: kk * kk * 0.3, c1: 0.3, c2: 0.0, k: k(kk) };
        assert!(!check_overdetermination(&degenerate));
        assert!(check_overdetermination(&OverdeterminedData { c0: 0.0, c1: 0.0, c2: 0.5, k: k(2.0) }));
    }

    #[test]
    fn under_resolved_orders_are_rejected() {
        let orders = HarnessOrders {
            transform: Some(Orders { n_theta: 12, n_phi: 24, n_r: 16 }),
            ..Default::default()
        };
        assert!(matches!(verify_sphere_zero(1.0, 1, &orders), Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn exterior_norm_of_sphere_is_j0() {
        let q = surface_quadrature(&Shape::sphere(1.0).unwrap(), 32, 64).unwrap();
        let v = exterior_field_norm(&q, k(2.0)).unwrap();
        assert!((v - (2f64.sin() / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn equivalence_on_small_family() {
        let sphere = Shape::sphere(1.0).unwrap();
        let report = verify_equivalence(&sphere, &[k(2.0), k(PI)], &HarnessOrders::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        assert!(report.residuals[0].residual_max > 1e-2 && report.exterior_norms[0].value > 1e-2);
        assert!(report.residuals[1].residual_max < 1e-6 && report.exterior_norms[1].value < 1e-6);
    }

    #[test]
    fn rigid_motions_keep_residuals() {
        let base = Shape::ellipsoid([1.0, 1.0, 1.2]).unwrap();
        let dirs = direction_grid(16, 32).unwrap();
        let o = Orders::for_wavenumber(4.0, 1.2);
        let residual = |s: &Shape| {
            let q = surface_quadrature(s, o.n_theta, o.n_phi).unwrap();
            zero_sphere_residual(&q, k(4.0), &dirs)
        };
        let r0 = residual(&base);
        let shifted = residual(&base.translated(&Vec3::new(0.3, -0.7, 1.1)));
        assert!((r0.max - shifted.max).abs() < 1e-12);
        assert!((r0.l2 - shifted.l2).abs() < 1e-12);
        // a quarter turn about z maps the direction grid onto itself
        let quarter = Rotation3::from_axis_angle(&Vec3::z_axis(), PI / 2.0);
        let turned = residual(&base.rotated(&quarter).unwrap());
        assert!((r0.max - turned.max).abs() < 1e-9);
        assert!((r0.l2 - turned.l2).abs() < 1e-9);
    }

    #[test]
    fn star_translation_keeps_discrimination() {
        let star = StarShape::new(1.0, vec![ShCoefficient::new(2, 0, 0.05)], Vec3::zeros()).unwrap();
        let cfg = ScanConfig { k_min: 3.0, k_max: 3.5, n_k: 26, threshold: ZERO_THRESHOLD };
        let a = discriminate_shape(&Shape::Star(star.clone()), TransformKind::Surface, &cfg, &HarnessOrders::default()).unwrap();
        let moved = Shape::Star(star).translated(&Vec3::new(0.5, 0.0, -0.2));
        let b = discriminate_shape(&moved, TransformKind::Surface, &cfg, &HarnessOrders::default()).unwrap();
        assert_eq!(a.verdict, Verdict::Consistent);
        assert_eq!(a.verdict, b.verdict);
        let fa = a.max_value("residual_floor").unwrap();
        let fb = b.max_value("residual_floor").unwrap();
        assert!((fa - fb).abs() < 1e-12);
    }
}
