//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Point on a meridian profile: distance from the axis, height, and the arc
/// length element `ds/dt`.
pub struct ProfilePoint {
    pub rho: f64,
    pub z: f64,
    pub ds: f64,
}

/// 5-point Gauss–Legendre nodes and weights on [−1, 1].
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite 5-point rule on `[0, π]` with `panels` panels.
pub fn meridian_rule(panels: usize) -> Vec<(f64, f64)> {
    let h = PI / panels as f64;
    let mut out = Vec::with_capacity(5 * panels);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL5 {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Cylindrical Bessel `J₀(x) = (1/π) ∫₀^π cos(x sin t) dt`, periodic
/// trapezoid rule.
pub fn bessel_j0_cyl(x: f64) -> f64 {
    let n = 96;
    let mut s = 0.0;
    for i in 0..n {
        let t = PI * (i as f64 + 0.5) / n as f64;
        s += (x * t.sin()).cos();
    }
    s / n as f64
}

/// Surface transform of an axisymmetric surface at `kβ`, `β` at polar angle `alpha`:
/// `2π ∫ J₀(k sinα ρ) e^{ik cosα z} ρ ds`.
pub fn axisymmetric_transform(profile: &dyn Fn(f64) -> ProfilePoint, rule: &[(f64, f64)], k: f64, alpha: f64) -> Complex64 {
    let (sa, ca) = alpha.sin_cos();
    let mut sum = Complex64::new(0.0, 0.0);
    for &(t, w) in rule {
        let p = profile(t);
        sum += w * bessel_j0_cyl(k * sa * p.rho) * p.rho * p.ds * Complex64::from_polar(1.0, k * ca * p.z);
    }
    2.0 * PI * sum
}

pub fn axisymmetric_area(profile: &dyn Fn(f64) -> ProfilePoint, rule: &[(f64, f64)]) -> f64 {
    2.0 * PI * rule.iter().map(|&(t, w)| { let p = profile(t); w * p.rho * p.ds }).sum::<f64>()
}

/// Spheroid with equatorial radius `a` and polar semi-axis `c`.
pub fn spheroid_profile(a: f64, c: f64) -> impl Fn(f64) -> ProfilePoint {
    move |t: f64| {
        let (s, co) = t.sin_cos();
        ProfilePoint { rho: a * s, z: c * co, ds: (a * a * co * co + c * c * s * s).sqrt() }
    }
}

/// `r(θ) = a₀ (1 + eps·Y₂₀(θ))`.
pub fn y20_profile(a0: f64, eps: f64) -> impl Fn(f64) -> ProfilePoint {
    let norm = (5.0 / (16.0 * PI)).sqrt();
    move |t: f64| {
        let (s, co) = t.sin_cos();
        let r = a0 * (1.0 + eps * norm * (3.0 * co * co - 1.0));
        let dr = a0 * eps * norm * (-6.0 * co * s);
        ProfilePoint { rho: r * s, z: r * co, ds: (r * r + dr * dr).sqrt() }
    }
}

/// `max_α |F(kβ(α))| / A` over the given polar angles.
pub fn oracle_residual(profile: &dyn Fn(f64) -> ProfilePoint, rule: &[(f64, f64)], area: f64, k: f64, polar: &[f64]) -> f64 {
    polar.iter().map(|&a| axisymmetric_transform(profile, rule, k, a).norm()).fold(0.0, f64::max) / area
}

/// Smallest oracle residual over `[k_min, k_max]`: uniform samples, then
/// golden-section refinement of every sampled local minimum.
pub fn oracle_floor(profile: &dyn Fn(f64) -> ProfilePoint, polar: &[f64], k_min: f64, k_max: f64, n_k: usize) -> f64 {
    let rule = meridian_rule(200);
    let area = axisymmetric_area(profile, &rule);
    let f = |k: f64| oracle_residual(profile, &rule, area, k, polar);
    let ks: Vec<f64> = (0..n_k).map(|i| k_min + (k_max - k_min) * i as f64 / (n_k - 1) as f64).collect();
    let vals: Vec<f64> = ks.iter().map(|&k| f(k)).collect();
    let mut floor = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    for i in 1..n_k - 1 {
        if vals[i] <= vals[i - 1] && vals[i] < vals[i + 1] {
            let (mut lo, mut hi) = (ks[i - 1], ks[i + 1]);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            while hi - lo > 1e-9 {
                let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
                if f(x1) <= f(x2) { hi = x2 } else { lo = x1 }
            }
            floor = floor.min(f(0.5 * (lo + hi)));
        }
    }
    floor
}

/// Distinct polar angles of a direction grid.
pub fn polar_angles(directions: &[nalgebra::Vector3<f64>]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for d in directions {
        let a = d.z.clamp(-1.0, 1.0).acos();
        if !out.iter().any(|b| (a - b).abs() < 1e-12) {
            out.push(a);
        }
    }
    out
}
