//! Special functions and closed-form reference solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{ComplexAmplitude, Error, Result, Vec3};

/// Below this argument `j₀` is evaluated by its Taylor series.
const J0_SERIES_CUTOFF: f64 = 1e-2;

/// `j₀′(r) = (r cos r − sin r)/r²` cancels badly for small `r`; the series is
/// used below this argument.
const J0_PRIME_SERIES_CUTOFF: f64 = 0.5;

/// Denominators `|j₀′(ka)|` at or below this are rejected.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Directions whose norm differs from 1 by more than this are rejected.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A strictly positive, finite wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidWaveNumber(k))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for WaveNumber {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<WaveNumber> for f64 {
    fn from(k: WaveNumber) -> f64 {
        k.0
    }
}

impl std::fmt::Display for WaveNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeArgument { name, value })
    }
}

/// Spherical Bessel function `j₀(r) = sin(r)/r`.
pub fn sph_bessel_j0(r: f64) -> Result<f64> {
    check_nonnegative("r", r)?;
    Ok(j0_unchecked(r))
}

/// Derivative `j₀′(r) = cos(r)/r − sin(r)/r²`.
pub fn sph_bessel_j0_prime(r: f64) -> Result<f64> {
    check_nonnegative("r", r)?;
    Ok(j0_prime_unchecked(r))
}

pub(crate) fn j0_unchecked(r: f64) -> f64 {
    if r < J0_SERIES_CUTOFF {
        let r2 = r * r;
        // 1 − r²/3! + r⁴/5! − r⁶/7! + r⁸/9! − r¹⁰/11!
        1.0 - r2 / 6.0
            * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0 * (1.0 - r2 / 110.0))))
    } else {
        r.sin() / r
    }
}

pub(crate) fn j0_prime_unchecked(r: f64) -> f64 {
    if r < J0_PRIME_SERIES_CUTOFF {
        // Σ_{n≥1} (−1)ⁿ 2n r^{2n−1} / (2n+1)!
        let r2 = r * r;
        let mut term = -r / 3.0;
        let mut sum = term;
        for n in 2..12 {
            let n = n as f64;
            // ratio of consecutive terms
            term *= -r2 * n / ((n - 1.0) * (2.0 * n) * (2.0 * n + 1.0));
            sum += term;
        }
        sum
    } else {
        let (s, c) = r.sin_cos();
        (r * c - s) / (r * r)
    }
}

/// Outgoing Helmholtz kernel `g(x,y,k) = e^{ik|x−y|} / (4π|x−y|)`.
pub fn green(x: &Vec3, y: &Vec3, k: WaveNumber) -> Result<ComplexAmplitude> {
    let d = (x - y).norm();
    if d == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    Ok(green_at_distance(d, k.get()))
}

#[inline]
pub(crate) fn green_at_distance(d: f64, k: f64) -> ComplexAmplitude {
    let (s, c) = (k * d).sin_cos();
    let scale = 1.0 / (4.0 * PI * d);
    ComplexAmplitude::new(c * scale, s * scale)
}

pub(crate) fn check_unit(beta: &Vec3) -> Result<()> {
    let norm = beta.norm();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        Err(Error::NonUnitDirection { norm })
    } else {
        Ok(())
    }
}

/// Leading far-field term `e^{ik|x|}/(4π|x|) · e^{ikβ·y}` of the kernel for
/// `x = −|x| β`.
pub fn green_farfield(abs_x: f64, beta: &Vec3, y: &Vec3, k: WaveNumber) -> Result<ComplexAmplitude> {
    if !(abs_x > 0.0) {
        return Err(Error::InvalidArgument(format!("|x| must be positive, got {abs_x}")));
    }
    check_unit(beta)?;
    let k = k.get();
    let radial = green_at_distance(abs_x, k);
    let phase = ComplexAmplitude::from_polar(1.0, k * beta.dot(y));
    Ok(radial * phase)
}

fn ball_denominator(a: f64, k: WaveNumber) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {a}")));
    }
    let dj = j0_prime_unchecked(k.get() * a);
    if dj.abs() <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateDenominator { value: dj.abs() });
    }
    Ok(k.get() * dj)
}

/// Radial solution `u(r) = c j₀(kr) / (k j₀′(ka))` of the overdetermined
/// problem `(∇²+k²)u = 0` in the ball, `u = 0`, `u_N = c` on its boundary
/// (when `j₀(ka) = 0`).
pub fn ball_interior_solution(r: f64, a: f64, k: WaveNumber, c: f64) -> Result<ComplexAmplitude> {
    check_nonnegative("r", r)?;
    let denom = ball_denominator(a, k)?;
    if r > a {
        return Err(Error::InvalidArgument(format!("r = {r} lies outside the ball of radius {a}")));
    }
    Ok(ComplexAmplitude::new(c * j0_unchecked(k.get() * r) / denom, 0.0))
}

/// Radial derivative of [`ball_interior_solution`].
pub fn ball_interior_radial_derivative(r: f64, a: f64, k: WaveNumber, c: f64) -> Result<f64> {
    check_nonnegative("r", r)?;
    let denom = ball_denominator(a, k)?;
    if r > a {
        return Err(Error::InvalidArgument(format!("r = {r} lies outside the ball of radius {a}")));
    }
    Ok(c * k.get() * j0_prime_unchecked(k.get() * r) / denom)
}

/// Surface (constant density on `S`) or volume (indicator of `D`) transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// Sphere zeros solve `j₀(ka) = 0`.
    Surface,
    /// Ball zeros solve `sin(ka) − ka cos(ka) = 0`.
    Volume,
}

/// First `n` wavenumbers at which the sphere (or ball) of radius `a` has a
/// vanishing surface (or volume) transform on `|ξ| = k`.
pub fn zero_wavenumbers(a: f64, kind: TransformKind, n: usize) -> Result<Vec<WaveNumber>> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {a}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("at least one zero must be requested".into()));
    }
    (1..=n)
        .map(|m| {
            let m = m as f64;
            let x = match kind {
                TransformKind::Surface => m * PI,
                // sin x − x cos x changes sign exactly once on [mπ, (m+½)π]
                TransformKind::Volume => bisect(|x| x.sin() - x * x.cos(), m * PI, (m + 0.5) * PI),
            };
            WaveNumber::new(x / a)
        })
        .collect()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn k(v: f64) -> WaveNumber {
        WaveNumber::new(v).unwrap()
    }

    /// Taylor series of sin(r)/r summed to convergence.
    fn j0_taylor(r: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..40 {
            term *= -r * r / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn j0_values() {
        assert_eq!(sph_bessel_j0(0.0).unwrap(), 1.0);
        assert!(sph_bessel_j0(PI).unwrap().abs() < 1e-15);
        assert_relative_eq!(sph_bessel_j0(1.0).unwrap(), j0_taylor(1.0), max_relative = 1e-15);
        assert_relative_eq!(sph_bessel_j0(1.0).unwrap(), 0.8414709848078965, max_relative = 1e-15);
        assert!(sph_bessel_j0(-1.0).is_err());
    }

    #[test]
    fn j0_series_branch_matches_taylor() {
        for &r in &[1e-8, 1e-4, 5e-3, 9.99e-3, 1.0001e-2, 0.3] {
            assert_relative_eq!(sph_bessel_j0(r).unwrap(), j0_taylor(r), max_relative = 1e-15);
        }
    }

    #[test]
    fn j0_prime_values() {
        assert_eq!(sph_bessel_j0_prime(0.0).unwrap(), 0.0);
        assert_relative_eq!(sph_bessel_j0_prime(PI).unwrap(), -1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(
            sph_bessel_j0_prime(PI / 2.0).unwrap(),
            -4.0 / (PI * PI),
            max_relative = 1e-14
        );
        assert!(sph_bessel_j0_prime(-0.1).is_err());
        // both branches agree at the switch
        let r = J0_PRIME_SERIES_CUTOFF;
        let (s, c) = r.sin_cos();
        assert_relative_eq!(j0_prime_unchecked(r), (r * c - s) / (r * r), max_relative = 1e-13);
    }

    #[test]
    fn bessel_ode_residual() {
        // (r² j₀′)′ + r² j₀ = 0, checked with a 4th-order central difference
        let h = 1e-3;
        let flux = |r: f64| r * r * j0_prime_unchecked(r);
        let mut r = 0.01;
        while r <= 50.0 {
            let d = (-flux(r + 2.0 * h) + 8.0 * flux(r + h) - 8.0 * flux(r - h) + flux(r - 2.0 * h))
                / (12.0 * h);
            let res = d + r * r * j0_unchecked(r);
            assert!(res.abs() <= 1e-10 * (1.0 + r * r), "r = {r}: residual {res:e}");
            r += 0.37;
        }
    }

    #[test]
    fn green_values() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::zeros();
        let g = green(&x, &y, k(1e-12)).unwrap();
        assert_relative_eq!(g.re, 1.0 / (4.0 * PI), max_relative = 1e-12);
        let g = green(&x, &y, k(PI)).unwrap();
        assert_relative_eq!(g.re, -1.0 / (4.0 * PI), max_relative = 1e-14);
        assert!(g.im.abs() < 1e-16);
        assert!(matches!(green(&x, &x, k(1.0)), Err(Error::SingularEvaluation)));
    }

    #[test]
    fn farfield_values() {
        let beta = Vec3::new(0.0, 0.0, 1.0);
        let g = green_farfield(3.0, &beta, &Vec3::zeros(), k(2.0)).unwrap();
        assert_relative_eq!(g.re, green_at_distance(3.0, 2.0).re);
        let y = Vec3::new(0.0, 0.0, PI);
        let g = green_farfield(100.0, &beta, &y, k(1.0)).unwrap();
        let expected = -ComplexAmplitude::from_polar(1.0, 100.0) / (400.0 * PI);
        assert!((g - expected).norm() < 1e-16);
        assert!(green_farfield(1.0, &Vec3::new(0.0, 0.0, 1.1), &y, k(1.0)).is_err());
    }

    #[test]
    fn farfield_error_decays_like_inverse_square() {
        let beta = Vec3::new(1.0, 2.0, -2.0) / 3.0;
        let y = Vec3::new(0.3, -0.5, 0.4);
        let kk = k(1.3);
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&r| {
                let x = -r * beta;
                let e = (green(&x, &y, kk).unwrap() - green_farfield(r, &beta, &y, kk).unwrap()).norm();
                (f64::ln(r), e.ln())
            })
            .collect();
        let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
        assert!((-2.2..=-1.8).contains(&slope), "slope {slope}");
    }

    #[test]
    fn ball_solution_values() {
        let u0 = ball_interior_solution(0.0, 1.0, k(PI), 1.0).unwrap();
        assert_relative_eq!(u0.re, -1.0, max_relative = 1e-14);
        let ua = ball_interior_solution(1.0, 1.0, k(PI), 1.0).unwrap();
        assert!(ua.norm() < 1e-15);
        let du = ball_interior_radial_derivative(1.0, 1.0, k(PI), 1.0).unwrap();
        assert_relative_eq!(du, 1.0, max_relative = 1e-14);
        // j₀′(ka) = 0 at the first volume zero
        let kv = zero_wavenumbers(1.0, TransformKind::Volume, 1).unwrap()[0];
        assert!(matches!(
            ball_interior_solution(0.0, 1.0, kv, 1.0),
            Err(Error::DegenerateDenominator { .. })
        ));
        assert!(ball_interior_solution(1.5, 1.0, k(PI), 1.0).is_err());
    }

    #[test]
    fn zero_wavenumber_lists() {
        let z = zero_wavenumbers(1.0, TransformKind::Surface, 2).unwrap();
        assert_eq!(z.iter().map(|k| k.get()).collect::<Vec<_>>(), vec![PI, 2.0 * PI]);
        let z = zero_wavenumbers(2.0, TransformKind::Surface, 1).unwrap();
        assert_eq!(z[0].get(), PI / 2.0);
        let v = zero_wavenumbers(1.0, TransformKind::Volume, 3).unwrap();
        assert!((v[0].get() - 4.493409457909064).abs() < 1e-12);
        for kv in &v {
            let x = kv.get();
            assert!((x.sin() - x * x.cos()).abs() < 1e-12 * x);
        }
        for kz in zero_wavenumbers(1.7, TransformKind::Surface, 6).unwrap() {
            assert!(j0_unchecked(kz.get() * 1.7).abs() <= 1e-12);
        }
        assert!(zero_wavenumbers(1.0, TransformKind::Surface, 0).is_err());
    }

    #[test]
    fn wavenumber_rejects_nonpositive() {
        assert!(WaveNumber::new(0.0).is_err());
        assert!(WaveNumber::new(-1.0).is_err());
        assert!(WaveNumber::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn green_is_reciprocal(
            x in prop::array::uniform3(-5.0f64..5.0),
            y in prop::array::uniform3(-5.0f64..5.0),
            kv in 0.01f64..20.0,
        ) {
            let (x, y) = (Vec3::from(x), Vec3::from(y));
            prop_assume!((x - y).norm() > 1e-9);
            let kk = k(kv);
            prop_assert_eq!(green(&x, &y, kk).unwrap(), green(&y, &x, kk).unwrap());
        }
    }
}
