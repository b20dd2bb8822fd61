//! Real orthonormal spherical harmonics without the Condon–Shortley phase.
//!
//! ```text
//! Y_l0  = √((2l+1)/4π) P_l(cos θ)
//! Y_lm  = √2 N_lm P_l^m(cos θ) cos(mφ)      m > 0
//! Y_l-m = √2 N_lm P_l^m(cos θ) sin(mφ)      m > 0
//! N_lm  = √((2l+1)/4π · (l−m)!/(l+m)!)
//! ```
//!
//! where `P_l^m(x) = (1−x²)^{m/2} dᵐP_l/dxᵐ` carries no `(−1)^m` factor.
//! With this convention `Σ_m Y_lm(a) Y_lm(b) = (2l+1)/(4π) P_l(a·b)`.

use std::f64::consts::PI;

/// Value of `Y_lm` and its partial derivatives in `θ` and `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicValue {
    pub value: f64,
    pub d_theta: f64,
    pub d_phi: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Returns `(P_l^m(x), P_{l−1}^m(x))` for `m ≤ l` (the second is zero when
/// `l == m`).
fn legendre_pair(l: usize, m: usize, x: f64) -> (f64, f64) {
    debug_assert!(m <= l);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m = (2m−1)!! sᵐ
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= (2 * i + 1) as f64 * s;
    }
    if l == m {
        return (pmm, 0.0);
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Associated Legendre function `P_l^m(x)` without the Condon–Shortley phase.
pub fn associated_legendre(l: usize, m: usize, x: f64) -> f64 {
    legendre_pair(l, m, x).0
}

fn normalization(l: usize, m: usize) -> f64 {
    let n = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt();
    if m == 0 {
        n
    } else {
        std::f64::consts::SQRT_2 * n
    }
}

/// Real spherical harmonic `Y_lm(θ, φ)`.
pub fn real_sph_harm(l: usize, m: i32, theta: f64, phi: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| = {am} exceeds l = {l}");
    let p = associated_legendre(l, am, theta.cos());
    normalization(l, am) * p * azimuthal(m, phi).0
}

/// `(A_m(φ), A_m′(φ))` for the azimuthal factor.
fn azimuthal(m: i32, phi: f64) -> (f64, f64) {
    let am = m.unsigned_abs() as f64;
    match m.signum() {
        0 => (1.0, 0.0),
        1 => {
            let (s, c) = (am * phi).sin_cos();
            (c, -am * s)
        }
        _ => {
            let (s, c) = (am * phi).sin_cos();
            (s, am * c)
        }
    }
}

/// `Y_lm` together with `∂_θ Y_lm` and `∂_φ Y_lm`.
///
/// The θ-derivative uses `sin θ ∂_θ P_l^m = l cos θ P_l^m − (l+m) P_{l−1}^m`
/// and is therefore only valid off the poles.
pub fn real_sph_harm_with_derivatives(l: usize, m: i32, theta: f64, phi: f64) -> HarmonicValue {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|m| = {am} exceeds l = {l}");
    let (st, ct) = theta.sin_cos();
    let (p, p_lower) = legendre_pair(l, am, ct);
    let dp = (l as f64 * ct * p - (l + am) as f64 * p_lower) / st;
    let n = normalization(l, am);
    let (a, da) = azimuthal(m, phi);
    HarmonicValue {
        value: n * p * a,
        d_theta: n * dp * a,
        d_phi: n * p * da,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::quadrature::gauss_legendre;
    use approx::assert_relative_eq;

    fn legendre(l: usize, x: f64) -> f64 {
        associated_legendre(l, 0, x)
    }

    #[test]
    fn low_degree_closed_forms() {
        let (t, p) = (0.7, 1.9);
        assert_relative_eq!(real_sph_harm(0, 0, t, p), 0.5 / PI.sqrt(), max_relative = 1e-15);
        let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
        assert_relative_eq!(real_sph_harm(1, 0, t, p), y10, max_relative = 1e-14);
        let y11 = (3.0 / (4.0 * PI)).sqrt() * t.sin() * p.cos();
        assert_relative_eq!(real_sph_harm(1, 1, t, p), y11, max_relative = 1e-14);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * t.cos().powi(2) - 1.0);
        assert_relative_eq!(real_sph_harm(2, 0, t, p), y20, max_relative = 1e-14);
    }

    #[test]
    fn addition_theorem() {
        let (ta, pa) = (0.4, 2.2);
        let (tb, pb) = (2.1, -0.7);
        let ua = crate::geometry::direction_from_angles(ta, pa);
        let ub = crate::geometry::direction_from_angles(tb, pb);
        for l in 0..=8 {
            let sum: f64 = (-(l as i32)..=l as i32)
                .map(|m| real_sph_harm(l, m, ta, pa) * real_sph_harm(l, m, tb, pb))
                .sum();
            let expected = (2 * l + 1) as f64 / (4.0 * PI) * legendre(l, ua.dot(&ub));
            assert!((sum - expected).abs() < 1e-13, "l = {l}: {sum} vs {expected}");
        }
    }

    #[test]
    fn orthonormal_on_product_grid() {
        let (mu, wmu) = gauss_legendre(20);
        let n_phi = 40;
        let lm: Vec<(usize, i32)> =
            (0..=4).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
        for &(l1, m1) in &lm {
            for &(l2, m2) in &lm {
                let mut s = 0.0;
                for (x, w) in mu.iter().zip(&wmu) {
                    let t = x.acos();
                    for j in 0..n_phi {
                        let p = 2.0 * PI * j as f64 / n_phi as f64;
                        s += w * 2.0 * PI / n_phi as f64
                            * real_sph_harm(l1, m1, t, p)
                            * real_sph_harm(l2, m2, t, p);
                    }
                }
                let expected = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((s - expected).abs() < 1e-13, "({l1},{m1})·({l2},{m2}) = {s}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for l in 0..=8 {
            for m in -(l as i32)..=l as i32 {
                for &(t, p) in &[(0.3, 0.1), (1.2, 2.5), (2.9, -1.0)] {
                    let v = real_sph_harm_with_derivatives(l, m, t, p);
                    let dt = (real_sph_harm(l, m, t + h, p) - real_sph_harm(l, m, t - h, p)) / (2.0 * h);
                    let dp = (real_sph_harm(l, m, t, p + h) - real_sph_harm(l, m, t, p - h)) / (2.0 * h);
                    assert!((v.d_theta - dt).abs() < 1e-7 * (1.0 + dt.abs()), "l={l} m={m}");
                    assert!((v.d_phi - dp).abs() < 1e-7 * (1.0 + dp.abs()), "l={l} m={m}");
                    assert_relative_eq!(v.value, real_sph_harm(l, m, t, p));
                }
            }
        }
    }
}
