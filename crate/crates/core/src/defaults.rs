//! Default quadrature orders and tolerances.
//!
//! | quantity | default |
//! |---|---|
//! | surface `n_theta` | `max(32, ⌈10 + 4·k·r_max⌉)`, `n_phi = 2·n_theta` |
//! | volume `n_r` | `max(16, ⌈8 + 2·k·r_max⌉)` |
//! | direction grid | 16 × 32 |
//! | near-field surface orders | 256 × 512 |
//! | collar | 3 node spacings |
//! | jump ladder | ε ∈ {9, 8, 7, 6, 5, 4}·h, difference step ε/4 |
//! | zero-sphere threshold | 1e−6 |
//! | target-centered volume rule | 64 × 128 directions |
//! | volume-potential ladder | ε ∈ {9, …, 4}·(0.005·r_max) |
//! | Helmholtz stencil step | 0.005·r_max |
//! | equivalence constants | C = C′ = 10, floor 1e−6 |
//! | k-grid step | ≤ 0.02 / r_max |

use serde::{Deserialize, Serialize};

/// Collar, in node spacings, inside which direct quadrature of the kernel is refused.
pub const COLLAR_SPACINGS: f64 = 3.0;

/// Residual below which a refined local minimum counts as a zero sphere.
pub const ZERO_THRESHOLD: f64 = 1e-6;

/// Golden-section refinement stops once the bracket is this narrow in k.
pub const REFINE_TOLERANCE: f64 = 1e-10;

/// Largest k-grid step as a multiple of `1 / r_max`.
pub const K_STEP_PER_RADIUS: f64 = 0.02;

pub const DIRECTION_ORDERS: (usize, usize) = (16, 32);

/// Surface orders for potentials evaluated near the surface (jumps, interior probes).
pub const NEAR_FIELD_ORDERS: (usize, usize) = (256, 512);

/// Default ladder for one-sided limits, in multiples of the node spacing.
pub const LADDER_SPACINGS: [f64; 6] = [9.0, 8.0, 7.0, 6.0, 5.0, 4.0];

/// Relative normal-difference step used with every ladder offset.
pub const DIFFERENCE_FRACTION: f64 = 0.25;

/// Angular orders of the target-centered volume-potential rule.
pub const TARGET_CENTERED_ORDERS: (usize, usize) = (64, 128);

/// Ladder unit for volume-potential limits, as a fraction of `r_max`.
pub const VOLUME_LADDER_UNIT: f64 = 5e-3;

/// Seven-point stencil step, as a fraction of `r_max`.
pub const STENCIL_STEP: f64 = 5e-3;

/// Constant in the two-sided bounds `ρ_E ≤ C ρ_F + tol`, `ρ_F ≤ C ρ_E + tol`.
pub const EQUIVALENCE_CONSTANT: f64 = 10.0;

/// Guard factor: a check only counts as violated beyond this multiple of its tolerance.
pub const GUARD_BAND: f64 = 10.0;

/// Smallest `n_theta` resolving `e^{ikβ·x}` on a surface of radius `r_max`.
pub fn required_n_theta(k: f64, r_max: f64) -> usize {
    (10.0 + 4.0 * k * r_max).ceil() as usize
}

/// Quadrature orders for analytic shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_r: usize,
}

impl Orders {
    /// Orders resolving wavenumbers up to `k_max` on a shape of radius `r_max`.
    pub fn for_wavenumber(k_max: f64, r_max: f64) -> Self {
        let n_theta = required_n_theta(k_max, r_max).max(32);
        let n_r = ((8.0 + 2.0 * k_max * r_max).ceil() as usize).max(16);
        Self { n_theta, n_phi: 2 * n_theta, n_r }
    }
}
