//! Shape recovery: minimize the sphericity residual at a fixed wavenumber
//! over star-shape coefficients and measure how close the minimizer is to a
//! sphere of radius `a` with `j₀(ka) = 0`.
//!
//! The search runs over the base radius `a₀` and the coefficients `c_lm`
//! with `2 ≤ l ≤ L_max`. Degree 1 is left out because it acts as a
//! translation to first order, and the center stays at the origin. Shapes
//! whose radius function is not positive get the penalty
//! `1e6 + |min r|` without being evaluated.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults::{Orders, DIRECTION_ORDERS};
use crate::fourier::zero_sphere_residual;
use crate::geometry::shape::{probe_radius_range, MAX_DEGREE};
use crate::geometry::{direction_grid, gauss_legendre, surface_quadrature, DirectionGrid, ShCoefficient, Shape, StarShape};
use crate::kernels::j0_unchecked;
use crate::{Error, Result, Vec3, WaveNumber};

/// Objective value assigned to shapes with a non-positive radius somewhere.
pub const PENALTY: f64 = 1e6;

/// A best value still above this after the simplex collapses triggers a restart.
pub const STALL_LEVEL: f64 = 1e-4;

pub const MAX_RESTARTS: usize = 3;

/// A restart also happens when the best value has not dropped by
/// [`STALL_GAIN`] (relative) within this many iterations per parameter.
pub const STALL_WINDOW_PER_PARAMETER: usize = 4;
pub const STALL_GAIN: f64 = 0.05;

/// Each restart shrinks the initial simplex by this factor.
pub const RESTART_SCALE: f64 = 0.5;

/// Order of `(l, m)` pairs in a parameter vector, after the leading `a₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterLayout {
    pub terms: Vec<(usize, i32)>,
}

impl ParameterLayout {
    pub fn new(l_max: usize) -> Result<Self> {
        if l_max < 2 || l_max > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("l_max = {l_max} must lie in [2, {MAX_DEGREE}]")));
        }
        let terms = (2..=l_max).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
        Ok(Self { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parameters of `shape`; terms outside the layout are dropped.
    pub fn encode(&self, shape: &StarShape) -> Vec<f64> {
        let mut p = vec![0.0; self.len()];
        p[0] = shape.base_radius();
        for c in shape.coeffs() {
            if let Some(i) = self.terms.iter().position(|&t| t == (c.l, c.m)) {
                p[i + 1] += c.value;
            }
        }
        p
    }

    fn coefficients(&self, params: &[f64]) -> Vec<ShCoefficient> {
        self.terms
            .iter()
            .zip(&params[1..])
            .filter(|(_, v)| **v != 0.0)
            .map(|(&(l, m), &v)| ShCoefficient::new(l, m, v))
            .collect()
    }

    pub fn decode(&self, params: &[f64]) -> Result<StarShape> {
        StarShape::new(params[0], self.coefficients(params), Vec3::zeros())
    }
}

/// Fixed grids for objective evaluation.
pub struct Objective {
    pub layout: ParameterLayout,
    pub k: WaveNumber,
    pub orders: Orders,
    pub directions: DirectionGrid,
}

impl Objective {
    pub fn new(layout: ParameterLayout, k: WaveNumber, orders: Orders) -> Result<Self> {
        let directions = direction_grid(DIRECTION_ORDERS.0, DIRECTION_ORDERS.1)?;
        Ok(Self { layout, k, orders, directions })
    }

    /// Residual of the decoded shape, or the penalty.
    pub fn evaluate(&self, params: &[f64]) -> f64 {
        residual_objective(params, &self.layout, self.k, self.orders, &self.directions)
    }
}

/// `residual_max` of the star shape encoded by `params`, centered at the
/// origin, or `1e6 + violation` if its radius is not positive.
pub fn residual_objective(params: &[f64], layout: &ParameterLayout, k: WaveNumber, orders: Orders, dirs: &DirectionGrid) -> f64 {
    let a0 = params[0];
    if !(a0 > 0.0) {
        return PENALTY + a0.abs();
    }
    let coeffs = layout.coefficients(params);
    let (min_radius, _) = probe_radius_range(a0, &coeffs);
    if min_radius <= 0.0 {
        return PENALTY + min_radius.abs();
    }
    match StarShape::new(a0, coeffs, Vec3::zeros()) {
        Ok(s) => shape_objective(&s, k, orders, dirs).unwrap_or(PENALTY),
        Err(_) => PENALTY,
    }
}

/// `residual_max` of a star shape at `k`.
pub fn shape_objective(shape: &StarShape, k: WaveNumber, orders: Orders, dirs: &DirectionGrid) -> Result<f64> {
    let q = surface_quadrature(&Shape::Star(shape.clone()), orders.n_theta, orders.n_phi)?;
    Ok(zero_sphere_residual(&q, k, dirs).max)
}

/// Best-fit radius `ρ = Σω r² / Σω r` and the relative distance
/// `(Σω (r/ρ − 1)² / 4π)^{1/2}` on a Gauss–Legendre probe grid.
pub fn distance_to_sphere(shape: &StarShape) -> (f64, f64) {
    let n = 2 * MAX_DEGREE + 8;
    let (mu, wmu) = gauss_legendre(n);
    let n_phi = 2 * n;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut samples = Vec::with_capacity(n * n_phi);
    for (x, w) in mu.iter().zip(&wmu) {
        let theta = x.acos();
        for j in 0..n_phi {
            samples.push((w * dphi, shape.radius_at(theta, j as f64 * dphi)));
        }
    }
    let s1: f64 = samples.iter().map(|(w, r)| w * r).sum();
    let s2: f64 = samples.iter().map(|(w, r)| w * r * r).sum();
    let rho = s2 / s1;
    let d2: f64 = samples.iter().map(|(w, r)| w * (r / rho - 1.0).powi(2)).sum();
    (rho, (d2 / (4.0 * std::f64::consts::PI)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub k: WaveNumber,
    pub l_max: usize,
    pub initial_base_radius: f64,
    pub initial_coeffs: Vec<ShCoefficient>,
    pub max_iterations: usize,
    pub max_evaluations: usize,
    pub simplex_scale: f64,
    pub tolerance: f64,
    pub seed: u64,
    /// Quadrature for the objective; `None` resolves `k` on twice the initial radius.
    pub orders: Option<Orders>,
}

impl RecoveryConfig {
    pub fn new(k: WaveNumber, initial: &StarShape, l_max: usize) -> Self {
        Self {
            k,
            l_max,
            initial_base_radius: initial.base_radius(),
            initial_coeffs: initial.coeffs().to_vec(),
            max_iterations: 10_000,
            max_evaluations: 2000,
            simplex_scale: 0.05,
            tolerance: 1e-8,
            seed: 0,
            orders: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.simplex_scale > 0.0) {
            return Err(Error::InvalidArgument(format!("simplex scale must be positive, got {}", self.simplex_scale)));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidArgument("max_evaluations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub base_radius: f64,
    pub coeffs: Vec<ShCoefficient>,
    pub objective: f64,
    pub trace: Vec<TracePoint>,
    pub distance_to_sphere: f64,
    pub implied_radius: f64,
    /// `|j₀(k a)|` with `a` the implied radius.
    pub j0_at_implied: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
}

impl RecoveryResult {
    pub fn shape(&self) -> Result<StarShape> {
        StarShape::new(self.base_radius, self.coeffs.clone(), Vec3::zeros())
    }

    /// `iter,objective` rows.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,objective\n");
        for t in &self.trace {
            let _ = writeln!(out, "{},{:.16e}", t.iter, t.objective);
        }
        out
    }
}

struct Counter<'a> {
    objective: &'a Objective,
    evaluations: usize,
}

impl Counter<'_> {
    fn one(&mut self, p: &[f64]) -> f64 {
        self.evaluations += 1;
        self.objective.evaluate(p)
    }

    fn many(&mut self, ps: &[Vec<f64>]) -> Vec<f64> {
        self.evaluations += ps.len();
        ps.par_iter().map(|p| self.objective.evaluate(p)).collect()
    }
}

fn initial_simplex(x0: &[f64], scale: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        v[i] += sign * scale * rng.gen_range(0.75..1.25);
        simplex.push(v);
    }
    simplex
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Nelder–Mead descent with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5.
pub fn recover_shape(config: &RecoveryConfig) -> Result<RecoveryResult> {
    config.validate()?;
    let layout = ParameterLayout::new(config.l_max)?;
    let initial = StarShape::new(config.initial_base_radius, config.initial_coeffs.clone(), Vec3::zeros())?;
    let orders = config
        .orders
        .unwrap_or_else(|| Orders::for_wavenumber(config.k.get(), 2.0 * initial.max_radius()));
    let objective = Objective::new(layout, config.k, orders)?;
    let x0 = objective.layout.encode(&initial);
    if config.max_evaluations < x0.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "max_evaluations must cover the initial simplex of {} points",
            x0.len() + 1
        )));
    }
    let mut counter = Counter { objective: &objective, evaluations: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let f0 = counter.one(&x0);
    let mut best = (x0.clone(), f0);
    let mut trace = vec![TracePoint { iter: 0, objective: f0 }];
    let mut iterations = 0;
    let mut restarts = 0;
    let mut converged = f0 <= config.tolerance;

    let n = x0.len();
    // an iteration or a restart costs at most n + 2 evaluations
    let budget_left = |c: &Counter, iterations: usize| {
        c.evaluations + n + 2 <= config.max_evaluations && iterations < config.max_iterations
    };
    'outer: while !converged {
        let scale = config.simplex_scale * RESTART_SCALE.powi(restarts as i32);
        let mut simplex = initial_simplex(&best.0, scale, &mut rng);
        let mut values = vec![best.1];
        values.extend(counter.many(&simplex[1..]));
        let window = STALL_WINDOW_PER_PARAMETER * n;
        let mut since_restart = 0;
        let mut anchor = best.1;
        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();
            if values[0] < best.1 {
                best = (simplex[0].clone(), values[0]);
            }
            if best.1 <= config.tolerance {
                converged = true;
                break 'outer;
            }
            if values[n] - values[0] < config.tolerance {
                if best.1 > STALL_LEVEL && restarts < MAX_RESTARTS && budget_left(&counter, iterations) {
                    restarts += 1;
                    continue 'outer;
                }
                converged = best.1 <= STALL_LEVEL;
                break 'outer;
            }
            if !budget_left(&counter, iterations) {
                break 'outer;
            }
            if since_restart > 0 && since_restart % window == 0 {
                if best.1 > anchor * (1.0 - STALL_GAIN) && best.1 > STALL_LEVEL && restarts < MAX_RESTARTS {
                    restarts += 1;
                    continue 'outer;
                }
                anchor = best.1;
            }
            since_restart += 1;
            iterations += 1;

            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
            let worst = simplex[n].clone();
            let reflected = combine(&centroid, &worst, -1.0);
            let fr = counter.one(&reflected);
            if fr < values[0] {
                let expanded = combine(&centroid, &worst, -2.0);
                let fe = counter.one(&expanded);
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
            } else {
                let (contracted, fc) = if fr < values[n] {
                    let c = combine(&centroid, &reflected, 0.5);
                    let f = counter.one(&c);
                    (c, f)
                } else {
                    let c = combine(&centroid, &worst, 0.5);
                    let f = counter.one(&c);
                    (c, f)
                };
                if fc < fr.min(values[n]) {
                    simplex[n] = contracted;
                    values[n] = fc;
                } else {
                    let shrunk: Vec<Vec<f64>> = simplex[1..].iter().map(|v| combine(&simplex[0], v, 0.5)).collect();
                    let fs = counter.many(&shrunk);
                    for (i, (v, f)) in shrunk.into_iter().zip(fs).enumerate() {
                        simplex[i + 1] = v;
                        values[i + 1] = f;
                    }
                }
            }
            let current = values.iter().cloned().fold(best.1, f64::min);
            trace.push(TracePoint { iter: iterations, objective: current });
        }
    }

    let shape = objective.layout.decode(&best.0)?;
    let (implied_radius, distance) = distance_to_sphere(&shape);
    Ok(RecoveryResult {
        base_radius: shape.base_radius(),
        coeffs: shape.coeffs().to_vec(),
        objective: best.1,
        trace,
        distance_to_sphere: distance,
        implied_radius,
        j0_at_implied: j0_unchecked(config.k.get() * implied_radius).abs(),
        converged,
        iterations,
        evaluations: counter.evaluations,
        restarts,
    })
}
