//! Job configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::defaults::{Orders, DIRECTION_ORDERS, ZERO_THRESHOLD};
use crate::geometry::{load_mesh, Ellipsoid, ShCoefficient, Shape, StarShape, TriMesh};
use crate::kernels::TransformKind;
use crate::{Error, Result, Vec3, WaveNumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scan,
    VerifySphere,
    Discriminate,
    Equivalence,
    Jump,
    Farfield,
    TheoremB,
    Recover,
    MeshScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Sphere {
        a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
    Ellipsoid {
        axes: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
    Star {
        a0: f64,
        #[serde(default)]
        coeffs: Vec<ShCoefficient>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
    Mesh {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        refinement: Option<usize>,
    },
}

fn center_of(c: &Option<[f64; 3]>) -> Vec3 {
    c.map(Vec3::from).unwrap_or_else(Vec3::zeros)
}

impl ShapeSpec {
    /// The analytic shape; meshes are rejected here.
    pub fn analytic(&self) -> Result<Shape> {
        match self {
            ShapeSpec::Sphere { a, center } => Ok(Shape::Star(StarShape::new(*a, Vec::new(), center_of(center))?)),
            ShapeSpec::Ellipsoid { axes, center } => Ok(Shape::Ellipsoid(Ellipsoid::new(*axes, center_of(center))?)),
            ShapeSpec::Star { a0, coeffs, center } => Ok(Shape::Star(StarShape::new(*a0, coeffs.clone(), center_of(center))?)),
            ShapeSpec::Mesh { .. } => Err(Error::Config("this command needs an analytic shape, not a mesh".into())),
        }
    }

    /// Loads a mesh, resolving relative paths against `base`.
    pub fn mesh(&self, base: &Path) -> Result<(TriMesh, usize)> {
        match self {
            ShapeSpec::Mesh { path, refinement } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                Ok((load_mesh(&full)?, refinement.unwrap_or(2)))
            }
            _ => Err(Error::Config("this command needs a mesh shape".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Range { min: f64, max: f64, steps: usize },
    Value { value: f64 },
}

impl KSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            KSpec::Value { value } => {
                WaveNumber::new(value)?;
                Ok(vec![value])
            }
            KSpec::Range { min, max, steps } => {
                if !(min > 0.0) || !(max > min) || !max.is_finite() {
                    return Err(Error::Config(format!("k range needs 0 < min < max, got [{min}, {max}]")));
                }
                if steps < 2 {
                    return Err(Error::Config(format!("k range needs at least 2 steps, got {steps}")));
                }
                Ok((0..steps).map(|i| min + (max - min) * i as f64 / (steps - 1) as f64).collect())
            }
        }
    }

    pub fn single(&self) -> Result<WaveNumber> {
        match *self {
            KSpec::Value { value } => WaveNumber::new(value),
            KSpec::Range { .. } => Err(Error::Config("this command needs a single k value".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for DirectionSpec {
    fn default() -> Self {
        Self { n_theta: DIRECTION_ORDERS.0, n_phi: DIRECTION_ORDERS.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_jump")]
    pub jump: f64,
}

fn default_threshold() -> f64 {
    ZERO_THRESHOLD
}

fn default_jump() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { threshold: default_threshold(), jump: default_jump() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverySpec {
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default = "default_evaluations")]
    pub max_evaluations: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_scale")]
    pub simplex_scale: f64,
    #[serde(default = "default_recovery_tolerance")]
    pub tolerance: f64,
}

fn default_l_max() -> usize {
    4
}
fn default_evaluations() -> usize {
    2000
}
fn default_iterations() -> usize {
    10_000
}
fn default_scale() -> f64 {
    0.05
}
fn default_recovery_tolerance() -> f64 {
    1e-8
}

impl Default for RecoverySpec {
    fn default() -> Self {
        Self {
            l_max: default_l_max(),
            max_evaluations: default_evaluations(),
            max_iterations: default_iterations(),
            simplex_scale: default_scale(),
            tolerance: default_recovery_tolerance(),
        }
    }
}

/// A job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    pub shape: ShapeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<Orders>,
    #[serde(default)]
    pub directions: DirectionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<KSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    /// Surface or volume transform for `scan` and `discriminate`.
    #[serde(default = "default_mode")]
    pub mode: TransformKind,
    /// Number of zero wavenumbers for `verify-sphere` and `theorem-b`.
    #[serde(default = "default_zeros")]
    pub zeros: usize,
    /// Far-field direction `β` (normalized on use).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<[f64; 3]>,
    /// Far-field radii; default `{10, 50}·r_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub recovery: RecoverySpec,
}

fn default_mode() -> TransformKind {
    TransformKind::Surface
}

fn default_zeros() -> usize {
    1
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn k(&self) -> Result<KSpec> {
        self.k.ok_or_else(|| Error::Config("missing k".into()))
    }
}
