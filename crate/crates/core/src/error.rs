use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be nonnegative, got {value}")]
    NegativeArgument { name: &'static str, value: f64 },

    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWaveNumber(f64),

    #[error("kernel evaluated at coincident points")]
    SingularEvaluation,

    #[error("direction is not a unit vector (|beta| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("degenerate denominator: |j0'(ka)| = {value:e}")]
    DegenerateDenominator { value: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid quadrature order: {0}")]
    InvalidOrder(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation point at distance {distance:e} is inside the collar {collar:e}")]
    NearSingular { distance: f64, collar: f64 },

    #[error("interior volume-potential evaluation requires the target-centered rule")]
    InteriorWithoutSubtraction,

    #[error("quadrature under-resolved: n_theta = {n_theta} but k = {k} needs at least {required}")]
    UnderResolved { n_theta: usize, k: f64, required: usize },

    #[error("offset ladder must be strictly decreasing and positive with at least 3 entries")]
    LadderNotMonotone,

    #[error("extrapolation diverged (error estimates {previous:e} -> {last:e})")]
    ExtrapolationDivergence { previous: f64, last: f64 },

    #[error("far-field radius {radius} is below the minimum {minimum}")]
    RadiusTooSmall { radius: f64, minimum: f64 },

    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("mesh is not a closed manifold: {0}")]
    NonManifold(String),

    #[error("mesh orientation failure: {0}")]
    Orientation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
