//! Command-line front end: runs one job file and writes its reports.
//!
//! Exit codes: 0 when the job's checks are consistent (or the recovery
//! converged), 2 when a check is violated (or the recovery did not
//! converge), 1 on any usage or input error.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::defaults::{Orders, GUARD_BAND, NEAR_FIELD_ORDERS};
use crate::fourier::{scan_source, scan_wavenumbers, CurveMetadata, ResidualCurve, ScanConfig};
use crate::geometry::{direction_grid, mesh_quadrature, surface_quadrature, Shape};
use crate::kernels::TransformKind;
use crate::potentials::{default_ladder, far_field_compare, jump_report, spread_indices, FarFieldComparison, JumpReport};
use crate::recovery::{recover_shape, RecoveryConfig, RecoveryResult};
use crate::symmetry::{
    discriminate_shape, verify_ball_zero, verify_equivalence, verify_sphere_zero, HarnessOrders, TheoremReport, Verdict,
};
use crate::{Error, Result, Vec3, WaveNumber};

pub use config::{Command, Format, JobConfig, KSpec, ShapeSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

/// Result of one job, ready to be written.
#[derive(Debug, Clone)]
pub enum Report {
    Curve(ResidualCurve),
    Theorem(TheoremReport),
    Jump { report: JumpReport, tolerance: f64 },
    FarField(FarFieldComparison),
    Recovery(RecoveryResult),
}

impl Report {
    /// Whether the job counts as a success for the exit code.
    pub fn success(&self) -> bool {
        match self {
            Report::Curve(_) | Report::FarField(_) => true,
            Report::Theorem(t) => t.verdict == Verdict::Consistent,
            Report::Jump { report, tolerance } => report.max_jump_error < GUARD_BAND * tolerance,
            Report::Recovery(r) => r.converged,
        }
    }

    fn summary(&self) -> String {
        match self {
            Report::Curve(c) => format!(
                "{} samples, floor {:e}, {} candidate(s)",
                c.samples.len(),
                c.floor(),
                c.candidates.len()
            ),
            Report::Theorem(t) => format!("{:?}, {} check(s)", t.verdict, t.checks.len()).to_lowercase(),
            Report::Jump { report, .. } => format!("max jump error {:e}", report.max_jump_error),
            Report::FarField(f) => format!("decay exponent {:.3}", f.decay_exponent),
            Report::Recovery(r) => format!(
                "objective {:e}, distance to sphere {:e}, converged {}",
                r.objective, r.distance_to_sphere, r.converged
            ),
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// Writes `report.json` and, where the report has one, `curve.csv` or
/// `trace.csv` into `dir`.
pub fn emit_report(report: &Report, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut files = Vec::new();
    let mut write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;
        files.push(path);
        Ok(())
    };
    if formats.contains(&Format::Json) {
        let json = match report {
            Report::Curve(c) => pretty(c),
            Report::Theorem(t) => pretty(t),
            Report::Jump { report, .. } => pretty(report),
            Report::FarField(f) => pretty(f),
            Report::Recovery(r) => pretty(r),
        };
        write("report.json", json)?;
    }
    if formats.contains(&Format::Csv) {
        match report {
            Report::Curve(c) => write("curve.csv", c.to_csv())?,
            Report::Recovery(r) => write("trace.csv", r.trace_csv())?,
            _ => {}
        }
    }
    Ok(files)
}

fn harness_orders(job: &JobConfig) -> HarnessOrders {
    HarnessOrders {
        transform: job.quadrature,
        directions: (job.directions.n_theta, job.directions.n_phi),
        ..HarnessOrders::default()
    }
}

fn sphere_radius(shape: &Shape) -> Result<f64> {
    shape.sphere_radius().ok_or_else(|| Error::Config("this command needs a sphere".into()))
}

fn scan_config(job: &JobConfig) -> Result<ScanConfig> {
    match job.k()? {
        KSpec::Range { min, max, steps } => {
            KSpec::Range { min, max, steps }.values()?;
            Ok(ScanConfig { k_min: min, k_max: max, n_k: steps, threshold: job.tolerances.threshold })
        }
        KSpec::Value { .. } => Err(Error::Config("scans need a k range".into())),
    }
}

/// Runs a parsed job. `base` resolves relative mesh paths.
pub fn execute(job: &JobConfig, base: &Path) -> Result<Report> {
    let dirs = || direction_grid(job.directions.n_theta, job.directions.n_phi);
    match job.command {
        Command::Scan => {
            let shape = job.shape.analytic()?;
            let cfg = scan_config(job)?;
            let orders = harness_orders(job).resolve(cfg.k_max, shape.max_radius())?;
            Ok(Report::Curve(scan_wavenumbers(&shape, job.mode, &cfg, orders, &dirs()?)?))
        }
        Command::MeshScan => {
            let (mesh, refinement) = job.shape.mesh(base)?;
            let cfg = scan_config(job)?;
            let quad = mesh_quadrature(&mesh, refinement);
            let metadata = CurveMetadata {
                shape: format!("mesh {} triangles, refinement {refinement}", mesh.triangles().len()),
                mode: TransformKind::Surface,
                quadrature: Orders { n_theta: 0, n_phi: 0, n_r: 0 },
                directions: (job.directions.n_theta, job.directions.n_phi),
                threshold: cfg.threshold,
            };
            Ok(Report::Curve(scan_source(&quad, metadata, &cfg, &dirs()?)?))
        }
        Command::VerifySphere => {
            let a = sphere_radius(&job.shape.analytic()?)?;
            Ok(Report::Theorem(verify_sphere_zero(a, job.zeros, &harness_orders(job))?))
        }
        Command::TheoremB => {
            let shape = job.shape.analytic()?;
            match shape.sphere_radius() {
                Some(a) => Ok(Report::Theorem(verify_ball_zero(a, job.zeros, &harness_orders(job))?)),
                None => {
                    let cfg = scan_config(job)?;
                    Ok(Report::Theorem(discriminate_shape(&shape, TransformKind::Volume, &cfg, &harness_orders(job))?))
                }
            }
        }
        Command::Discriminate => {
            let shape = job.shape.analytic()?;
            let cfg = scan_config(job)?;
            Ok(Report::Theorem(discriminate_shape(&shape, job.mode, &cfg, &harness_orders(job))?))
        }
        Command::Equivalence => {
            let shape = job.shape.analytic()?;
            let ks = job.k()?.values()?.into_iter().map(WaveNumber::new).collect::<Result<Vec<_>>>()?;
            Ok(Report::Theorem(verify_equivalence(&shape, &ks, &harness_orders(job))?))
        }
        Command::Jump => {
            let shape = job.shape.analytic()?;
            let k = job.k()?.single()?;
            let (n_theta, n_phi) = NEAR_FIELD_ORDERS;
            harness_orders(job).resolve(k.get(), shape.max_radius())?;
            let quad = surface_quadrature(&shape, n_theta, n_phi)?;
            let probes = spread_indices(quad.len(), 12);
            let report = jump_report(&quad, k, 1.0, &probes, &default_ladder(quad.spacing))?;
            Ok(Report::Jump { report, tolerance: job.tolerances.jump })
        }
        Command::Farfield => {
            let shape = job.shape.analytic()?;
            let k = job.k()?.single()?;
            let orders = harness_orders(job).resolve(k.get(), shape.max_radius())?;
            let quad = surface_quadrature(&shape, orders.n_theta, orders.n_phi)?;
            let beta = Vec3::from(job.beta.unwrap_or([0.0, 0.0, 1.0]));
            if !(beta.norm() > 0.0) {
                return Err(Error::Config("beta must be a nonzero vector".into()));
            }
            let r_max = quad.nodes.iter().map(|s| s.norm()).fold(0.0, f64::max);
            let radii = job.radii.clone().unwrap_or_else(|| vec![10.0 * r_max, 50.0 * r_max]);
            Ok(Report::FarField(far_field_compare(&quad, k, 1.0, &beta.normalize(), &radii)?))
        }
        Command::Recover => {
            let initial = match job.shape.analytic()? {
                Shape::Star(s) => s,
                Shape::Ellipsoid(_) => return Err(Error::Config("recovery starts from a sphere or star shape".into())),
            };
            let k = job.k()?.single()?;
            let r = &job.recovery;
            let mut cfg = RecoveryConfig::new(k, &initial, r.l_max);
            cfg.max_evaluations = r.max_evaluations;
            cfg.max_iterations = r.max_iterations;
            cfg.simplex_scale = r.simplex_scale;
            cfg.tolerance = r.tolerance;
            cfg.seed = job.seed;
            cfg.orders = job.quadrature;
            Ok(Report::Recovery(recover_shape(&cfg)?))
        }
    }
}

/// Loads, runs and writes one job; returns the process exit code.
pub fn run(config_path: &Path, out: Option<&Path>, quiet: bool) -> i32 {
    match run_inner(config_path, out) {
        Ok((report, files)) => {
            if !quiet {
                let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
                println!("{} [{}]", report.summary(), names.join(", "));
            }
            if report.success() {
                EXIT_OK
            } else {
                EXIT_VIOLATED
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            EXIT_ERROR
        }
    }
}

fn run_inner(config_path: &Path, out: Option<&Path>) -> Result<(Report, Vec<PathBuf>)> {
    let job = JobConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let report = execute(&job, base)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None if job.output.dir.is_absolute() => job.output.dir.clone(),
        None => base.join(&job.output.dir),
    };
    let files = emit_report(&report, &job.output.formats, &dir)?;
    Ok((report, files))
}

/// Caps the global worker pool at `ZEROSPHERE_THREADS` when set to a
/// positive integer.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("ZEROSPHERE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("ZEROSPHERE_THREADS must be a nonnegative integer, got {value:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}
