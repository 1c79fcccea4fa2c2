use std::path::Path;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use super::config::{complex, Knob, RunConfig};
use super::output::{
    fmt, write_json, CsvSink, LEVELS_COLUMNS, SCHEMA_VERSION, SPECTRUM_COLUMNS, THETA_COLUMNS, TRAJECTORY_COLUMNS,
};
use super::suite::{resolvent_audits, run_suite, CheckResult};
use crate::atom::{spectral_gap, AtomModel, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::hamiltonian::{assemble_h, assemble_rescaled, physical, DilatedHamiltonian, DENSE_LIMIT};
use crate::modes::ModeGrid;
use crate::spectral::{
    eigs, kappa_path, theta_independence, track_resonance, PathPoint, Seed, TrackOptions, CLUSTER_TOL,
};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    CheckFailure = 1,
    ConfigError = 2,
    NumericalAbort = 3,
}

impl Status {
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::Config(_) | Error::Model(_) => Status::ConfigError,
            _ => Status::NumericalAbort,
        }
    }
}

/// Result of a command: an exit status plus the single-line reason when not ok.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub reason: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Self { status: Status::Ok, reason: None }
    }
}

struct Setup {
    model: AtomModel,
    grid: ModeGrid,
    basis: FockBasis,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let grid = cfg.build_grid()?;
    let basis = cfg.build_basis(&grid)?;
    if cfg.scan.level >= model.levels.len() {
        return Err(Error::Config(format!("scan.level {} but model has {} levels", cfg.scan.level, model.levels.len())));
    }
    if cfg.scan.knob == Knob::G && cfg.scan.end[1] != 0.0 {
        return Err(Error::Config("g scans need a real scan.end".into()));
    }
    Ok(Setup { model, grid, basis })
}

/// Builds `H` (or `Ȟ` when rescaled) at a path point, reading the point's
/// `kappa` as κ or g according to the knob.
fn builder<'a>(cfg: &'a RunConfig, s: &'a Setup) -> Result<impl Fn(PathPoint) -> Result<DilatedHamiltonian> + Sync + 'a> {
    let gap = if cfg.scan.rescaled { Some(spectral_gap(&s.model, cfg.scan.level)?) } else { None };
    let sz = s.model.spin[2].clone();
    Ok(move |p: PathPoint| {
        let (kappa, g) = match cfg.scan.knob {
            Knob::Kappa => (p.kappa, cfg.scan.g),
            Knob::G => (complex(cfg.scan.kappa), p.kappa.re),
        };
        let mut h = match &gap {
            Some(gap) => assemble_rescaled(&s.model, &s.grid, &s.basis, physical(kappa), p.theta, g, gap)?,
            None => assemble_h(&s.model, &s.grid, &s.basis, physical(kappa), p.theta, g)?,
        };
        if cfg.scan.perturbation != 0.0 {
            h.add_atomic_term(&sz, C64::new(cfg.scan.perturbation, 0.0), s.basis.dim())?;
        }
        Ok(h)
    })
}

fn manifest(cfg: &RunConfig, command: &str, s: Option<&Setup>, extra: Value) -> Value {
    let mut m = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "dilres_version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "config": cfg,
        "numerics": {
            "cluster_tol_rel": CLUSTER_TOL,
            "gap_ratio": TrackOptions::default().gap_ratio,
            "max_halvings": TrackOptions::default().max_halvings,
            "split_tol_rel": TrackOptions::default().split_tol,
            "dense_limit": DENSE_LIMIT,
            "excited_margin": DEFAULT_MARGIN,
            "float_format": "{:.16e}",
            "dilation_prefactor": "exp(-2 theta)",
            "weights_folded_into_coupling": true,
        },
    });
    if let Some(s) = s {
        m["model"] = json!({
            "name": s.model.name,
            "dim": s.model.dim(),
            "levels": s.model.levels.iter().map(|l| json!({"energy": l.energy, "multiplicity": l.multiplicity})).collect::<Vec<_>>(),
        });
        m["grid"] = json!({
            "n_modes": s.grid.len(),
            "n_radial": s.grid.n_radial,
            "r_max": s.grid.r_max,
            "group": s.grid.group,
            "lambda": s.grid.cutoff.lambda,
            "radii": s.grid.radii,
        });
        m["fock"] = json!({"n_ph": s.basis.max_total, "dim": s.basis.dim()});
        m["hamiltonian_dim"] = json!(s.model.dim() * s.basis.dim());
    }
    if let (Value::Object(dst), Value::Object(src)) = (&mut m, extra) {
        dst.extend(src);
    }
    m
}

fn finish(out: &Path, started: Instant) -> Result<()> {
    write_json(&out.join("timing.json"), &json!({"wall_seconds": started.elapsed().as_secs_f64()}))
}

/// `spectrum.csv`, `levels.csv` and `manifest.json` at the configured point.
pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let s = setup(cfg)?;
    std::fs::create_dir_all(out)?;
    let theta = complex(cfg.scan.theta);
    let point = match cfg.scan.knob {
        Knob::Kappa => PathPoint::new(complex(cfg.scan.kappa), theta),
        Knob::G => PathPoint::new(C64::new(cfg.scan.g, 0.0), theta),
    };
    let h = builder(cfg, &s)?(point)?;
    let spec = eigs(h.to_dense().as_ref())?;

    let mut cluster_of = vec![(0usize, 0usize); spec.eigenvalues.len()];
    for (ci, c) in spec.clusters.iter().enumerate() {
        for &i in &c.indices {
            cluster_of[i] = (ci, c.indices.len());
        }
    }
    let mut csv = CsvSink::create(&out.join("spectrum.csv"), &SPECTRUM_COLUMNS)?;
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        csv.row(&[
            i.to_string(),
            fmt(e.re),
            fmt(e.im),
            fmt(spec.residuals[i]),
            cluster_of[i].0.to_string(),
            cluster_of[i].1.to_string(),
        ])?;
    }
    csv.finish()?;
    write_levels(&s.model, &out.join("levels.csv"))?;

    let extra = json!({
        "hamiltonian": h.params,
        "matrix_norm": spec.matrix_norm,
        "max_residual": spec.max_residual(),
        "warnings": spec.warnings,
        "outputs": {"spectrum.csv": SPECTRUM_COLUMNS, "levels.csv": LEVELS_COLUMNS},
    });
    write_json(&out.join("manifest.json"), &manifest(cfg, "spectrum", Some(&s), extra))?;
    finish(out, started)?;
    Ok(Outcome::ok())
}

fn write_levels(model: &AtomModel, path: &Path) -> Result<()> {
    let mut csv = CsvSink::create(path, &LEVELS_COLUMNS)?;
    for l in &model.levels {
        let labels: Vec<&str> = l.columns.iter().filter_map(|&c| model.labels.get(c).map(|s| s.name.as_str())).collect();
        csv.row(&[fmt(l.energy), l.multiplicity.to_string(), labels.join(" ")])?;
    }
    csv.finish()
}

/// `trajectory.csv` (and `theta.csv` when a θ window is configured). Aborted
/// runs keep the partial trajectory and exit with status 3.
pub fn cmd_scan(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    let s = setup(cfg)?;
    std::fs::create_dir_all(out)?;
    let build = builder(cfg, &s)?;
    let theta = complex(cfg.scan.theta);
    let end = complex(cfg.scan.end);
    let path = kappa_path(end, theta, cfg.scan.steps);
    let mut seed = Seed::from_level(&s.model, s.basis.dim(), cfg.scan.level)?;
    if cfg.scan.rescaled {
        seed = seed.with_energy(C64::new(0.0, 0.0));
    }
    let opts = TrackOptions::default();
    let traj = track_resonance(&build, &path, &seed, &opts);

    let mut csv = CsvSink::create(&out.join("trajectory.csv"), &TRAJECTORY_COLUMNS)?;
    for p in &traj.points {
        csv.row(&[
            fmt(p.point.kappa.re),
            fmt(p.point.kappa.im),
            fmt(p.point.theta.re),
            fmt(p.point.theta.im),
            fmt(p.energy.re),
            fmt(p.energy.im),
            fmt(p.cluster_spread),
            fmt(p.residual),
        ])?;
    }
    csv.finish()?;

    let mut outputs = json!({"trajectory.csv": TRAJECTORY_COLUMNS});
    let mut theta_report = Value::Null;
    if !cfg.scan.thetas.is_empty() && traj.aborted.is_none() {
        let thetas: Vec<C64> = cfg.scan.thetas.iter().map(|&t| complex(t)).collect();
        match theta_independence(&build, end, &thetas, &seed, cfg.scan.steps.max(1), &opts) {
            Ok(r) => {
                let mut csv = CsvSink::create(&out.join("theta.csv"), &THETA_COLUMNS)?;
                for (t, e) in r.thetas.iter().zip(&r.energies) {
                    csv.row(&[fmt(t.re), fmt(t.im), fmt(e.re), fmt(e.im), fmt(r.deviation)])?;
                }
                csv.finish()?;
                outputs["theta.csv"] = json!(THETA_COLUMNS);
                theta_report = json!({"deviation": r.deviation});
            }
            Err(e) => theta_report = json!({"error": e.to_string()}),
        }
    }

    let extra = json!({
        "knob": cfg.scan.knob,
        "seed_level": traj.seed_level,
        "seed_multiplicity": traj.d,
        "points_requested": path.len(),
        "points_completed": traj.points.len(),
        "events": traj.events,
        "aborted": traj.aborted,
        "projector_shift": traj.points.iter().map(|p| p.projector_shift).collect::<Vec<_>>(),
        "theta_independence": theta_report,
        "outputs": outputs,
    });
    write_json(&out.join("manifest.json"), &manifest(cfg, "scan", Some(&s), extra))?;
    finish(out, started)?;
    Ok(match traj.aborted {
        Some(reason) => Outcome { status: Status::NumericalAbort, reason: Some(reason) },
        None => Outcome::ok(),
    })
}

/// `verify.json` with one record per check; status 1 when any check fails.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let started = Instant::now();
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let checks: Vec<CheckResult> = run_suite(cfg);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let v = &cfg.verify;
    // per-point audit; a failure here is already recorded in the checks
    let resolvent = resolvent_audits(v.resolvent_theta_points, v.resolvent_z_points, v.resolvent_q_points)
        .map_or(Value::Null, |a| json!(a));
    write_json(
        &out.join("verify.json"),
        &json!({"all_pass": failed.is_empty(), "checks": checks, "resolvent": resolvent}),
    )?;
    let extra = json!({
        "outputs": {"verify.json": {
            "checks": ["name", "measured", "bound", "relation", "pass", "detail"],
            "resolvent": ["sector", "region", "points", "all_pass", "max_ratio"],
        }},
    });
    write_json(&out.join("manifest.json"), &manifest(cfg, "verify", None, extra))?;
    finish(out, started)?;
    Ok(if failed.is_empty() {
        Outcome::ok()
    } else {
        Outcome { status: Status::CheckFailure, reason: Some(format!("failed checks: {}", failed.join(","))) }
    })
}
