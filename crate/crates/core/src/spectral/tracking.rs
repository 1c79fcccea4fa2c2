//! Continuation of a resonance cluster along a path in `(κ, θ)`.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::eigs::{eigs, spread, SpectrumResult, CLUSTER_TOL};
use super::sparse::{shift_invert, ShiftInvertOptions};
use crate::atom::AtomModel;
use crate::error::{Error, Result};
use crate::hamiltonian::DilatedHamiltonian;
use crate::linalg::{self, CMat};

/// One point of a parameter path. For coupling-strength scans the builder
/// reads `kappa` as `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathPoint {
    pub kappa: C64,
    pub theta: C64,
}

impl PathPoint {
    pub fn new(kappa: C64, theta: C64) -> Self {
        Self { kappa, theta }
    }

    fn lerp(&self, other: &PathPoint, t: f64) -> PathPoint {
        PathPoint {
            kappa: self.kappa + (other.kappa - self.kappa) * t,
            theta: self.theta + (other.theta - self.theta) * t,
        }
    }
}

/// `n + 1` equally spaced points from 0 to `kappa` at fixed θ; a zero-length
/// path collapses to the single point κ = 0.
pub fn kappa_path(kappa: C64, theta: C64, n: usize) -> Vec<PathPoint> {
    if n == 0 || kappa == C64::new(0.0, 0.0) {
        return vec![PathPoint::new(kappa, theta)];
    }
    (0..=n).map(|i| PathPoint::new(kappa * (i as f64 / n as f64), theta)).collect()
}

#[derive(Clone, Debug)]
pub struct Seed {
    pub level: usize,
    pub d: usize,
    /// Orthonormal columns spanning the unperturbed cluster.
    pub vectors: CMat,
    pub energy: C64,
}

impl Seed {
    /// `φ_{j,a} ⊗ Ω` for the atomic level `j`, vacuum at Fock index 0.
    pub fn from_level(model: &AtomModel, fock_dim: usize, level: usize) -> Result<Seed> {
        let phi = model.level_vectors(level)?;
        let d = phi.ncols();
        let na = model.dim();
        let vectors = Mat::from_fn(na * fock_dim, d, |r, c| {
            if r % fock_dim == 0 {
                phi[(r / fock_dim, c)]
            } else {
                linalg::ZERO
            }
        });
        Ok(Seed { level, d, vectors, energy: C64::new(model.levels[level].energy, 0.0) })
    }

    /// Same cluster with a different reference energy (e.g. 0 for rescaled runs).
    pub fn with_energy(mut self, energy: C64) -> Seed {
        self.energy = energy;
        self
    }
}

#[derive(Clone, Debug)]
pub struct TrackOptions {
    /// Required ratio between the d-th and (d+1)-th projector overlaps.
    pub gap_ratio: f64,
    pub max_halvings: usize,
    /// Cluster spread above `split_tol·‖H‖_F` is reported as a split.
    pub split_tol: f64,
    pub sparse: ShiftInvertOptions,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self { gap_ratio: 3.0, max_halvings: 10, split_tol: CLUSTER_TOL, sparse: ShiftInvertOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub point: PathPoint,
    pub energy: C64,
    pub eigenvalues: Vec<C64>,
    pub cluster_spread: f64,
    pub residual: f64,
    pub matrix_norm: f64,
    /// `‖P − P_seed‖_F`.
    pub projector_shift: f64,
    pub overlap_ratio: f64,
    pub halvings: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceTrajectory {
    pub seed_level: usize,
    pub d: usize,
    pub points: Vec<TrajectoryPoint>,
    pub events: Vec<String>,
    pub aborted: Option<String>,
}

impl ResonanceTrajectory {
    pub fn energies(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.energy).collect()
    }

    pub fn last_energy(&self) -> Option<C64> {
        self.points.last().map(|p| p.energy)
    }

    pub fn max_relative_spread(&self) -> f64 {
        self.points.iter().map(|p| p.cluster_spread / p.matrix_norm.max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
    }

    pub fn split_detected(&self) -> bool {
        self.events.iter().any(|e| e.starts_with("cluster split"))
    }

    /// Converts an abort into an error, keeping complete runs.
    pub fn into_result(self) -> Result<ResonanceTrajectory> {
        match &self.aborted {
            Some(msg) if msg.starts_with("ambiguous") => Err(Error::AmbiguousMatch(msg.clone())),
            Some(msg) => Err(Error::ClusterLost(msg.clone())),
            None => Ok(self),
        }
    }
}

struct Matched {
    energy: C64,
    eigenvalues: Vec<C64>,
    spread: f64,
    residual: f64,
    matrix_norm: f64,
    q: CMat,
    ratio: f64,
}

enum Step {
    Ok(Matched),
    Ambiguous(f64),
}

fn spectrum_of(h: &DilatedHamiltonian, near: C64, q: &CMat, d: usize, opts: &TrackOptions) -> Result<SpectrumResult> {
    if h.is_dense() {
        eigs(h.to_dense().as_ref())
    } else {
        let o = ShiftInvertOptions { nev: opts.sparse.nev.max(d + 2), ..opts.sparse.clone() };
        shift_invert(&h.matrix, near, Some(q), &o)
    }
}

fn match_cluster(spec: &SpectrumResult, q: &CMat, d: usize, gap_ratio: f64) -> Result<Step> {
    let k = spec.eigenvalues.len();
    if k < d {
        return Err(Error::ClusterLost(format!("only {k} eigenpairs for a cluster of {d}")));
    }
    let proj = q.adjoint() * spec.eigenvectors.as_ref();
    let mut overlaps: Vec<(usize, f64)> =
        (0..k).map(|c| (c, (0..proj.nrows()).map(|r| proj[(r, c)].norm_sqr()).sum::<f64>())).collect();
    overlaps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let inside = overlaps[d - 1].1;
    let outside = overlaps.get(d).map_or(0.0, |o| o.1);
    let ratio = if outside > 0.0 { inside / outside } else { f64::INFINITY };
    if ratio < gap_ratio {
        return Ok(Step::Ambiguous(ratio));
    }
    let mut chosen: Vec<usize> = overlaps[..d].iter().map(|o| o.0).collect();
    chosen.sort_unstable();
    let eigenvalues: Vec<C64> = chosen.iter().map(|&i| spec.eigenvalues[i]).collect();
    let energy = eigenvalues.iter().sum::<C64>() / d as f64;
    let vecs = Mat::from_fn(spec.eigenvectors.nrows(), d, |r, c| spec.eigenvectors[(r, chosen[c])]);
    Ok(Step::Ok(Matched {
        energy,
        spread: spread(eigenvalues.iter().copied()),
        residual: chosen.iter().map(|&i| spec.residuals[i]).fold(0.0, f64::max),
        matrix_norm: spec.matrix_norm,
        eigenvalues,
        q: linalg::orthonormalize(vecs.as_ref()),
        ratio,
    }))
}

fn projector_distance(a: &CMat, b: &CMat) -> f64 {
    let o = a.adjoint() * b.as_ref();
    let d = a.ncols() as f64;
    (2.0 * d - 2.0 * o.norm_l2().powi(2)).max(0.0).sqrt()
}

/// Follows the seed cluster along `path`, matching by maximal projector
/// overlap with the previous point. Ambiguous steps are halved up to
/// `max_halvings` times before the run aborts; the partial trajectory is kept.
pub fn track_resonance<F>(builder: F, path: &[PathPoint], seed: &Seed, opts: &TrackOptions) -> ResonanceTrajectory
where
    F: Fn(PathPoint) -> Result<DilatedHamiltonian>,
{
    let q0 = linalg::orthonormalize(seed.vectors.as_ref());
    let mut traj = ResonanceTrajectory {
        seed_level: seed.level,
        d: seed.d,
        points: Vec::with_capacity(path.len()),
        events: Vec::new(),
        aborted: None,
    };
    let mut q = q0.clone();
    let mut near = seed.energy;
    let mut last: Option<PathPoint> = None;

    for (idx, target) in path.iter().enumerate() {
        let mut pending = vec![*target];
        let mut halvings = 0;
        let mut result = None;
        while let Some(&pt) = pending.last() {
            let step = builder(pt)
                .and_then(|h| spectrum_of(&h, near, &q, seed.d, opts))
                .and_then(|s| match_cluster(&s, &q, seed.d, opts.gap_ratio));
            match step {
                Ok(Step::Ok(m)) => {
                    q = m.q.clone();
                    near = m.energy;
                    last = Some(pt);
                    pending.pop();
                    if pending.is_empty() {
                        result = Some(m);
                    }
                }
                Ok(Step::Ambiguous(ratio)) => match last {
                    Some(from) if halvings < opts.max_halvings => {
                        halvings += 1;
                        pending.push(from.lerp(&pt, 0.5));
                    }
                    _ => {
                        traj.aborted = Some(format!(
                            "ambiguous match at path point {idx} (κ={}, θ={}): overlap ratio {ratio:.3e} after {halvings} halvings",
                            pt.kappa, pt.theta
                        ));
                        break;
                    }
                },
                Err(e) => {
                    traj.aborted = Some(format!("cluster lost at path point {idx}: {e}"));
                    break;
                }
            }
        }
        let Some(m) = result else { break };
        if seed.d > 1 && m.spread > opts.split_tol * m.matrix_norm {
            traj.events.push(format!(
                "cluster split at path point {idx}: spread {:.3e} > {:.1e}·‖H‖",
                m.spread, opts.split_tol
            ));
        }
        traj.points.push(TrajectoryPoint {
            point: *target,
            energy: m.energy,
            cluster_spread: m.spread,
            residual: m.residual,
            matrix_norm: m.matrix_norm,
            projector_shift: projector_distance(&q0, &m.q),
            overlap_ratio: m.ratio,
            eigenvalues: m.eigenvalues,
            halvings,
        });
    }
    traj
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaIndependence {
    pub thetas: Vec<C64>,
    pub energies: Vec<C64>,
    pub deviation: f64,
}

/// Tracks the seed from κ = 0 to `kappa` at each θ and reports the largest
/// pairwise deviation of the end-point eigenvalues.
pub fn theta_independence<F>(
    builder: F,
    kappa: C64,
    thetas: &[C64],
    seed: &Seed,
    steps: usize,
    opts: &TrackOptions,
) -> Result<ThetaIndependence>
where
    F: Fn(PathPoint) -> Result<DilatedHamiltonian> + Sync,
{
    let energies: Vec<C64> = thetas
        .par_iter()
        .map(|&th| {
            let traj = track_resonance(&builder, &kappa_path(kappa, th, steps), seed, opts).into_result()?;
            traj.last_energy().ok_or_else(|| Error::ClusterLost(format!("empty trajectory at θ={th}")))
        })
        .collect::<Result<_>>()?;
    let mut deviation: f64 = 0.0;
    for i in 0..energies.len() {
        for j in i + 1..energies.len() {
            deviation = deviation.max((energies[i] - energies[j]).norm());
        }
    }
    Ok(ThetaIndependence { thetas: thetas.to_vec(), energies, deviation })
}

/// True when each deviation is no larger than the previous one.
pub fn nonincreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::two_level_model;
    use crate::fock::FockBasis;
    use crate::hamiltonian::{assemble_h, physical};
    use crate::modes::{build_mode_grid, AngularGroup};

    #[test]
    fn zero_coupling_path_is_constant() {
        let m = two_level_model(0.0, 1.0, 1.0).unwrap();
        let g = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let b = FockBasis::over_grid(&g, 1).unwrap();
        let seed = Seed::from_level(&m, b.dim(), 1).unwrap();
        let th = C64::new(0.0, 0.3);
        let path = kappa_path(C64::new(0.0, 0.0), th, 0);
        let path: Vec<PathPoint> = path.iter().cycle().take(4).copied().collect();
        let t = track_resonance(
            |p| assemble_h(&m, &g, &b, physical(p.kappa), p.theta, 1.0),
            &path,
            &seed,
            &TrackOptions::default(),
        );
        assert!(t.aborted.is_none());
        for p in &t.points {
            assert!((p.energy - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn nonincreasing_sequence() {
        assert!(nonincreasing(&[3.0, 2.0, 2.0, 1.0]));
        assert!(!nonincreasing(&[1.0, 2.0]));
    }
}
