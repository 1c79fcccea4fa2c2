//! Audit of the reduced atomic resolvent
//! `(q+1)/(e^θ δ̌⁻¹(H_el − E_j) − e^θ z + q)` restricted to the complement of
//! level `j`, against closed-form majorants.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::atom::GapData;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    Ground,
    Excited,
}

/// Region parameters: `θ₀` bounds `Im θ`, `ρ` bounds `|z|` (times `sin Im θ`
/// in the excited sector).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ResolventRegion {
    pub theta0: f64,
    pub rho: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolventPoint {
    pub theta: C64,
    pub z: C64,
    pub measured: f64,
    pub bound: f64,
    /// q at which the sampled supremum was attained.
    pub q_at_sup: f64,
    pub pass: bool,
}

/// Refuses parameters outside the admissible region instead of clamping.
pub fn check_region(sector: Sector, gap: &GapData, theta: C64, z: C64, region: &ResolventRegion) -> Result<()> {
    let d = gap.d();
    let ResolventRegion { theta0, rho } = *region;
    if !(theta0 > 0.0 && theta0 < FRAC_PI_2) {
        return Err(Error::OutsideRegion(format!("θ₀ = {theta0} not in (0, π/2)")));
    }
    if !(rho > 0.0 && rho < d) {
        return Err(Error::OutsideRegion(format!("ρ = {rho} not in (0, d = {d})")));
    }
    match sector {
        Sector::Ground => {
            if theta.im.abs() >= theta0 {
                return Err(Error::OutsideRegion(format!("|Im θ| = {} ≥ θ₀ = {theta0}", theta.im.abs())));
            }
            if z.norm() >= rho {
                return Err(Error::OutsideRegion(format!("|z| = {} ≥ ρ = {rho}", z.norm())));
            }
        }
        Sector::Excited => {
            if !(theta.im > 0.0 && theta.im < theta0) {
                return Err(Error::OutsideRegion(format!("Im θ = {} not in (0, θ₀ = {theta0})", theta.im)));
            }
            let r = rho * theta.im.sin();
            if z.norm() >= r {
                return Err(Error::OutsideRegion(format!("|z| = {} ≥ ρ sin(Im θ) = {r}", z.norm())));
            }
        }
    }
    Ok(())
}

/// `sup_{s ≠ E_j, q ∈ q_grid} |(q+1)/(e^θ δ̌⁻¹(s − E_j) − e^θ z + q)|` and the maximizing q.
pub fn resolvent_sup(levels: &[f64], gap: &GapData, theta: C64, z: C64, q_grid: &[f64]) -> (f64, f64) {
    let et = theta.exp();
    let mut best = (0.0, f64::NAN);
    for &s in levels {
        if s == gap.energy {
            continue;
        }
        for &q in q_grid {
            let v = (q + 1.0) / (et * ((s - gap.energy) / gap.delta_check) - et * z + q);
            if v.norm() > best.0 {
                best = (v.norm(), q);
            }
        }
    }
    best
}

/// Closed-form majorant. `e_ground` is the lowest level, used by the excited sector.
pub fn resolvent_majorant(sector: Sector, gap: &GapData, theta: C64, region: &ResolventRegion, e_ground: f64) -> f64 {
    let d = gap.d();
    let ResolventRegion { theta0, rho } = *region;
    let tail = 1.0 / theta0.cos();
    match sector {
        Sector::Ground => (-theta.re).exp() / (d - rho) + tail,
        Sector::Excited => {
            let s = theta.im.sin();
            let et = theta.re.exp();
            let q1 = 2.0 * et * ((gap.energy - e_ground) / gap.delta_check + s * rho);
            let crossing = (2.0 * (1.0 + 1.0 / q1)).max((1.0 + q1) / (et * s * (d - rho)));
            (-theta.re).exp() / (d - rho * s) + tail + crossing
        }
    }
}

pub fn resolvent_bound_check(
    levels: &[f64],
    gap: &GapData,
    sector: Sector,
    theta: C64,
    z: C64,
    q_grid: &[f64],
    region: &ResolventRegion,
) -> Result<ResolventPoint> {
    check_region(sector, gap, theta, z, region)?;
    if q_grid.iter().any(|&q| !(q >= 0.0)) {
        return Err(Error::InvalidParameter("q grid must be nonnegative".into()));
    }
    let e_ground = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let (measured, q_at_sup) = resolvent_sup(levels, gap, theta, z, q_grid);
    let bound = resolvent_majorant(sector, gap, theta, region, e_ground);
    Ok(ResolventPoint { theta, z, measured, bound, q_at_sup, pass: measured <= bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventAudit {
    pub sector: Sector,
    pub region: ResolventRegion,
    pub points: Vec<ResolventPoint>,
    pub all_pass: bool,
    /// Largest `measured / bound` over the grid.
    pub max_ratio: f64,
}

impl ResolventAudit {
    /// At least one point within a factor 10 of its bound.
    pub fn non_vacuous(&self) -> bool {
        self.max_ratio >= 0.1
    }
}

/// `0` followed by `n − 1` geometric values from `1e−2` to `1e3`.
pub fn default_q_grid(n: usize) -> Vec<f64> {
    let mut q = vec![0.0];
    for i in 0..n.saturating_sub(1) {
        let t = if n > 2 { i as f64 / (n - 2) as f64 } else { 0.0 };
        q.push(10f64.powf(-2.0 + 5.0 * t));
    }
    q
}

/// Audits an `n_theta × n_z × q_grid` grid placed strictly inside the region.
pub fn resolvent_audit(
    levels: &[f64],
    gap: &GapData,
    sector: Sector,
    region: &ResolventRegion,
    n_theta: usize,
    n_z: usize,
    q_grid: &[f64],
) -> Result<ResolventAudit> {
    let mut points = Vec::with_capacity(n_theta * n_z);
    for a in 0..n_theta {
        let t = if n_theta > 1 { a as f64 / (n_theta - 1) as f64 } else { 0.5 };
        let (im, re) = match sector {
            Sector::Ground => (region.theta0 * (-0.9 + 1.8 * t), 0.2 * (t - 0.5)),
            Sector::Excited => (region.theta0 * (0.05 + 0.9 * t), 0.2 * (t - 0.5)),
        };
        let theta = C64::new(re, im);
        let radius = match sector {
            Sector::Ground => region.rho,
            Sector::Excited => region.rho * im.sin(),
        };
        for b in 0..n_z {
            let s = if n_z > 1 { b as f64 / (n_z - 1) as f64 } else { 0.0 };
            let z = C64::from_polar(0.95 * radius * s, 2.0 * std::f64::consts::PI * 0.7 * b as f64);
            points.push(resolvent_bound_check(levels, gap, sector, theta, z, q_grid, region)?);
        }
    }
    let all_pass = points.iter().all(|p| p.pass);
    let max_ratio = points.iter().map(|p| p.measured / p.bound).fold(0.0, f64::max);
    Ok(ResolventAudit { sector, region: *region, points, all_pass, max_ratio })
}

/// Bound-state energies `−Z²/(4n²)` for `n = 1..=n_max` followed by samples of
/// the continuum `[0, ∞)`.
pub fn hydrogen_level_set(z: f64, n_max: u32) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n_max).map(|n| -z * z / (4.0 * (n * n) as f64)).collect();
    v.push(0.0);
    v.extend((0..=12).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::gap_from_levels;

    #[test]
    fn two_level_scalar_example() {
        let gap = gap_from_levels(&[0.0, 1.0], 0, 0.1).unwrap();
        let region = ResolventRegion { theta0: 1e-9, rho: 0.75 };
        let p = resolvent_bound_check(&[0.0, 1.0], &gap, Sector::Ground, C64::new(0.0, 0.0), C64::new(0.0, 0.0), &[0.0], &region)
            .unwrap();
        assert_eq!(p.measured, 1.0);
        assert!((p.bound - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ground_region_guard() {
        let gap = gap_from_levels(&[0.0, 1.0], 0, 0.1).unwrap();
        let region = ResolventRegion { theta0: 1.0, rho: 0.5 };
        let r = resolvent_bound_check(&[0.0, 1.0], &gap, Sector::Ground, C64::new(0.0, 1.6), C64::new(0.0, 0.0), &[0.0], &region);
        assert!(matches!(r, Err(Error::OutsideRegion(_))));
    }
}
