//! Photon momentum grid: radial Gauss–Legendre nodes times a finite angular
//! orbit, with polarization frames, the Gaussian cutoff and the analytic
//! continuation of the form factor.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const POLE_TOL: f64 = 1e-8;
const MATCH_TOL: f64 = 1e-12;

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `R v` for a row-major 3×3 matrix.
pub fn rotate(r: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [dot(&r[0], v), dot(&r[1], v), dot(&r[2], v)]
}

pub fn transpose3(r: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = r[j][i];
        }
    }
    t
}

pub fn matmul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn close3(a: &Vec3, b: &Vec3, tol: f64) -> bool {
    (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
}

/// Finite rotation group whose orbit of `e₁` supplies the angular nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularGroup {
    /// Inversion `k ↦ −k` together with the three half-turns about the axes.
    InversionOnly,
    /// The 24 proper rotations of the cube.
    Octahedral,
}

impl AngularGroup {
    pub fn as_str(&self) -> &'static str {
        match self {
            AngularGroup::InversionOnly => "inversion-only",
            AngularGroup::Octahedral => "octahedral",
        }
    }

    /// Proper rotations of the group, identity first.
    pub fn rotations(&self) -> Vec<[[f64; 3]; 3]> {
        match self {
            AngularGroup::InversionOnly => vec![
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
                [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
                [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
            ],
            AngularGroup::Octahedral => signed_permutations(),
        }
    }
}

impl fmt::Display for AngularGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AngularGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inversion-only" => Ok(AngularGroup::InversionOnly),
            "octahedral" => Ok(AngularGroup::Octahedral),
            other => Err(Error::UnknownGroup(other.to_string())),
        }
    }
}

fn signed_permutations() -> Vec<[[f64; 3]; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for p in PERMS {
        for signs in 0..8u32 {
            let mut r = [[0.0; 3]; 3];
            for (row, &col) in p.iter().enumerate() {
                r[row][col] = if signs >> row & 1 == 1 { -1.0 } else { 1.0 };
            }
            if det3(&r) > 0.0 {
                out.push(r);
            }
        }
    }
    out
}

pub fn det3(r: &[[f64; 3]; 3]) -> f64 {
    dot(&r[0], &cross(&r[1], &r[2]))
}

/// Polarization vector `ε(k, λ)` for `λ ∈ {1, 2}`.
pub fn polarization(k: &Vec3, lambda: u8) -> Result<Vec3> {
    let r = norm3(k);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter("polarization undefined at k = 0".into()));
    }
    if lambda != 1 && lambda != 2 {
        return Err(Error::InvalidParameter(format!("polarization index {lambda} not in {{1,2}}")));
    }
    let khat = scale3(k, 1.0 / r);
    let mut c = cross(&khat, &[0.0, 0.0, 1.0]);
    if norm3(&c) < POLE_TOL {
        c = cross(&khat, &[1.0, 0.0, 0.0]);
    }
    let e1 = scale3(&c, 1.0 / norm3(&c));
    Ok(if lambda == 1 { e1 } else { cross(&khat, &e1) })
}

/// Gaussian ultraviolet cutoff `ρ(k) = exp(−(k/Λ)²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub lambda: f64,
}

impl CutoffProfile {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("cutoff scale {lambda} must be positive")));
        }
        Ok(Self { lambda })
    }

    pub fn rho(&self, k: f64) -> f64 {
        (-(k / self.lambda).powi(2)).exp()
    }

    /// `ρ(e^{−θ} k)` continued to complex `θ`.
    pub fn rho_dilated(&self, k: f64, theta: C64) -> C64 {
        let x = (-theta).exp() * (k / self.lambda);
        (-(x * x)).exp()
    }
}

pub fn check_strip(theta: C64) -> Result<()> {
    if theta.im.abs() >= std::f64::consts::FRAC_PI_4 || !theta.re.is_finite() {
        return Err(Error::OutsideStrip(format!("|Im θ| = {} must be < π/4", theta.im.abs())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeNode {
    pub k: Vec3,
    pub lambda: u8,
    pub weight: f64,
    pub omega: f64,
    pub eps: Vec3,
}

#[derive(Clone, Debug)]
pub struct ModeGrid {
    pub nodes: Vec<ModeNode>,
    pub cutoff: CutoffProfile,
    pub group: AngularGroup,
    pub n_radial: usize,
    pub r_max: f64,
    pub radii: Vec<f64>,
    pub directions: Vec<Vec3>,
}

/// Serialized grid: nodes plus cutoff and group id.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridJson {
    pub nodes: Vec<NodeJson>,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub group: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeJson {
    pub k: Vec3,
    pub lambda: u8,
    pub weight: f64,
    pub eps: Vec3,
}

fn orbit(group: AngularGroup, seed: Vec3) -> Vec<Vec3> {
    let mut dirs: Vec<Vec3> = Vec::new();
    for r in group.rotations() {
        for v in [rotate(&r, &seed), scale3(&rotate(&r, &seed), -1.0)] {
            if !dirs.iter().any(|d| close3(d, &v, MATCH_TOL)) {
                dirs.push(v);
            }
        }
    }
    dirs
}

pub fn build_mode_grid(
    n_radial: usize,
    r_max: f64,
    group: AngularGroup,
    lambda: f64,
) -> Result<ModeGrid> {
    let n = NonZeroUsize::new(n_radial)
        .ok_or_else(|| Error::InvalidParameter("n_radial must be at least 1".into()))?;
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!("r_max {r_max} must be positive")));
    }
    let cutoff = CutoffProfile::new(lambda)?;
    let rule = GaussLegendre::new(n);
    let mut radial: Vec<(f64, f64)> = rule
        .iter()
        .map(|(x, w)| (0.5 * r_max * (x + 1.0), 0.5 * r_max * w))
        .collect();
    radial.sort_by(|a, b| a.0.total_cmp(&b.0));

    let directions = orbit(group, [1.0, 0.0, 0.0]);
    let solid = 4.0 * std::f64::consts::PI / directions.len() as f64;
    let mut nodes = Vec::with_capacity(radial.len() * directions.len() * 2);
    for &(r, wr) in &radial {
        for d in &directions {
            let k = scale3(d, r);
            for lambda in 1..=2u8 {
                nodes.push(ModeNode {
                    k,
                    lambda,
                    weight: wr * r * r * solid,
                    omega: r,
                    eps: polarization(&k, lambda)?,
                });
            }
        }
    }
    Ok(ModeGrid {
        nodes,
        cutoff,
        group,
        n_radial,
        r_max,
        radii: radial.iter().map(|p| p.0).collect(),
        directions,
    })
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_dirs(&self) -> usize {
        self.directions.len()
    }

    pub fn index(&self, radial: usize, dir: usize, lambda: u8) -> usize {
        (radial * self.n_dirs() + dir) * 2 + (lambda as usize - 1)
    }

    /// `(radial, direction, λ)` of a node index.
    pub fn locate(&self, i: usize) -> (usize, usize, u8) {
        let lambda = (i % 2) as u8 + 1;
        let rd = i / 2;
        (rd / self.n_dirs(), rd % self.n_dirs(), lambda)
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.omega).collect()
    }

    pub fn direction_index(&self, v: &Vec3) -> Option<usize> {
        let r = norm3(v);
        if r == 0.0 {
            return None;
        }
        let u = scale3(v, 1.0 / r);
        self.directions.iter().position(|d| close3(d, &u, MATCH_TOL))
    }

    /// For each direction `d`, the index of `R d`. Errors unless the map is a
    /// bijection of the direction set.
    pub fn direction_map(&self, r: &[[f64; 3]; 3]) -> Result<Vec<usize>> {
        let mut map = Vec::with_capacity(self.n_dirs());
        let mut seen = vec![false; self.n_dirs()];
        for d in &self.directions {
            let img = rotate(r, d);
            let j = self.direction_index(&img).ok_or_else(|| {
                Error::GridNotPreserved(format!("direction {d:?} maps off-grid to {img:?}"))
            })?;
            if seen[j] {
                return Err(Error::GridNotPreserved("map is not injective".into()));
            }
            seen[j] = true;
            map.push(j);
        }
        Ok(map)
    }

    /// Direction index of `−d` for each direction.
    pub fn inversion_map(&self) -> Result<Vec<usize>> {
        self.direction_map(&[[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    }

    /// `K_θ(k) = |k|^{1/2} ρ(e^{−θ} k)` at every node.
    pub fn k_theta(&self, theta: C64) -> Result<Vec<C64>> {
        check_strip(theta)?;
        Ok(self
            .nodes
            .iter()
            .map(|n| self.cutoff.rho_dilated(n.omega, theta) * n.omega.sqrt())
            .collect())
    }

    /// `(Σ w |v|² / |k|^{2+2μ})^{1/2}`.
    pub fn mu_norm(&self, values: &[C64], mu: f64) -> Result<f64> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!("μ = {mu} must be positive")));
        }
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                self.len()
            )));
        }
        Ok(self
            .nodes
            .iter()
            .zip(values)
            .map(|(n, v)| n.weight * v.norm_sqr() / n.omega.powf(2.0 + 2.0 * mu))
            .sum::<f64>()
            .sqrt())
    }

    /// Plain quadrature L² norm.
    pub fn l2_norm(&self, values: &[C64]) -> f64 {
        self.nodes
            .iter()
            .zip(values)
            .map(|(n, v)| n.weight * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Grid with every momentum scaled by `e^t` and weights by `e^{3t}`.
    pub fn dilated(&self, t: f64) -> ModeGrid {
        let s = t.exp();
        let mut g = self.clone();
        for n in &mut g.nodes {
            n.k = scale3(&n.k, s);
            n.omega *= s;
            n.weight *= s.powi(3);
        }
        g.radii.iter_mut().for_each(|r| *r *= s);
        g.r_max *= s;
        g
    }

    pub fn to_json(&self) -> GridJson {
        GridJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson { k: n.k, lambda: n.lambda, weight: n.weight, eps: n.eps })
                .collect(),
            lambda: self.cutoff.lambda,
            group: self.group.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_inversion_grid() {
        let g = build_mode_grid(1, 1.0, AngularGroup::InversionOnly, 1.0).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.n_dirs(), 2);
    }

    #[test]
    fn octahedral_grid_has_24_modes() {
        let g = build_mode_grid(2, 2.0, AngularGroup::Octahedral, 1.0).unwrap();
        assert_eq!(g.len(), 24);
        for r in AngularGroup::Octahedral.rotations() {
            g.direction_map(&r).unwrap();
        }
    }

    #[test]
    fn zero_radial_points_rejected() {
        assert!(build_mode_grid(0, 1.0, AngularGroup::Octahedral, 1.0).is_err());
    }

    #[test]
    fn unknown_group_rejected() {
        assert!(matches!("icosahedral".parse::<AngularGroup>(), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn polarization_on_x_axis() {
        let e1 = polarization(&[1.0, 0.0, 0.0], 1).unwrap();
        let e2 = polarization(&[1.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(e1, [0.0, -1.0, 0.0]);
        assert_eq!(e2, [0.0, 0.0, -1.0]);
        assert_eq!(polarization(&[2.0, 0.0, 0.0], 1).unwrap(), e1);
    }

    #[test]
    fn polarization_at_pole_uses_fallback() {
        for l in 1..=2 {
            let e = polarization(&[0.0, 0.0, 1.0], l).unwrap();
            assert_eq!(dot(&e, &[0.0, 0.0, 1.0]), 0.0);
            assert!((norm3(&e) - 1.0).abs() < 1e-15);
        }
        assert!(polarization(&[0.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn k_theta_at_unit_momentum() {
        let g = build_mode_grid(1, 2.0, AngularGroup::InversionOnly, 1.0).unwrap();
        // single radial node sits at r_max/2 = 1
        let k = g.k_theta(C64::new(0.0, 0.0)).unwrap();
        assert!((k[0].re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(g.k_theta(C64::new(0.0, std::f64::consts::FRAC_PI_4)).is_err());
    }

    #[test]
    fn mu_norm_single_term() {
        let g = build_mode_grid(1, 3.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); g.len()];
        assert_eq!(g.mu_norm(&v, 0.5).unwrap(), 0.0);
        v[0] = C64::new(0.6, 0.8);
        let n = &g.nodes[0];
        let expected = n.weight.sqrt() / n.omega.powf(1.5);
        assert!((g.mu_norm(&v, 0.5).unwrap() - expected).abs() < 1e-14);
        assert!(g.mu_norm(&v, 0.0).is_err());
    }
}
