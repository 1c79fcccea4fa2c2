//! Finite-difference radial oracle for `−d²/dr² + l(l+1)/r² − Z/r` in units
//! where energies are measured in 4 Ry and lengths in half Bohr radii, so
//! that `E_n = −Z²/(4n²)`.

use crate::error::{Error, Result};

pub const REFINEMENT_LIMIT: f64 = 1e-4;

/// Uniform grid `r_i = i h`, `i = 1..=n`, with Dirichlet ends at `0` and `(n+1) h`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub h: f64,
    pub l: u32,
}

impl RadialGrid {
    pub fn new(h: f64, r_max: f64, l: u32) -> Result<Self> {
        if !(h > 0.0) || !(r_max > 2.0 * h) {
            return Err(Error::InvalidParameter(format!("radial grid h={h}, r_max={r_max}")));
        }
        let n = (r_max / h).round() as usize - 1;
        Ok(Self { r: (1..=n).map(|i| i as f64 * h).collect(), h, l })
    }

    /// Grid adequate for the lowest `n` shells at charge `z`.
    pub fn for_shell(z: f64, n: u32, l: u32) -> Result<Self> {
        let h = 0.01 / z;
        let r_max = (40.0 * (n * n) as f64 / z).max(20.0 / z);
        Self::new(h, (r_max / h).ceil() * h, l)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        (self.len() + 1) as f64 * self.h
    }

    pub fn with_channel(&self, l: u32) -> Self {
        Self { l, ..self.clone() }
    }

    /// Same interval, half the spacing.
    pub fn refined(&self) -> Self {
        let h = self.h / 2.0;
        let n = 2 * self.len() + 1;
        Self { r: (1..=n).map(|i| i as f64 * h).collect(), h, l: self.l }
    }

    pub fn integrate(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        self.r.iter().enumerate().map(|(i, &r)| f(i, r)).sum::<f64>() * self.h
    }
}

#[derive(Clone, Debug)]
pub struct RadialSolution {
    pub grid: RadialGrid,
    pub energies: Vec<f64>,
    /// Same eigenvalues on the refined grid.
    pub refined_energies: Vec<f64>,
    /// Normalized `u = rψ` with `h Σ u² = 1` and positive initial slope.
    pub functions: Vec<Vec<f64>>,
}

impl RadialSolution {
    /// Richardson-extrapolated energies from the two refinements.
    pub fn extrapolated(&self) -> Vec<f64> {
        self.energies
            .iter()
            .zip(&self.refined_energies)
            .map(|(e, f)| (4.0 * f - e) / 3.0)
            .collect()
    }
}

fn tridiagonal(z: f64, grid: &RadialGrid) -> (Vec<f64>, f64) {
    let h2 = grid.h * grid.h;
    let ll = (grid.l * (grid.l + 1)) as f64;
    let diag = grid.r.iter().map(|&r| 2.0 / h2 + ll / (r * r) - z / r).collect();
    (diag, -1.0 / h2)
}

/// Number of eigenvalues strictly below `x` (Sturm count via LDLᵀ pivots).
fn count_below(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    let off2 = off * off;
    for (i, &a) in diag.iter().enumerate() {
        d = if i == 0 { a - x } else { a - x - off2 / d };
        if d == 0.0 {
            d = f64::EPSILON * (a.abs() + x.abs()).max(1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(diag: &[f64], off: f64, k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − σ) x = b` for symmetric tridiagonal `T` (Thomas algorithm).
fn solve_shifted(diag: &[f64], off: f64, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0] - sigma;
    c[0] = off / denom;
    d[0] = b[0] / denom;
    for i in 1..n {
        denom = diag[i] - sigma - off * c[i - 1];
        if denom.abs() < 1e-300 {
            denom = 1e-300;
        }
        c[i] = off / denom;
        d[i] = (b[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn eigenvector(diag: &[f64], off: f64, e: f64, h: f64) -> Vec<f64> {
    let n = diag.len();
    let sigma = e + 1e-12 * e.abs().max(1e-3);
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        x = solve_shifted(diag, off, sigma, &x);
        let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    }
    let norm = (x.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let sign = x.iter().find(|v| v.abs() > 1e-8).map_or(1.0, |v| v.signum());
    x.iter_mut().for_each(|v| *v *= sign / norm);
    x
}

fn lowest(z: f64, grid: &RadialGrid, n_states: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let (diag, off) = tridiagonal(z, grid);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs();
    let energies = (0..n_states).map(|k| bisect(&diag, off, k, lo, hi)).collect();
    (energies, diag, off)
}

/// Lowest `n_states` radial eigenvalues in channel `grid.l`, cross-checked on
/// the refined grid.
pub fn hydrogen_levels(z: f64, n_states: usize, grid: &RadialGrid) -> Result<RadialSolution> {
    if !(z > 0.0) {
        return Err(Error::RadialOracle(format!("nuclear charge {z} must be positive")));
    }
    if n_states == 0 || n_states > grid.len() {
        return Err(Error::RadialOracle(format!("cannot extract {n_states} states")));
    }
    let (energies, diag, off) = lowest(z, grid, n_states);
    let (refined_energies, _, _) = lowest(z, &grid.refined(), n_states);
    let shift = energies
        .iter()
        .zip(&refined_energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if shift > REFINEMENT_LIMIT {
        return Err(Error::GridTooCoarse { shift, limit: REFINEMENT_LIMIT });
    }
    let functions = energies.iter().map(|&e| eigenvector(&diag, off, e, grid.h)).collect();
    Ok(RadialSolution { grid: grid.clone(), energies, refined_energies, functions })
}

/// Radial eigenfunction of a single state, normalized on its grid.
pub fn radial_function(z: f64, n_index: usize, grid: &RadialGrid) -> Result<(f64, Vec<f64>)> {
    let (energies, diag, off) = lowest(z, grid, n_index + 1);
    let e = energies[n_index];
    Ok((e, eigenvector(&diag, off, e, grid.h)))
}

/// `min(ε⁻³, r⁻³)`.
pub fn nu_epsilon(r: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("regulator ε = {eps} must be positive")));
    }
    Ok(if r <= eps { eps.powi(-3) } else { r.powi(-3) })
}

/// `⟨u|ν_ε|u⟩` on a grid for a normalized `u`.
pub fn nu_expectation(u: &[f64], grid: &RadialGrid, eps: f64) -> Result<f64> {
    nu_epsilon(0.0, eps)?;
    Ok(grid.integrate(|i, r| u[i] * u[i] * if r <= eps { eps.powi(-3) } else { r.powi(-3) }))
}

/// `c_R(ε) = ⟨φ_{2,1}|ν_ε|φ_{2,1}⟩`, Richardson-extrapolated over the grid and
/// its refinement.
pub fn c_r(z: f64, eps: f64, grid: &RadialGrid) -> Result<f64> {
    let p = grid.with_channel(1);
    let (_, u) = radial_function(z, 0, &p)?;
    let coarse = nu_expectation(&u, &p, eps)?;
    let fine_grid = p.refined();
    let (_, uf) = radial_function(z, 0, &fine_grid)?;
    let fine = nu_expectation(&uf, &fine_grid, eps)?;
    let value = (4.0 * fine - coarse) / 3.0;
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::RadialOracle(format!("c_R evaluated to {value}")));
    }
    Ok(value)
}

/// Closed form of `c_R(ε)` from the analytic 2p radial function, using
/// `γ(5,x) = 24(1 − e^{−x} Σ_{k≤4} x^k/k!)` with `x = Zε/2`.
pub fn c_r_exact(z: f64, eps: f64) -> f64 {
    let b = z / 2.0;
    let x = b * eps;
    let partial: f64 = (0..5).map(|k| x.powi(k) / (1..=k).map(f64::from).product::<f64>()).sum();
    let gamma5 = 24.0 * (1.0 - (-x).exp() * partial);
    let num = eps.powi(-3) * gamma5 / b.powi(5) + (-x).exp() * (eps / b + 1.0 / (b * b));
    num * b.powi(5) / 24.0
}

/// `∫ u_{2,0} r u_{2,1} dr`, Richardson-extrapolated.
pub fn dipole_radial_2s2p(z: f64, grid: &RadialGrid) -> Result<f64> {
    let overlap = |g: &RadialGrid| -> Result<f64> {
        let (_, u0) = radial_function(z, 1, &g.with_channel(0))?;
        let (_, u1) = radial_function(z, 0, &g.with_channel(1))?;
        Ok(g.integrate(|i, r| u0[i] * r * u1[i]))
    };
    let coarse = overlap(grid)?;
    let fine = overlap(&grid.refined())?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Both sides of `∫ |ψ|²/(4|x|²) d³x ≤ ∫ |∇ψ|² d³x` for a radial `ψ(r)`
/// sampled on the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyProbe {
    pub lhs: f64,
    pub rhs: f64,
}

impl UncertaintyProbe {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + tol)
    }
}

pub fn uncertainty_probe(psi: &[f64], grid: &RadialGrid) -> Result<UncertaintyProbe> {
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!("{} samples on {} points", psi.len(), grid.len())));
    }
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(UncertaintyProbe { lhs: 0.0, rhs: 0.0 });
    }
    if psi[psi.len() - 1].abs() > 1e-8 * peak {
        return Err(Error::InvalidParameter("ψ is not supported inside the grid".into()));
    }
    let pi = std::f64::consts::PI;
    let h = grid.h;
    // ∫ψ²/(4r²) 4πr² dr = π ∫ψ² dr
    let lhs = pi * grid.integrate(|i, _| psi[i] * psi[i]);
    // midpoint derivatives on the staggered grid, with the outer Dirichlet zero
    let mut rhs = 0.0;
    for i in 0..psi.len() {
        let next = if i + 1 < psi.len() { psi[i + 1] } else { 0.0 };
        let d = (next - psi[i]) / h;
        let rm = grid.r[i] + 0.5 * h;
        rhs += d * d * rm * rm * h;
    }
    Ok(UncertaintyProbe { lhs, rhs: 4.0 * pi * rhs })
}
