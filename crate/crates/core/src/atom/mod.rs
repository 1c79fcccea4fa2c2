//! Finite-level atomic models: Hermitian matrix, eigendata, dipole and spin
//! blocks, plus the gap and rescaling data used by the resonance machinery.

pub mod hydrogen;
pub mod models;

use std::path::Path;

use faer::Side;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, JsonMatrix};

pub use hydrogen::{
    c_r, c_r_exact, hydrogen_levels, nu_epsilon, uncertainty_probe, RadialGrid, RadialSolution, UncertaintyProbe,
};
pub use models::{
    fine_structure_model, hydrogen_level_model, sp_shell_model, two_level_model, FineStructure, SpShellParams, C_G,
};

/// Relative tolerance for grouping eigenvalues into levels.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Quantum numbers attached to one basis vector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateLabel {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_j: Option<f64>,
}

impl StateLabel {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }
}

/// Orbital block of the product basis: rotation-invariant or a Cartesian vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitalBlock {
    Scalar,
    Vector,
}

impl OrbitalBlock {
    pub fn dim(&self) -> usize {
        match self {
            OrbitalBlock::Scalar => 1,
            OrbitalBlock::Vector => 3,
        }
    }
}

/// Product structure `orbital ⊗ spin^{⊗N}` (real orbital basis) together
/// with the unitary frame `F` whose columns are the model basis vectors.
#[derive(Clone, Debug)]
pub struct ProductFrame {
    pub orbital: Vec<OrbitalBlock>,
    pub frame: CMat,
}

impl ProductFrame {
    pub fn orbital_dim(&self) -> usize {
        self.orbital.iter().map(OrbitalBlock::dim).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
    /// Columns of `AtomModel::eigvecs` spanning the level.
    pub columns: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AtomModel {
    pub name: String,
    pub h_el: CMat,
    pub eigvals: Vec<f64>,
    pub eigvecs: CMat,
    pub levels: Vec<Level>,
    pub dipole: [CMat; 3],
    pub spin: [CMat; 3],
    pub labels: Vec<StateLabel>,
    pub n_particles: usize,
    pub spin_value: f64,
    pub product: Option<ProductFrame>,
}

/// Groups sorted values whose spread stays within `tol` relative to the
/// largest magnitude in the list.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[c[0]]).abs() <= tol * scale => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

impl AtomModel {
    pub fn new(
        name: impl Into<String>,
        h_el: CMat,
        dipole: [CMat; 3],
        spin: [CMat; 3],
        labels: Vec<StateLabel>,
        n_particles: usize,
        spin_value: f64,
    ) -> Result<Self> {
        let n = h_el.nrows();
        if h_el.ncols() != n {
            return Err(Error::DimensionMismatch("h_el must be square".into()));
        }
        if !linalg::is_finite(h_el.as_ref()) {
            return Err(Error::NonFinite);
        }
        for m in dipole.iter().chain(spin.iter()) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "operator block {}x{} does not match dimension {n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let scale = linalg::frobenius(h_el.as_ref()).max(1.0);
        for (what, m) in std::iter::once(("h_el", &h_el))
            .chain(dipole.iter().map(|m| ("dipole", m)))
            .chain(spin.iter().map(|m| ("spin", m)))
        {
            let d = linalg::hermiticity_defect(m.as_ref());
            if d > 1e-12 * scale {
                return Err(Error::Model(format!("{what} not Hermitian (defect {d:.2e})")));
            }
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(Error::DimensionMismatch(format!("{} labels for dimension {n}", labels.len())));
        }
        let eig = h_el
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Convergence(format!("{e:?}")))?;
        let eigvals: Vec<f64> = (0..n).map(|i| eig.S()[i].re).collect();
        let eigvecs = eig.U().to_owned();
        let levels = cluster_sorted(&eigvals, CLUSTER_TOL)
            .into_iter()
            .map(|cols| Level {
                energy: cols.iter().map(|&c| eigvals[c]).sum::<f64>() / cols.len() as f64,
                multiplicity: cols.len(),
                columns: cols,
            })
            .collect();
        Ok(Self {
            name: name.into(),
            h_el,
            eigvals,
            eigvecs,
            levels,
            dipole,
            spin,
            labels,
            n_particles,
            spin_value,
            product: None,
        })
    }

    pub fn with_product(mut self, product: ProductFrame) -> Result<Self> {
        let spin_dim = spin_factor_dim(self.spin_value, self.n_particles)?;
        let expected = product.orbital_dim() * spin_dim;
        if expected != self.dim() || product.frame.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "product frame of dimension {expected} for model of dimension {}",
                self.dim()
            )));
        }
        let defect = linalg::unitarity_defect(product.frame.as_ref());
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        self.product = Some(product);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.h_el.nrows()
    }

    pub fn distinct_energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    /// Orthonormal eigenvectors of level `j` as columns.
    pub fn level_vectors(&self, j: usize) -> Result<CMat> {
        let level = self
            .levels
            .get(j)
            .ok_or_else(|| Error::InvalidParameter(format!("level {j} does not exist")))?;
        Ok(faer::Mat::from_fn(self.dim(), level.multiplicity, |r, c| {
            self.eigvecs[(r, level.columns[c])]
        }))
    }

    /// `max_{a,b} ‖[S_a, S_b] − i ε_abc S_c‖`.
    pub fn spin_algebra_defect(&self) -> f64 {
        su2_defect(&self.spin)
    }

    pub fn to_json(&self) -> AtomModelJson {
        AtomModelJson {
            h_el: JsonMatrix::from_mat(self.h_el.as_ref()),
            dipole: self.dipole.iter().map(|m| JsonMatrix::from_mat(m.as_ref())).collect(),
            spin: self.spin.iter().map(|m| JsonMatrix::from_mat(m.as_ref())).collect(),
            labels: self.labels.clone(),
            units: UNITS.to_string(),
            n_particles: Some(self.n_particles),
            spin_value: Some(self.spin_value),
        }
    }

    pub fn from_json(name: impl Into<String>, json: &AtomModelJson) -> Result<Self> {
        if json.units != UNITS {
            return Err(Error::Model(format!("unsupported units `{}`", json.units)));
        }
        let three = |v: &[JsonMatrix], what: &str| -> Result<[CMat; 3]> {
            if v.len() != 3 {
                return Err(Error::Model(format!("{what} needs 3 components, got {}", v.len())));
            }
            Ok([v[0].to_mat()?, v[1].to_mat()?, v[2].to_mat()?])
        };
        let spin_value = json.spin_value.unwrap_or(0.0);
        let n_particles = json.n_particles.unwrap_or(1);
        let model = Self::new(
            name,
            json.h_el.to_mat()?,
            three(&json.dipole, "dipole")?,
            three(&json.spin, "spin")?,
            json.labels.clone(),
            n_particles,
            spin_value,
        )?;
        // generic matrices are read as real-orbital ⊗ spin products in the given basis
        let spin_dim = spin_factor_dim(spin_value, n_particles)?;
        if model.dim() % spin_dim != 0 {
            return Err(Error::Model(format!(
                "dimension {} is not a multiple of the spin factor {spin_dim}",
                model.dim()
            )));
        }
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Model("file not found".into()));
        }
        let text = std::fs::read_to_string(path)?;
        let json: AtomModelJson = serde_json::from_str(&text)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix").to_string();
        Self::from_json(name, &json)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }
}

pub const UNITS: &str = "4Ry=1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomModelJson {
    pub h_el: JsonMatrix,
    pub dipole: Vec<JsonMatrix>,
    pub spin: Vec<JsonMatrix>,
    #[serde(default)]
    pub labels: Vec<StateLabel>,
    pub units: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_particles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spin_value: Option<f64>,
}

/// `(2s+1)^N`; only `s ∈ {0, 1/2}` are supported.
pub fn spin_factor_dim(spin_value: f64, n_particles: usize) -> Result<usize> {
    if spin_value == 0.0 {
        Ok(1)
    } else if spin_value == 0.5 {
        Ok(1usize << n_particles)
    } else {
        Err(Error::Model(format!("spin value {spin_value} unsupported")))
    }
}

pub fn su2_defect(s: &[CMat; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        let lhs = linalg::commutator(s[a].as_ref(), s[b].as_ref());
        let rhs = linalg::scale(s[c].as_ref(), linalg::I);
        worst = worst.max(linalg::frobenius(linalg::sub(lhs.as_ref(), rhs.as_ref()).as_ref()));
    }
    worst
}

/// Gap data for level `j`; `delta_check` is the rescaling parameter δ̌_j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapData {
    pub j: usize,
    pub energy: f64,
    pub delta_j: f64,
    pub delta_check: f64,
    pub tau: f64,
}

impl GapData {
    /// `d = δ_j / δ̌_j`.
    pub fn d(&self) -> f64 {
        self.delta_j / self.delta_check
    }
}

/// Default angular margin `ϵ` for excited levels.
pub const DEFAULT_MARGIN: f64 = std::f64::consts::FRAC_PI_8;

/// Gap of the `j`-th distinct level. The ground level uses `δ̌₀ = δ₀`;
/// excited levels use `δ̌_j = δ_j sin(ϵ)/2`.
pub fn gap_from_levels(levels: &[f64], j: usize, margin: f64) -> Result<GapData> {
    if levels.len() < 2 {
        return Err(Error::SingleEigenvalue);
    }
    let e = *levels
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(format!("level {j} does not exist")))?;
    let delta_j = levels
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, s)| (s - e).abs())
        .fold(f64::INFINITY, f64::min);
    if !(delta_j > 0.0) {
        return Err(Error::InvalidParameter(format!("level {j} is not isolated")));
    }
    let delta_check = if j == 0 { delta_j } else { delta_j * margin.sin() / 2.0 };
    Ok(GapData { j, energy: e, delta_j, delta_check, tau: -delta_check.ln() })
}

pub fn spectral_gap(model: &AtomModel, j: usize) -> Result<GapData> {
    gap_from_levels(&model.distinct_energies(), j, DEFAULT_MARGIN)
}

/// `e^θ δ̌⁻¹ (H_el − E_j)`.
pub fn rescaled_atom(model: &AtomModel, gap: &GapData, theta: C64) -> CMat {
    let f = theta.exp() / gap.delta_check;
    let n = model.dim();
    faer::Mat::from_fn(n, n, |r, c| {
        let shift = if r == c { gap.energy } else { 0.0 };
        (model.h_el[(r, c)] - shift) * f
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_on_three_level_spectrum() {
        let levels = [-0.25, -0.0625, 0.0];
        assert!((gap_from_levels(&levels, 0, DEFAULT_MARGIN).unwrap().delta_j - 0.1875).abs() < 1e-15);
        assert!((gap_from_levels(&levels, 1, DEFAULT_MARGIN).unwrap().delta_j - 0.0625).abs() < 1e-15);
        assert!(matches!(gap_from_levels(&[1.0], 0, DEFAULT_MARGIN), Err(Error::SingleEigenvalue)));
    }

    #[test]
    fn degenerate_level_counted_once() {
        let h = linalg::diag_real(&[0.0, 0.0, 1.0]);
        let z = linalg::zeros(3, 3);
        let m = AtomModel::new("t", h, [z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z], vec![], 1, 0.0)
            .unwrap();
        assert_eq!(m.multiplicities(), vec![2, 1]);
        assert_eq!(spectral_gap(&m, 0).unwrap().delta_j, 1.0);
    }

    #[test]
    fn excited_rescaling_policy() {
        let g = gap_from_levels(&[0.0, 1.0, 3.0], 1, DEFAULT_MARGIN).unwrap();
        assert!((g.d() * DEFAULT_MARGIN.sin() / 2.0 - 1.0).abs() < 1e-14);
        assert!((g.tau + g.delta_check.ln()).abs() < 1e-15);
    }

    #[test]
    fn rescaled_two_level() {
        let h = linalg::diag_real(&[0.0, 1.0]);
        let z = linalg::zeros(2, 2);
        let m = AtomModel::new("t", h, [z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z], vec![], 1, 0.0)
            .unwrap();
        let g = spectral_gap(&m, 0).unwrap();
        let r = rescaled_atom(&m, &g, C64::new(0.0, 0.0));
        assert_eq!(r[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(r[(1, 1)], C64::new(1.0, 0.0));
        let q = std::f64::consts::FRAC_PI_4;
        let r = rescaled_atom(&m, &g, C64::new(0.0, q));
        assert!((r[(1, 1)] - C64::from_polar(1.0, q)).norm() < 1e-15);
    }
}
