//! TOML run configuration. Complex numbers are written as `[re, im]`.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::atom::{fine_structure_model, sp_shell_model, two_level_model, AtomModel, RadialGrid, SpShellParams};
use crate::error::{Error, Result};
use crate::fock::{fock_dimension, FockBasis};
use crate::modes::{build_mode_grid, check_strip, AngularGroup, ModeGrid};

pub type Complex = [f64; 2];

pub fn complex(c: Complex) -> C64 {
    C64::new(c[0], c[1])
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    TwoLevel {
        #[serde(default)]
        e_g: f64,
        #[serde(default = "one")]
        e_e: f64,
        #[serde(default = "one")]
        dipole: f64,
    },
    SpShell {
        e_s: f64,
        e_p: f64,
        spin_orbit: f64,
        dipole: f64,
    },
    HydrogenFineStructure {
        #[serde(default = "one")]
        z: f64,
        beta: f64,
        eps: f64,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    /// Builds the model; relative file paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<AtomModel> {
        match self {
            ModelSpec::TwoLevel { e_g, e_e, dipole } => two_level_model(*e_g, *e_e, *dipole),
            ModelSpec::SpShell { e_s, e_p, spin_orbit, dipole } => sp_shell_model(
                "sp-shell",
                &SpShellParams { e_s: *e_s, e_p: *e_p, spin_orbit: *spin_orbit, dipole: *dipole, n: None },
            ),
            ModelSpec::HydrogenFineStructure { z, beta, eps } => {
                let grid = RadialGrid::for_shell(*z, 2, 1)?;
                Ok(fine_structure_model(*z, *beta, *eps, &grid)?.model)
            }
            ModelSpec::File { path } => AtomModel::load(&base.join(path)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_radial: usize,
    pub r_max: f64,
    pub group: AngularGroup,
    #[serde(rename = "lambda")]
    pub cutoff: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_radial: 2, r_max: 3.0, group: AngularGroup::InversionOnly, cutoff: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FockSpec {
    pub n_ph: usize,
}

impl Default for FockSpec {
    fn default() -> Self {
        Self { n_ph: 1 }
    }
}

/// Which path parameter the scan varies.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Knob {
    Kappa,
    G,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    /// Physical coupling `κ₁ = κ₂ = κ` used by `spectrum` and as the fixed κ of g-scans.
    pub kappa: Complex,
    pub theta: Complex,
    pub g: f64,
    pub knob: Knob,
    /// End point of the scanned knob; the path starts at 0.
    pub end: Complex,
    pub steps: usize,
    pub level: usize,
    pub rescaled: bool,
    /// Strength of an `S_z ⊗ 1` term that breaks rotation and time reversal.
    pub perturbation: f64,
    /// Optional θ window for the θ-independence report.
    pub thetas: Vec<Complex>,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            kappa: [0.1, 0.0],
            theta: [0.0, 0.3],
            g: 1.0,
            knob: Knob::Kappa,
            end: [0.1, 0.0],
            steps: 10,
            level: 0,
            rescaled: false,
            perturbation: 0.0,
            thetas: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
    pub kramers_samples: usize,
    pub resolvent_theta_points: usize,
    pub resolvent_z_points: usize,
    pub resolvent_q_points: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            tolerance: None,
            kramers_samples: 50,
            resolvent_theta_points: 10,
            resolvent_z_points: 10,
            resolvent_q_points: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub fock: FockSpec,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    /// Directory relative model paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Fock dimension above which a run is refused up front.
pub const MAX_DIM: usize = 20_000;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().replace('\n', " ")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Cheap checks run before any assembly.
    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.n_radial == 0 || !(g.r_max > 0.0) || !(g.cutoff > 0.0) {
            return Err(Error::Config("grid needs n_radial ≥ 1, r_max > 0, lambda > 0".into()));
        }
        let s = &self.scan;
        check_strip(complex(s.theta)).map_err(|e| Error::Config(format!("scan.theta: {e}")))?;
        for t in &s.thetas {
            check_strip(complex(*t)).map_err(|e| Error::Config(format!("scan.thetas: {e}")))?;
        }
        if !s.g.is_finite() || !s.perturbation.is_finite() {
            return Err(Error::Config("scan.g and scan.perturbation must be finite".into()));
        }
        let modes = self.build_grid().map_err(|e| Error::Config(format!("grid: {e}")))?.len();
        let fd = fock_dimension(modes, self.fock.n_ph).unwrap_or(usize::MAX);
        if fd > MAX_DIM {
            return Err(Error::Config(format!("Fock dimension {fd} exceeds {MAX_DIM}")));
        }
        if let ModelSpec::File { path } = &self.model {
            if !self.base_dir.join(path).exists() {
                return Err(Error::Model("file not found".into()));
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<ModeGrid> {
        build_mode_grid(self.grid.n_radial, self.grid.r_max, self.grid.group, self.grid.cutoff)
    }

    pub fn build_model(&self) -> Result<AtomModel> {
        self.model.build(&self.base_dir)
    }

    pub fn build_basis(&self, grid: &ModeGrid) -> Result<FockBasis> {
        FockBasis::over_grid(grid, self.fock.n_ph)
    }
}
