//! Second-order Rayleigh–Schrödinger coefficient of a level, computed from
//! one-photon matrix elements without assembling the full operator.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::atom::AtomModel;
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingFunction;
use crate::linalg::{self, ZERO};

/// Relative tolerance for the second-order block to count as scalar.
pub const SCALAR_BLOCK_TOL: f64 = 1e-8;

/// Coefficient `c` with `E_j(g) = E_j + c g² + O(g³)`, given the coupling at
/// the dilation angle `theta` used for the photon energies `e^{−θ}ω_i`.
pub fn perturbation2_oracle(model: &AtomModel, g: &CouplingFunction, omegas: &[f64], level: usize) -> Result<C64> {
    if g.atom_dim() != model.dim() || omegas.len() != g.n_modes() {
        return Err(Error::DimensionMismatch("coupling does not match model or mode list".into()));
    }
    let lvl = model
        .levels
        .get(level)
        .ok_or_else(|| Error::InvalidParameter(format!("no level {level}")))?;
    let v = &model.eigvecs;
    let n = model.dim();
    let d = lvl.columns.len();
    let ej = lvl.energy;
    let scale = model.eigvals.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let rot = (-g.theta).exp();

    let mut block = Mat::<C64>::zeros(d, d);
    for i in 0..g.n_modes() {
        let up = v.adjoint() * g.create[i].as_ref() * v.as_ref();
        let down = v.adjoint() * g.annihilate[i].as_ref() * v.as_ref();
        for m in 0..n {
            let denom = C64::new(ej - model.eigvals[m], 0.0) - rot * omegas[i];
            let couples = lvl.columns.iter().any(|&b| up[(m, b)] != ZERO);
            if !couples {
                continue;
            }
            if denom.norm() < 1e-13 * scale {
                return Err(Error::VanishingDenominator { state: m, mode: i });
            }
            for (a, &ca) in lvl.columns.iter().enumerate() {
                for (b, &cb) in lvl.columns.iter().enumerate() {
                    block[(a, b)] += down[(ca, m)] * up[(m, cb)] / denom;
                }
            }
        }
    }
    let c = linalg::trace(block.as_ref()) / d as f64;
    let off = linalg::sub(block.as_ref(), linalg::scale(linalg::identity(d).as_ref(), c).as_ref());
    let defect = linalg::frobenius(off.as_ref());
    if defect > SCALAR_BLOCK_TOL * linalg::frobenius(block.as_ref()).max(f64::MIN_POSITIVE) {
        return Err(Error::NonScalarBlock(defect));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::two_level_model;
    use crate::hamiltonian::{coupling_g, physical};
    use crate::modes::{build_mode_grid, AngularGroup};

    #[test]
    fn zero_coupling_zero_coefficient() {
        let m = two_level_model(0.0, 1.0, 1.0).unwrap();
        let grid = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let g = coupling_g(&m, &grid, physical(ZERO), ZERO).unwrap();
        let c = perturbation2_oracle(&m, &g, &grid.omegas(), 0).unwrap();
        assert_eq!(c, ZERO);
    }
}
