//! Coupling functions, the interaction `W`, and the dilated Hamiltonians
//! `H(κ,θ) = H_el ⊗ 1 + g W(κ,θ) + e^{−θ} 1 ⊗ H_f` and
//! `Ȟ(κ,θ) = Ȟ_{el,j}(θ) ⊗ 1 + g W̌(κ,θ) + 1 ⊗ H_f`.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::atom::{rescaled_atom, AtomModel, GapData};
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{self, CMat, SparseMatrix, I, ONE, ZERO};
use crate::modes::{check_strip, cross, ModeGrid, ModeNode};

/// Dimension above which assembled operators stay sparse.
pub const DENSE_LIMIT: usize = 5000;

/// Per-mode atomic matrices: `create[i] = G_i(κ,θ)` and
/// `annihilate[i] = G_i(κ̄,θ̄)†`.
#[derive(Clone, Debug)]
pub struct CouplingFunction {
    pub create: Vec<CMat>,
    pub annihilate: Vec<CMat>,
    pub kappa: [C64; 2],
    pub theta: C64,
}

impl CouplingFunction {
    pub fn n_modes(&self) -> usize {
        self.create.len()
    }

    pub fn atom_dim(&self) -> usize {
        self.create.first().map_or(0, |m| m.nrows())
    }

    /// Per-node values of one matrix entry of `G`, for μ-norm evaluation.
    pub fn entry_profile(&self, r: usize, c: usize) -> Vec<C64> {
        self.create.iter().map(|m| m[(r, c)]).collect()
    }

    /// Per-node operator norms `‖G_i‖_F`.
    pub fn norm_profile(&self) -> Vec<C64> {
        self.create.iter().map(|m| C64::new(linalg::frobenius(m.as_ref()), 0.0)).collect()
    }
}

fn mode_matrix(model: &AtomModel, node: &ModeNode, grid: &ModeGrid, kappa: [C64; 2], theta: C64) -> CMat {
    let n = model.dim();
    let pref = (-2.0 * theta).exp() * grid.cutoff.rho_dilated(node.omega, theta) * (node.weight.sqrt() / node.omega.sqrt());
    let k1 = kappa[0].powi(3) * node.omega;
    let k2 = kappa[1].powi(5);
    let b = cross(&node.k, &node.eps);
    Mat::from_fn(n, n, |r, c| {
        let mut d = ZERO;
        let mut s = ZERO;
        for a in 0..3 {
            d += model.dipole[a][(r, c)] * node.eps[a];
            s += model.spin[a][(r, c)] * b[a];
        }
        pref * I * (k1 * d + k2 * s)
    })
}

/// `G_i = √w_i e^{−2θ} ρ(e^{−θ}k_i) ω_i^{−1/2} (κ₁³ ω_i i D·ε_i + κ₂⁵ i S·(k_i ∧ ε_i))`.
pub fn coupling_g(model: &AtomModel, grid: &ModeGrid, kappa: [C64; 2], theta: C64) -> Result<CouplingFunction> {
    check_strip(theta)?;
    let kbar = [kappa[0].conj(), kappa[1].conj()];
    let create: Vec<CMat> = grid.nodes.par_iter().map(|n| mode_matrix(model, n, grid, kappa, theta)).collect();
    let annihilate: Vec<CMat> = grid
        .nodes
        .par_iter()
        .map(|n| linalg::dagger(mode_matrix(model, n, grid, kbar, theta.conj()).as_ref()))
        .collect();
    Ok(CouplingFunction { create, annihilate, kappa, theta })
}

/// `Ǧ_{κ,θ} = e^θ δ̌⁻¹ G_{κ,θ+τ}`.
pub fn coupling_rescaled(
    model: &AtomModel,
    grid: &ModeGrid,
    kappa: [C64; 2],
    theta: C64,
    gap: &GapData,
) -> Result<CouplingFunction> {
    let shifted = coupling_g(model, grid, kappa, theta + gap.tau)?;
    let f = theta.exp() / gap.delta_check;
    Ok(CouplingFunction {
        create: shifted.create.iter().map(|m| linalg::scale(m.as_ref(), f)).collect(),
        annihilate: shifted.annihilate.iter().map(|m| linalg::scale(m.as_ref(), f)).collect(),
        kappa,
        theta,
    })
}

/// `Σ_i [G̃_i ⊗ a_i + G_i ⊗ a*_i]` on atom ⊗ Fock space.
pub fn interaction_w(g: &CouplingFunction, basis: &FockBasis) -> Result<SparseMatrix> {
    if g.n_modes() != basis.n_modes {
        return Err(Error::DimensionMismatch(format!(
            "coupling over {} modes, basis over {}",
            g.n_modes(),
            basis.n_modes
        )));
    }
    let na = g.atom_dim();
    let df = basis.dim();
    let dim = na * df;
    let per_mode: Vec<Vec<(usize, usize, C64)>> = (0..g.n_modes())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let mut occ = vec![0u8; basis.n_modes];
            for (col, s) in basis.states.iter().enumerate() {
                let n = s[i];
                occ.copy_from_slice(s);
                // annihilation: |n⟩ → √n |n − e_i⟩
                if n > 0 {
                    occ[i] = n - 1;
                    let row = basis.index_of(&occ).expect("lower state exists");
                    push_block(&mut out, &g.annihilate[i], row, col, df, (n as f64).sqrt());
                }
                // creation: |n⟩ → √(n+1) |n + e_i⟩ below the cutoff
                if basis.total(col) < basis.max_total {
                    occ[i] = n + 1;
                    let row = basis.index_of(&occ).expect("upper state exists");
                    push_block(&mut out, &g.create[i], row, col, df, ((n + 1) as f64).sqrt());
                }
            }
            out
        })
        .collect();
    let mut w = SparseMatrix::new(dim, dim);
    for entries in per_mode {
        w.entries.extend(entries);
    }
    w.compress();
    Ok(w)
}

fn push_block(out: &mut Vec<(usize, usize, C64)>, m: &CMat, row: usize, col: usize, df: usize, coef: f64) {
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            let v = m[(a, b)];
            if v != ZERO {
                out.push((a * df + row, b * df + col, v * coef));
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HamiltonianParams {
    pub kappa: [C64; 2],
    pub theta: C64,
    pub g: f64,
    pub model: String,
    pub n_modes: usize,
    pub n_ph: usize,
    pub rescaled: bool,
    pub level: Option<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct DilatedHamiltonian {
    pub matrix: SparseMatrix,
    pub params: HamiltonianParams,
}

impl DilatedHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows
    }

    pub fn is_dense(&self) -> bool {
        self.dim() <= DENSE_LIMIT
    }

    pub fn to_dense(&self) -> CMat {
        self.matrix.to_dense()
    }

    pub fn write_matrix_market(&self, path: &std::path::Path) -> Result<()> {
        self.matrix.write_matrix_market(path)
    }

    /// Adds `coef · X ⊗ 1` for an atomic operator `X`.
    pub fn add_atomic_term(&mut self, x: &CMat, coef: C64, fock_dim: usize) -> Result<()> {
        if x.nrows() * fock_dim != self.dim() {
            return Err(Error::DimensionMismatch("atomic term does not match the product space".into()));
        }
        let id = SparseMatrix::from_dense(linalg::identity(fock_dim).as_ref());
        id.kron_into(x.as_ref(), coef, &mut self.matrix);
        self.matrix.compress();
        Ok(())
    }
}

fn check_components(model: &AtomModel, grid: &ModeGrid, basis: &FockBasis) -> Result<()> {
    if grid.len() != basis.n_modes {
        return Err(Error::DimensionMismatch(format!(
            "grid has {} modes, basis {}",
            grid.len(),
            basis.n_modes
        )));
    }
    if model.dim() == 0 {
        return Err(Error::DimensionMismatch("empty atomic model".into()));
    }
    Ok(())
}

fn assemble(
    atom: &CMat,
    w: &SparseMatrix,
    g: f64,
    field: &SparseMatrix,
    field_coef: C64,
) -> SparseMatrix {
    let na = atom.nrows();
    let df = field.nrows;
    let mut h = SparseMatrix::new(na * df, na * df);
    SparseMatrix::from_dense(linalg::identity(df).as_ref()).kron_into(atom.as_ref(), ONE, &mut h);
    field.kron_into(linalg::identity(na).as_ref(), field_coef, &mut h);
    if g != 0.0 {
        h.entries.extend(w.entries.iter().map(|&(r, c, v)| (r, c, v * g)));
    }
    h.compress();
    h
}

/// `H(κ,θ) = H_el ⊗ 1 + g W(κ,θ) + e^{−θ} 1 ⊗ H_f`.
pub fn assemble_h(
    model: &AtomModel,
    grid: &ModeGrid,
    basis: &FockBasis,
    kappa: [C64; 2],
    theta: C64,
    g: f64,
) -> Result<DilatedHamiltonian> {
    check_components(model, grid, basis)?;
    let coupling = coupling_g(model, grid, kappa, theta)?;
    let w = interaction_w(&coupling, basis)?;
    let hf = basis.field_energy(grid)?;
    let matrix = assemble(&model.h_el, &w, g, &hf.matrix, (-theta).exp());
    Ok(DilatedHamiltonian {
        params: HamiltonianParams {
            kappa,
            theta,
            g,
            model: model.name.clone(),
            n_modes: grid.len(),
            n_ph: basis.max_total,
            rescaled: false,
            level: None,
            dim: matrix.nrows,
        },
        matrix,
    })
}

/// `Ȟ(κ,θ) = Ȟ_{el,j}(θ) ⊗ 1 + g W̌(κ,θ) + 1 ⊗ H_f`.
pub fn assemble_rescaled(
    model: &AtomModel,
    grid: &ModeGrid,
    basis: &FockBasis,
    kappa: [C64; 2],
    theta: C64,
    g: f64,
    gap: &GapData,
) -> Result<DilatedHamiltonian> {
    check_components(model, grid, basis)?;
    let coupling = coupling_rescaled(model, grid, kappa, theta, gap)?;
    let w = interaction_w(&coupling, basis)?;
    let hf = basis.field_energy(grid)?;
    let atom = rescaled_atom(model, gap, theta);
    let matrix = assemble(&atom, &w, g, &hf.matrix, ONE);
    Ok(DilatedHamiltonian {
        params: HamiltonianParams {
            kappa,
            theta,
            g,
            model: model.name.clone(),
            n_modes: grid.len(),
            n_ph: basis.max_total,
            rescaled: true,
            level: Some(gap.j),
            dim: matrix.nrows,
        },
        matrix,
    })
}

/// Physical parametrization `κ₁ = κ₂ = κ`.
pub fn physical(kappa: C64) -> [C64; 2] {
    [kappa, kappa]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::two_level_model;
    use crate::modes::{build_mode_grid, AngularGroup};

    fn setup() -> (AtomModel, ModeGrid, FockBasis) {
        let m = two_level_model(0.0, 1.0, 1.0).unwrap();
        let g = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let b = FockBasis::over_grid(&g, 2).unwrap();
        (m, g, b)
    }

    #[test]
    fn zero_kappa_gives_zero_coupling() {
        let (m, g, _) = setup();
        let c = coupling_g(&m, &g, physical(ZERO), ZERO).unwrap();
        assert!(c.create.iter().all(|x| linalg::max_abs(x.as_ref()) == 0.0));
    }

    #[test]
    fn theta_outside_strip_rejected() {
        let (m, g, _) = setup();
        assert!(coupling_g(&m, &g, physical(ONE), C64::new(0.0, 0.8)).is_err());
    }

    #[test]
    fn w_is_hermitian_at_real_parameters() {
        let (m, g, b) = setup();
        let c = coupling_g(&m, &g, physical(C64::new(0.3, 0.0)), ZERO).unwrap();
        let w = interaction_w(&c, &b).unwrap().to_dense();
        assert!(linalg::hermiticity_defect(w.as_ref()) < 1e-12);
    }

    #[test]
    fn single_photon_matrix_element() {
        let (m, g, b) = setup();
        let c = coupling_g(&m, &g, physical(C64::new(0.7, 0.1)), C64::new(0.1, 0.2)).unwrap();
        let w = interaction_w(&c, &b).unwrap().to_dense();
        let df = b.dim();
        for i in 0..g.len() {
            let f = b.one_photon(i).unwrap();
            for a in 0..2 {
                for bb in 0..2 {
                    assert_eq!(w[(a * df + f, bb * df)], c.create[i][(a, bb)]);
                }
            }
        }
    }

    #[test]
    fn dilating_the_grid_shifts_theta() {
        // H(κ,θ) on the grid e^{−τ}Γ equals H(κ,θ+τ) on Γ
        let (m, g, b) = setup();
        let tau = 0.37;
        let kappa = physical(C64::new(0.8, 0.1));
        let th = C64::new(0.05, 0.2);
        let a = assemble_h(&m, &g.dilated(-tau), &b, kappa, th, 1.0).unwrap().to_dense();
        let c = assemble_h(&m, &g, &b, kappa, th + tau, 1.0).unwrap().to_dense();
        let diff = linalg::frobenius(linalg::sub(a.as_ref(), c.as_ref()).as_ref());
        assert!(diff < 1e-13 * linalg::frobenius(c.as_ref()), "{diff}");
    }

    #[test]
    fn rescaled_level_sits_at_zero() {
        let (m, g, b) = setup();
        let gap = crate::atom::spectral_gap(&m, 1).unwrap();
        let th = C64::new(0.0, 0.3);
        let h = assemble_rescaled(&m, &g, &b, physical(ONE), th, 0.0, &gap).unwrap().to_dense();
        // excited atom ⊗ vacuum is the first row of the second atomic block
        let i = b.dim();
        assert!(h[(i, i)].norm() < 1e-15);
        let h0 = assemble_h(&m, &g, &b, physical(ONE), th + gap.tau, 0.0).unwrap().to_dense();
        let f = th.exp() / gap.delta_check;
        for k in 0..h.nrows() {
            let want = f * (h0[(k, k)] - gap.energy);
            assert!((h[(k, k)] - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn decoupled_spectrum_is_tensor_sum() {
        let (m, g, b) = setup();
        let h = assemble_h(&m, &g, &b, physical(ONE), ZERO, 0.0).unwrap().to_dense();
        let hf = b.field_energy(&g).unwrap().to_dense();
        for a in 0..2 {
            for f in 0..b.dim() {
                let i = a * b.dim() + f;
                assert!((h[(i, i)].re - (m.h_el[(a, a)].re + hf[(f, f)].re)).abs() < 1e-15);
            }
        }
    }
}
