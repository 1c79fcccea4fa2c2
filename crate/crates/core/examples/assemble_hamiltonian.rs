//! Assembles H(κ, θ) and writes it in Matrix Market format.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 2)?;
    let h = assemble_h(&model, &grid, &basis, physical(C64::new(0.2, 0.0)), C64::new(0.0, 0.3), 1.0)?;
    println!("dim {} nnz {} dense path {}", h.dim(), h.matrix.nnz(), h.is_dense());
    let path = std::env::temp_dir().join("dilres_h.mtx");
    h.write_matrix_market(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
