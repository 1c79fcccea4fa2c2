//! Full spectrum of the dilated Hamiltonian: eigenvalues, clusters, residuals.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::eigs;
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 1)?;
    let h = assemble_h(&model, &grid, &basis, physical(C64::new(0.3, 0.0)), C64::new(0.0, 0.3), 1.0)?;
    let spec = eigs(h.to_dense().as_ref())?;
    println!("‖H‖ = {:.4}, max residual {:.2e}", spec.matrix_norm, spec.max_residual());
    for c in &spec.clusters {
        println!("{:+.8} {:+.8}i  ×{}", c.center.re, c.center.im, c.multiplicity());
    }
    Ok(())
}
