//! Eigenvalues near a target via sparse shift-invert, compared to the dense solver.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::{eigs, shift_invert, ShiftInvertOptions};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(2, 3.0, AngularGroup::Octahedral, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 2)?;
    let h = assemble_h(&model, &grid, &basis, physical(C64::new(0.2, 0.0)), C64::new(0.0, 0.3), 1.0)?;
    // one isolated eigenvalue near the shift; the one-photon states further out
    // are nearly degenerate and would stall subspace iteration if requested
    let sigma = C64::new(1.0, 0.0);
    let near = shift_invert(&h.matrix, sigma, None, &ShiftInvertOptions { nev: 1, ..Default::default() })?;
    let dense = eigs(h.to_dense().as_ref())?;
    println!("dim {}", h.dim());
    for e in &near.eigenvalues {
        let closest = dense.eigenvalues.iter().map(|d| (d - e).norm()).fold(f64::INFINITY, f64::min);
        println!("{:+.10} {:+.3e}i  (dense distance {closest:.1e})", e.re, e.im);
    }
    Ok(())
}
