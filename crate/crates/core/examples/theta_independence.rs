//! Resonance energy across several θ, on increasingly fine radial grids.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::{theta_independence, Seed, TrackOptions};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let thetas: Vec<C64> = [0.3, 0.4, 0.5].iter().map(|&t| C64::new(0.0, t)).collect();
    for nr in [2, 4, 8] {
        let grid = build_mode_grid(nr, 3.0, AngularGroup::InversionOnly, 1.0)?;
        let basis = FockBasis::over_grid(&grid, 1)?;
        let seed = Seed::from_level(&model, basis.dim(), 1)?;
        let r = theta_independence(
            |p| assemble_h(&model, &grid, &basis, physical(p.kappa), p.theta, 1.0),
            C64::new(0.1, 0.0),
            &thetas,
            &seed,
            10,
            &TrackOptions::default(),
        )?;
        println!("n_radial {nr}: deviation {:.3e}, E(0.3i) = {:.10}", r.deviation, r.energies[0]);
    }
    Ok(())
}
