//! Second-order level shift from the oracle against exact tracking at small g.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, coupling_g, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::{perturbation2_oracle, track_resonance, PathPoint, Seed, TrackOptions};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(4, 3.0, AngularGroup::InversionOnly, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 1)?;
    let kappa = physical(C64::new(1.0, 0.0));
    let zero = C64::new(0.0, 0.0);
    let c = perturbation2_oracle(&model, &coupling_g(&model, &grid, kappa, zero)?, &grid.omegas(), 0)?;
    println!("E₀(g) ≈ E₀ + {c:.10} g²");

    let gs = [1e-3, 3e-3, 1e-2];
    let mut path = vec![PathPoint::new(zero, zero)];
    path.extend(gs.iter().map(|&g| PathPoint::new(C64::new(g, 0.0), zero)));
    let traj = track_resonance(
        |p| assemble_h(&model, &grid, &basis, kappa, p.theta, p.kappa.re),
        &path,
        &Seed::from_level(&model, basis.dim(), 0)?,
        &TrackOptions::default(),
    );
    for (g, p) in gs.iter().zip(&traj.points[1..]) {
        println!("g = {g:.0e}: ΔE / (c g²) = {:.6}", ((p.energy - traj.points[0].energy) / (c * g * g)).re);
    }
    Ok(())
}
