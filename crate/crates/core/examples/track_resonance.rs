//! Follows the excited level of the two-level toy from κ = 0 to κ = 0.3 at θ = 0.3i.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::{kappa_path, track_resonance, Seed, TrackOptions};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(4, 3.0, AngularGroup::InversionOnly, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 1)?;
    let seed = Seed::from_level(&model, basis.dim(), 1)?;
    let traj = track_resonance(
        |p| assemble_h(&model, &grid, &basis, physical(p.kappa), p.theta, 1.0),
        &kappa_path(C64::new(0.3, 0.0), C64::new(0.0, 0.3), 10),
        &seed,
        &TrackOptions::default(),
    );
    for p in &traj.points {
        println!("κ = {:.3}  E = {:+.10} {:+.3e}i  shift {:.2e}", p.point.kappa.re, p.energy.re, p.energy.im, p.projector_shift);
    }
    println!("events {:?} aborted {:?}", traj.events, traj.aborted);
    Ok(())
}
