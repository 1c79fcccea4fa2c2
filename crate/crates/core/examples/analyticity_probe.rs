//! Cauchy–Riemann probe of the tracked resonance as a function of complex κ.
use dilres::atom::two_level_model;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::spectral::{cauchy_riemann_probe, kappa_path, track_resonance, Seed, TrackOptions};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let model = two_level_model(0.0, 1.0, 1.0)?;
    let grid = build_mode_grid(2, 3.0, AngularGroup::InversionOnly, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 1)?;
    let seed = Seed::from_level(&model, basis.dim(), 1)?;
    let theta = C64::new(0.0, 0.3);
    let energy = |kappa: C64| {
        track_resonance(
            |p| assemble_h(&model, &grid, &basis, physical(p.kappa), p.theta, 1.0),
            &kappa_path(kappa, theta, 8),
            &seed,
            &TrackOptions::default(),
        )
        .into_result()
        .map(|t| t.last_energy().unwrap_or_default())
    };
    let r = cauchy_riemann_probe(energy, C64::new(0.3, 0.05), 1e-3)?;
    println!("{r:?}");
    Ok(())
}
