//! Rotation and time-reversal residuals on an assembled Hamiltonian, plus
//! Kramers pairing on a random time-reversal symmetric matrix.
use dilres::cli::suite::symmetry_toy;
use dilres::fock::FockBasis;
use dilres::hamiltonian::{assemble_h, physical};
use dilres::linalg;
use dilres::modes::{build_mode_grid, AngularGroup};
use dilres::symmetry::{
    binary_group, check_symmetry, kramers_check, rotation_op, symmetrized_kramers_matrix, time_reversal_op,
};
use num_complex::Complex64 as C64;
use rand::SeedableRng;

fn main() -> dilres::Result<()> {
    let model = symmetry_toy()?;
    let grid = build_mode_grid(1, 3.0, AngularGroup::Octahedral, 1.0)?;
    let basis = FockBasis::over_grid(&grid, 1)?;
    let h = assemble_h(&model, &grid, &basis, physical(C64::new(0.1, 0.0)), C64::new(0.0, 0.0), 1.0)?.to_dense();

    let mut worst: f64 = 0.0;
    for u in binary_group(AngularGroup::Octahedral) {
        let s = rotation_op(&model, &grid, u.as_ref(), "R")?.full(&basis)?;
        worst = worst.max(check_symmetry(h.as_ref(), &s)?);
    }
    let t = time_reversal_op(&model, &grid)?.full(&basis)?;
    println!("dim {}: rotation residual {worst:.2e}, time reversal {:.2e}", h.nrows(), check_symmetry(h.as_ref(), &t)?);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let (hk, tk) = symmetrized_kramers_matrix(linalg::random_hermitian(10, &mut rng).as_ref())?;
    let r = kramers_check(hk.as_ref(), &tk, 1e-10)?;
    println!("{r:?}");
    Ok(())
}
