//! The built-in atomic models and their level structure.
use dilres::atom::{hydrogen_level_model, sp_shell_model, two_level_model, SpShellParams};

fn main() -> dilres::Result<()> {
    let two = two_level_model(0.0, 1.0, 1.0)?;
    println!("two-level: energies {:?}", two.distinct_energies());

    let sp = sp_shell_model("sp", &SpShellParams { e_s: -0.3, e_p: 0.2, spin_orbit: 0.07, dipole: 0.9, n: None })?;
    println!("sp shell: energies {:?} multiplicities {:?}", sp.distinct_energies(), sp.multiplicities());
    println!("spin algebra defect {:.2e}", sp.spin_algebra_defect());

    let h = hydrogen_level_model(1.0, 3)?;
    println!("hydrogen n ≤ 3: energies {:?}", h.distinct_energies());
    Ok(())
}
