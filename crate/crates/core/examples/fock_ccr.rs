//! Truncated Fock space: dimensions, ladder operators and the CCR defect.
use dilres::fock::{ccr_defect, fock_dimension, FockBasis};

fn main() -> dilres::Result<()> {
    for (m, n) in [(8, 1), (8, 2), (24, 2)] {
        let basis = FockBasis::new(m, n)?;
        println!(
            "{m:>2} modes, N_ph ≤ {n}: dim {} (expected {:?}), CCR defect {:.2e}",
            basis.dim(),
            fock_dimension(m, n),
            ccr_defect(&basis)?
        );
    }
    let basis = FockBasis::new(2, 2)?;
    let a = basis.annihilation(0)?;
    for &(r, c, v) in &a.matrix.entries {
        println!("a_0 {:?} -> {:?}: {:.4}", basis.states[c], basis.states[r], v.re);
    }
    Ok(())
}
