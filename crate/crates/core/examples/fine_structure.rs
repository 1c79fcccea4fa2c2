//! n = 2 hydrogen with regularized spin-orbit coupling: levels, multiplicities
//! and the radial constant against its closed form.
use dilres::atom::{c_r_exact, fine_structure_model, RadialGrid};
use dilres::spectral::eigs;

fn main() -> dilres::Result<()> {
    let (z, beta, eps) = (1.0, 1e-3, 0.1);
    let fs = fine_structure_model(z, beta, eps, &RadialGrid::for_shell(z, 2, 1)?)?;
    let spec = eigs(fs.model.h_el.as_ref())?;
    for c in &spec.clusters {
        println!("E = {:+.12} (×{})", c.center.re, c.multiplicity());
    }
    println!("predicted shifts {:?}", fs.shifts());
    println!("c_R numeric {:.12} closed form {:.12}", fs.c_r, c_r_exact(z, eps));
    Ok(())
}
