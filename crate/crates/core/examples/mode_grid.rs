//! Builds the octahedral mode grid and prints nodes, weights and the dilated `k_θ`.
use dilres::modes::{build_mode_grid, AngularGroup};
use num_complex::Complex64 as C64;

fn main() -> dilres::Result<()> {
    let grid = build_mode_grid(2, 3.0, AngularGroup::Octahedral, 1.0)?;
    println!("{} modes on {} directions, radii {:?}", grid.len(), grid.n_dirs(), grid.radii);
    for n in grid.nodes.iter().take(4) {
        println!("k = {:?} λ = {} w = {:.6} ε = {:?}", n.k, n.lambda, n.weight, n.eps);
    }
    let total: f64 = grid.nodes.iter().map(|n| n.weight).sum::<f64>() / 2.0;
    println!("Σw / 2 = {total:.12} vs ball volume {:.12}", 4.0 * std::f64::consts::PI / 3.0 * 27.0);

    let k = grid.k_theta(C64::new(0.0, 0.3))?;
    println!("‖k_θ‖ at θ = 0.3i: {:.6}", grid.l2_norm(&k));
    Ok(())
}
