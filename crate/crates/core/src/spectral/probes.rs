use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CauchyRiemann {
    pub h: f64,
    /// Residual at step `h`.
    pub residual: f64,
    /// Residual at step `h/2`.
    pub residual_half: f64,
    /// Richardson estimate of the residual with the O(h²) term removed.
    pub floor: f64,
}

fn cr_residual<F: Fn(C64) -> Result<C64>>(f: &F, z0: C64, h: f64) -> Result<C64> {
    let dx = (f(z0 + h)? - f(z0 - h)?) / (2.0 * h);
    let dy = (f(z0 + C64::new(0.0, h))? - f(z0 - C64::new(0.0, h))?) / C64::new(0.0, 2.0 * h);
    Ok(dx - dy)
}

/// Mismatch between the real- and imaginary-direction central differences of `f` at `z0`.
pub fn cauchy_riemann_probe<F: Fn(C64) -> Result<C64>>(f: F, z0: C64, h: f64) -> Result<CauchyRiemann> {
    let r1 = cr_residual(&f, z0, h)?;
    let r2 = cr_residual(&f, z0, h / 2.0)?;
    Ok(CauchyRiemann {
        h,
        residual: r1.norm(),
        residual_half: r2.norm(),
        floor: ((4.0 * r2 - r1) / 3.0).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entire_function_passes() {
        let r = cauchy_riemann_probe(|z| Ok(z * z), C64::new(1.0, 0.0), 1e-4).unwrap();
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn conjugation_detected() {
        let r = cauchy_riemann_probe(|z: C64| Ok(z.conj()), C64::new(0.3, 0.2), 1e-4).unwrap();
        assert!((r.residual - 2.0).abs() < 1e-8);
    }
}
