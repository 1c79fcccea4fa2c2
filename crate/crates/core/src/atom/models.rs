//! Built-in atomic models.

use faer::Mat;
use num_complex::Complex64 as C64;

use super::hydrogen::{c_r, dipole_radial_2s2p, RadialGrid};
use super::{AtomModel, OrbitalBlock, ProductFrame, StateLabel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, I, ONE, ZERO};

/// Two levels `E_g < E_e` with a dipole `d σ₁` along `e₃`; spinless.
pub fn two_level_model(e_g: f64, e_e: f64, d: f64) -> Result<AtomModel> {
    let h = linalg::diag_real(&[e_g, e_e]);
    let z = linalg::zeros(2, 2);
    let dz = linalg::scale(linalg::pauli()[0].as_ref(), C64::new(d, 0.0));
    let model = AtomModel::new(
        "toy-two-level",
        h,
        [z.clone(), z.clone(), dz],
        [z.clone(), z.clone(), z],
        vec![StateLabel::named("g"), StateLabel::named("e")],
        1,
        0.0,
    )?;
    model.with_product(ProductFrame {
        orbital: vec![OrbitalBlock::Scalar, OrbitalBlock::Scalar],
        frame: linalg::identity(2),
    })
}

/// Hydrogen energies `−Z²/(4n²)`, `n = 1..=n_max`, one state per shell.
pub fn hydrogen_level_model(z: f64, n_max: u32) -> Result<AtomModel> {
    if n_max < 1 || !(z > 0.0) {
        return Err(Error::InvalidParameter(format!("hydrogen level set Z={z}, n_max={n_max}")));
    }
    let e: Vec<f64> = (1..=n_max).map(|n| -z * z / (4.0 * (n * n) as f64)).collect();
    let dim = e.len();
    let zero = linalg::zeros(dim, dim);
    AtomModel::new(
        "hydrogen-levels",
        linalg::diag_real(&e),
        [zero.clone(), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero],
        (1..=n_max)
            .map(|n| StateLabel { name: format!("n={n}"), n: Some(n), ..Default::default() })
            .collect(),
        1,
        0.0,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpShellParams {
    pub e_s: f64,
    pub e_p: f64,
    /// Coefficient of `L·S` on the p orbitals.
    pub spin_orbit: f64,
    /// `⟨s|x_a|p_a⟩`.
    pub dipole: f64,
    pub n: Option<u32>,
}

const S: usize = 0;

fn cart(o: usize, spin: usize) -> usize {
    o * 2 + spin
}

/// Orbital `L_a` on `(s, p_x, p_y, p_z)`: zero on s, `−i ε_abc` on p.
fn orbital_l() -> [CMat; 3] {
    std::array::from_fn(|a| {
        Mat::from_fn(4, 4, |r, c| {
            if r == S || c == S {
                return ZERO;
            }
            let (b, cc) = (r - 1, c - 1);
            let eps = levi_civita(a, b, cc);
            I * (-eps)
        })
    })
}

pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Coupled `|l, j, m_j⟩` vectors expressed in the Cartesian product basis.
fn coupled_frame() -> (CMat, Vec<StateLabel>) {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    // spherical p components on (p_x, p_y, p_z)
    let p_plus = [C64::new(-r2, 0.0), C64::new(0.0, -r2), ZERO];
    let p_zero = [ZERO, ZERO, ONE];
    let p_minus = [C64::new(r2, 0.0), C64::new(0.0, -r2), ZERO];
    let (up, dn) = (0usize, 1usize);
    let a = (1.0f64 / 3.0).sqrt();
    let b = (2.0f64 / 3.0).sqrt();

    let mut cols: Vec<(Vec<(usize, C64)>, StateLabel)> = Vec::new();
    let label = |l: u32, j: f64, m: f64| StateLabel {
        name: format!("l={l},j={j},m={m}"),
        n: None,
        l: Some(l),
        j: Some(j),
        m_j: Some(m),
    };
    let p = |v: &[C64; 3], spin: usize, coef: f64| -> Vec<(usize, C64)> {
        (0..3).map(|k| (cart(1 + k, spin), v[k] * coef)).collect()
    };
    cols.push((vec![(cart(S, up), ONE)], label(0, 0.5, 0.5)));
    cols.push((vec![(cart(S, dn), ONE)], label(0, 0.5, -0.5)));
    cols.push(([p(&p_zero, up, -a), p(&p_plus, dn, b)].concat(), label(1, 0.5, 0.5)));
    cols.push(([p(&p_minus, up, -b), p(&p_zero, dn, a)].concat(), label(1, 0.5, -0.5)));
    cols.push((p(&p_plus, up, 1.0), label(1, 1.5, 1.5)));
    cols.push(([p(&p_zero, up, b), p(&p_plus, dn, a)].concat(), label(1, 1.5, 0.5)));
    cols.push(([p(&p_minus, up, a), p(&p_zero, dn, b)].concat(), label(1, 1.5, -0.5)));
    cols.push((p(&p_minus, dn, 1.0), label(1, 1.5, -1.5)));

    let mut f = linalg::zeros(8, 8);
    let mut labels = Vec::with_capacity(8);
    for (c, (entries, lab)) in cols.into_iter().enumerate() {
        for (r, v) in entries {
            f[(r, c)] += v;
        }
        labels.push(lab);
    }
    (f, labels)
}

/// Cartesian-product operators of the s+p shell with spin ½.
pub struct SpOperators {
    pub h: CMat,
    pub dipole: [CMat; 3],
    pub spin: [CMat; 3],
    pub orbital_l: [CMat; 3],
}

pub fn sp_cartesian_operators(p: &SpShellParams) -> SpOperators {
    let sigma = linalg::pauli();
    let half = C64::new(0.5, 0.0);
    let s: [CMat; 3] = std::array::from_fn(|a| linalg::scale(sigma[a].as_ref(), half));
    let id2 = linalg::identity(2);
    let id4 = linalg::identity(4);
    let l = orbital_l();
    let mut h = linalg::kron(linalg::diag_real(&[p.e_s, p.e_p, p.e_p, p.e_p]).as_ref(), id2.as_ref());
    for a in 0..3 {
        let ls = linalg::kron(l[a].as_ref(), s[a].as_ref());
        h = linalg::add(h.as_ref(), linalg::scale(ls.as_ref(), C64::new(p.spin_orbit, 0.0)).as_ref());
    }
    let dipole = std::array::from_fn(|a| {
        let orb = Mat::from_fn(4, 4, |r, c| {
            if (r == S && c == a + 1) || (c == S && r == a + 1) {
                C64::new(p.dipole, 0.0)
            } else {
                ZERO
            }
        });
        linalg::kron(orb.as_ref(), id2.as_ref())
    });
    let spin = std::array::from_fn(|a| linalg::kron(id4.as_ref(), s[a].as_ref()));
    let orbital_l = std::array::from_fn(|a| linalg::kron(l[a].as_ref(), id2.as_ref()));
    SpOperators { h, dipole, spin, orbital_l }
}

/// s+p shell times spin ½ in the coupled basis
/// `(s½ ×2, p½ ×2, p3/2 ×4)`.
pub fn sp_shell_model(name: &str, p: &SpShellParams) -> Result<AtomModel> {
    let ops = sp_cartesian_operators(p);
    let (f, mut labels) = coupled_frame();
    let to_frame = |m: &CMat| -> CMat {
        let t = linalg::dagger(f.as_ref());
        let x = t.as_ref() * m.as_ref();
        let y = x.as_ref() * f.as_ref();
        // restore exact Hermiticity lost to rounding
        let yd = linalg::dagger(y.as_ref());
        linalg::scale(linalg::add(y.as_ref(), yd.as_ref()).as_ref(), C64::new(0.5, 0.0))
    };
    if let Some(n) = p.n {
        for lab in &mut labels {
            lab.n = Some(n);
            lab.name = format!("n={n},{}", lab.name);
        }
    }
    let model = AtomModel::new(
        name,
        to_frame(&ops.h),
        [to_frame(&ops.dipole[0]), to_frame(&ops.dipole[1]), to_frame(&ops.dipole[2])],
        [to_frame(&ops.spin[0]), to_frame(&ops.spin[1]), to_frame(&ops.spin[2])],
        labels,
        1,
        0.5,
    )?;
    model.with_product(ProductFrame {
        orbital: vec![OrbitalBlock::Scalar, OrbitalBlock::Vector],
        frame: f,
    })
}

/// `c_G`: with `L·S = (J² − L² − S²)/2` the p-shell eigenvalues are `c_G·l`
/// and `−c_G·(l+1)`.
pub const C_G: f64 = 0.5;

/// Largest admissible `|β| c_R(ε) / |E₂|`.
pub const PERTURBATIVE_THRESHOLD: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct FineStructure {
    pub model: AtomModel,
    pub e2: f64,
    pub c_r: f64,
    pub c_g: f64,
    pub beta: f64,
    pub eps: f64,
}

impl FineStructure {
    /// First-order shifts of `(l,j) = (0,½), (1,½), (1,3/2)` relative to `E₂`.
    pub fn shifts(&self) -> [f64; 3] {
        let c = self.beta * self.c_g * self.c_r;
        [0.0, -2.0 * c, c]
    }
}

/// The n = 2 shell with spin-orbit coupling `β ν_ε(r) L·S`.
pub fn fine_structure_model(z: f64, beta: f64, eps: f64, radial: &RadialGrid) -> Result<FineStructure> {
    let e2 = -z * z / 16.0;
    let cr = c_r(z, eps, radial)?;
    if (beta * cr).abs() > PERTURBATIVE_THRESHOLD * e2.abs() {
        return Err(Error::InvalidParameter(format!(
            "β = {beta} outside the perturbative regime (β c_R = {:.3e})",
            beta * cr
        )));
    }
    let r = dipole_radial_2s2p(z, radial)?;
    let model = sp_shell_model(
        "hydrogen-fine-structure",
        &SpShellParams { e_s: e2, e_p: e2, spin_orbit: beta * cr, dipole: r / 3f64.sqrt(), n: Some(2) },
    )?;
    Ok(FineStructure { model, e2, c_r: cr, c_g: C_G, beta, eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupled_frame_is_unitary_and_diagonalizes_j() {
        let (f, labels) = coupled_frame();
        assert!(linalg::unitarity_defect(f.as_ref()) < 1e-14);
        let ops = sp_cartesian_operators(&SpShellParams { e_s: 0.0, e_p: 0.0, spin_orbit: 0.0, dipole: 0.0, n: None });
        let j: Vec<CMat> = (0..3).map(|a| linalg::add(ops.orbital_l[a].as_ref(), ops.spin[a].as_ref())).collect();
        let mut j2 = linalg::zeros(8, 8);
        for ja in &j {
            j2 = linalg::add(j2.as_ref(), (ja.as_ref() * ja.as_ref()).as_ref());
        }
        let fd = linalg::dagger(f.as_ref());
        let j2f = fd.as_ref() * (j2.as_ref() * f.as_ref());
        let jzf = fd.as_ref() * (j[2].as_ref() * f.as_ref());
        for (c, lab) in labels.iter().enumerate() {
            let jj = lab.j.unwrap();
            for r in 0..8 {
                let want2 = if r == c { jj * (jj + 1.0) } else { 0.0 };
                let wantz = if r == c { lab.m_j.unwrap() } else { 0.0 };
                assert!((j2f[(r, c)] - C64::new(want2, 0.0)).norm() < 1e-14);
                assert!((jzf[(r, c)] - C64::new(wantz, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn spin_orbit_pattern() {
        let m = sp_shell_model(
            "t",
            &SpShellParams { e_s: 0.0, e_p: 0.0, spin_orbit: 1.0, dipole: 0.0, n: None },
        )
        .unwrap();
        // L·S eigenvalues: −1 (p½), 0 (s½), ½ (p3/2)
        assert_eq!(m.multiplicities(), vec![2, 2, 4]);
        let e = m.distinct_energies();
        assert!((e[0] + 2.0 * C_G).abs() < 1e-14);
        assert!(e[1].abs() < 1e-14);
        assert!((e[2] - C_G).abs() < 1e-14);
    }

    #[test]
    fn spin_matrices_satisfy_su2() {
        let m = sp_shell_model("t", &SpShellParams { e_s: 0.0, e_p: 1.0, spin_orbit: 0.0, dipole: 1.0, n: None })
            .unwrap();
        assert!(m.spin_algebra_defect() < 1e-12);
    }
}
