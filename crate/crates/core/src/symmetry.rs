//! Rotations and time reversal on atom ⊗ Fock space, and the checks built on
//! them (symmetry residuals, Kramers pairing, irreducibility).

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::atom::{spin_factor_dim, AtomModel, OrbitalBlock};
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::linalg::{self, AntiOp, CMat, ONE};
use crate::modes::{dot, rotate, transpose3, AngularGroup, ModeGrid};
use crate::spectral::eigs::eigs;

pub type Rot3 = [[f64; 3]; 3];

/// `π(U)_{lj} = ½ tr(σ_l U σ_j U†)`.
pub fn su2_to_so3(u: MatRef<'_, C64>) -> Result<Rot3> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::DimensionMismatch("SU(2) element must be 2x2".into()));
    }
    let defect = linalg::unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let det = linalg::det2(u);
    if (det - ONE).norm() > 1e-10 {
        return Err(Error::InvalidParameter(format!("det U = {det} is not 1")));
    }
    let sigma = linalg::pauli();
    let ud = u.adjoint();
    let mut r = [[0.0; 3]; 3];
    for l in 0..3 {
        for j in 0..3 {
            let m = sigma[l].as_ref() * u * sigma[j].as_ref() * ud;
            r[l][j] = 0.5 * linalg::trace(m.as_ref()).re;
        }
    }
    Ok(r)
}

/// `exp(−iφ n̂·σ/2)`.
pub fn su2_rotation(axis: [f64; 3], phi: f64) -> CMat {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let sigma = linalg::pauli();
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    let mut m = linalg::scale(linalg::identity(2).as_ref(), C64::new(c, 0.0));
    for a in 0..3 {
        let coef = C64::new(0.0, -s * axis[a] / n);
        m = linalg::add(m.as_ref(), linalg::scale(sigma[a].as_ref(), coef).as_ref());
    }
    m
}

/// The SU(2) preimage of the rotation group, generated by closure.
pub fn binary_group(group: AngularGroup) -> Vec<CMat> {
    let pi = std::f64::consts::PI;
    let gens = match group {
        AngularGroup::InversionOnly => vec![su2_rotation([1.0, 0.0, 0.0], pi), su2_rotation([0.0, 1.0, 0.0], pi)],
        AngularGroup::Octahedral => {
            vec![su2_rotation([0.0, 0.0, 1.0], pi / 2.0), su2_rotation([1.0, 0.0, 0.0], pi / 2.0)]
        }
    };
    let mut elems = vec![linalg::identity(2)];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in &gens {
                let p = a.as_ref() * g.as_ref();
                if !elems.iter().any(|e| linalg::max_abs(linalg::sub(e.as_ref(), p.as_ref()).as_ref()) < 1e-9) {
                    elems.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    elems
}

/// Mode-space unitary `(u h)(k,λ) = Σ_μ ε(k,λ)·R ε(R⁻¹k,μ) h(R⁻¹k,μ)`.
pub fn rotate_photon_modes(r: &Rot3, grid: &ModeGrid) -> Result<CMat> {
    let inv = transpose3(r);
    let dmap = grid.direction_map(&inv)?;
    let n = grid.len();
    let mut u = linalg::zeros(n, n);
    for i in 0..n {
        let (ri, di, li) = grid.locate(i);
        for mu in 1..=2u8 {
            let j = grid.index(ri, dmap[di], mu);
            let reps = rotate(r, &grid.nodes[j].eps);
            u[(i, j)] = C64::new(dot(&grid.nodes[i].eps, &reps), 0.0);
            debug_assert_eq!(grid.nodes[i].lambda, li);
        }
    }
    Ok(u)
}

/// Antilinear `𝓚_𝔥 h(k,λ) = Σ_μ ε(k,λ)·ε(−k,μ) conj h(−k,μ)`.
pub fn conjugation_photon(grid: &ModeGrid) -> Result<AntiOp> {
    let inv = grid.inversion_map()?;
    let n = grid.len();
    let mut m = linalg::zeros(n, n);
    for i in 0..n {
        let (ri, di, _) = grid.locate(i);
        for mu in 1..=2u8 {
            let j = grid.index(ri, inv[di], mu);
            m[(i, j)] = C64::new(dot(&grid.nodes[i].eps, &grid.nodes[j].eps), 0.0);
        }
    }
    Ok(AntiOp::antilinear(m))
}

/// Mode map `−𝓚_𝔥` whose second quantization is the photon time reversal.
pub fn time_reversal_photon(grid: &ModeGrid) -> Result<AntiOp> {
    let k = conjugation_photon(grid)?;
    Ok(AntiOp::antilinear(linalg::scale(k.matrix.as_ref(), -ONE)))
}

fn spin_power(u: MatRef<'_, C64>, n: usize, spin_value: f64) -> CMat {
    if spin_value == 0.0 {
        return linalg::identity(1);
    }
    let mut m = linalg::identity(1);
    for _ in 0..n {
        m = linalg::kron(m.as_ref(), u);
    }
    m
}

/// Atomic rotation `F† ((⊕ orbital blocks) ⊗ U^{⊗N}) F`.
pub fn rotation_electron(model: &AtomModel, u: MatRef<'_, C64>) -> Result<CMat> {
    let product = model
        .product
        .as_ref()
        .ok_or_else(|| Error::Model(format!("model `{}` declares no orbital structure", model.name)))?;
    let r = su2_to_so3(u)?;
    let od = product.orbital_dim();
    let mut orb = linalg::zeros(od, od);
    let mut off = 0;
    for b in &product.orbital {
        match b {
            OrbitalBlock::Scalar => orb[(off, off)] = ONE,
            OrbitalBlock::Vector => {
                for i in 0..3 {
                    for j in 0..3 {
                        orb[(off + i, off + j)] = C64::new(r[i][j], 0.0);
                    }
                }
            }
        }
        off += b.dim();
    }
    let p = linalg::kron(orb.as_ref(), spin_power(u, model.n_particles, model.spin_value).as_ref());
    let f = &product.frame;
    Ok(f.adjoint() * p.as_ref() * f.as_ref())
}

/// Atomic time reversal: complex conjugation of the real orbital basis times
/// `σ₂` on every spin-½ factor.
pub fn time_reversal_electron(model: &AtomModel) -> Result<AntiOp> {
    let spin_dim = spin_factor_dim(model.spin_value, model.n_particles)?;
    if model.dim() % spin_dim != 0 {
        return Err(Error::Model("labels insufficient to locate spin factors".into()));
    }
    let sigma2 = linalg::pauli()[1].clone();
    let spin = spin_power(sigma2.as_ref(), model.n_particles, model.spin_value);
    let p = linalg::kron(linalg::identity(model.dim() / spin_dim).as_ref(), spin.as_ref());
    let m = match &model.product {
        Some(prod) => prod.frame.adjoint() * p.as_ref() * prod.frame.conjugate(),
        None => p,
    };
    Ok(AntiOp::antilinear(m))
}

/// Operator `atom_part ⊗ Γ(photon_part)` with a shared linearity.
#[derive(Clone, Debug)]
pub struct SymmetryOp {
    pub atom_part: AntiOp,
    pub photon_part: AntiOp,
    pub label: String,
}

impl SymmetryOp {
    pub fn new(atom_part: AntiOp, photon_part: AntiOp, label: impl Into<String>) -> Result<Self> {
        if atom_part.antilinear != photon_part.antilinear {
            return Err(Error::InvalidParameter("atom and photon parts must share linearity".into()));
        }
        for part in [&atom_part, &photon_part] {
            let d = part.unitarity_defect();
            if d > 1e-10 {
                return Err(Error::NotUnitary(d));
            }
        }
        Ok(Self { atom_part, photon_part, label: label.into() })
    }

    pub fn is_antilinear(&self) -> bool {
        self.atom_part.antilinear
    }

    /// The operator on atom ⊗ truncated Fock space.
    pub fn full(&self, basis: &FockBasis) -> Result<AntiOp> {
        let gamma = basis.second_quantize(&self.photon_part)?.to_anti_op();
        self.atom_part.tensor(&gamma)
    }
}

pub fn rotation_op(model: &AtomModel, grid: &ModeGrid, u: MatRef<'_, C64>, label: &str) -> Result<SymmetryOp> {
    let r = su2_to_so3(u)?;
    SymmetryOp::new(
        AntiOp::linear(rotation_electron(model, u)?),
        AntiOp::linear(rotate_photon_modes(&r, grid)?),
        label,
    )
}

pub fn time_reversal_op(model: &AtomModel, grid: &ModeGrid) -> Result<SymmetryOp> {
    SymmetryOp::new(time_reversal_electron(model)?, time_reversal_photon(grid)?, "T")
}

/// `‖S H S* − H‖` for unitary `S`, `‖S H S* − H†‖` for antiunitary `S`.
pub fn check_symmetry(h: MatRef<'_, C64>, s: &AntiOp) -> Result<f64> {
    if h.nrows() != s.dim() || h.ncols() != s.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} against matrix {}x{}",
            s.dim(),
            h.nrows(),
            h.ncols()
        )));
    }
    let t = s.conjugate_operator(h);
    let target = if s.antilinear { h.adjoint().to_owned() } else { h.to_owned() };
    Ok(linalg::frobenius(linalg::sub(t.as_ref(), target.as_ref()).as_ref()))
}

#[derive(Clone, Debug, Serialize)]
pub struct KramersReport {
    pub residual: f64,
    pub multiplicities: Vec<usize>,
    pub all_even: bool,
    /// Largest spread inside an eigenvalue cluster.
    pub max_pair_gap: f64,
    /// Largest `|⟨ψ, Tψ⟩|` over computed unit eigenvectors.
    pub max_overlap: f64,
}

pub fn kramers_check(h: MatRef<'_, C64>, t: &AntiOp, tol: f64) -> Result<KramersReport> {
    if !t.antilinear {
        return Err(Error::InvalidParameter("Kramers check needs an antilinear operator".into()));
    }
    let sq = t.square();
    let minus_one = linalg::scale(linalg::identity(t.dim()).as_ref(), -ONE);
    let sq_defect = linalg::frobenius(linalg::sub(sq.matrix.as_ref(), minus_one.as_ref()).as_ref());
    if sq_defect > 1e-10 {
        return Err(Error::InvalidParameter(format!("T² ≠ −1 (defect {sq_defect:.2e})")));
    }
    let residual = check_symmetry(h, t)?;
    if residual > tol {
        return Err(Error::SymmetryViolated { residual, tol });
    }
    let spec = eigs(h)?;
    let n = h.nrows();
    let mut max_overlap: f64 = 0.0;
    for c in 0..n {
        let v = spec.eigenvectors.col(c);
        let tv = t.matrix.as_ref() * v.conjugate();
        let ov: C64 = (0..n).map(|r| v[r].conj() * tv[r]).sum();
        max_overlap = max_overlap.max(ov.norm());
    }
    let multiplicities = spec.multiplicities();
    Ok(KramersReport {
        residual,
        all_even: multiplicities.iter().all(|m| m % 2 == 0),
        max_pair_gap: spec.clusters.iter().map(|c| c.spread).fold(0.0, f64::max),
        multiplicities,
        max_overlap,
    })
}

/// Dimension of the joint commutant of `generators` restricted to the span
/// of the orthonormal columns of `basis`.
pub fn irreducibility_check(generators: &[CMat], basis: MatRef<'_, C64>, tol: f64) -> Result<usize> {
    let d = basis.ncols();
    let mut restricted = Vec::with_capacity(generators.len());
    for g in generators {
        if g.nrows() != basis.nrows() {
            return Err(Error::DimensionMismatch("generator and subspace dimensions differ".into()));
        }
        let gv = g.as_ref() * basis;
        let r = basis.adjoint() * gv.as_ref();
        let leak = linalg::frobenius(linalg::sub(gv.as_ref(), (basis * r.as_ref()).as_ref()).as_ref());
        if leak > tol {
            return Err(Error::NotInvariant(leak));
        }
        restricted.push(r);
    }
    if restricted.is_empty() {
        return Ok(d * d);
    }
    let dd = d * d;
    let id = linalg::identity(d);
    let mut stacked = Mat::<C64>::zeros(restricted.len() * dd, dd);
    for (k, g) in restricted.iter().enumerate() {
        // vec(gX − Xg) = (I ⊗ g − gᵀ ⊗ I) vec(X)
        let a = linalg::kron(id.as_ref(), g.as_ref());
        let b = linalg::kron(g.transpose(), id.as_ref());
        for r in 0..dd {
            for c in 0..dd {
                stacked[(k * dd + r, c)] = a[(r, c)] - b[(r, c)];
            }
        }
    }
    let sv = linalg::singular_values(stacked.as_ref())?;
    let smax = sv.first().copied().unwrap_or(0.0).max(1.0);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * smax).count();
    Ok(dd - rank)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub label: String,
    pub residual: f64,
    pub multiplicity_table: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutant_dim: Option<usize>,
}

/// Multiplicity table of a Hermitian or general matrix at the default tolerance.
pub fn multiplicity_table(h: MatRef<'_, C64>) -> Result<Vec<usize>> {
    Ok(eigs(h)?.multiplicities())
}

/// Time-reversal-symmetric Hermitian matrix on `orbitals ⊗ spin ½`:
/// `(A + T A T*)/2` with `T = (1 ⊗ σ₂) K`.
pub fn symmetrized_kramers_matrix(a: MatRef<'_, C64>) -> Result<(CMat, AntiOp)> {
    let n = a.nrows();
    if n % 2 != 0 {
        return Err(Error::DimensionMismatch("spin-½ space must have even dimension".into()));
    }
    let sigma2 = linalg::pauli()[1].clone();
    let t = AntiOp::antilinear(linalg::kron(linalg::identity(n / 2).as_ref(), sigma2.as_ref()));
    let ta = t.conjugate_operator(a);
    let h = linalg::scale(linalg::add(a, ta.as_ref()).as_ref(), C64::new(0.5, 0.0));
    Ok((h, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{build_mode_grid, det3, matmul3};

    #[test]
    fn identity_maps_to_identity_rotation() {
        let r = su2_to_so3(linalg::identity(2).as_ref()).unwrap();
        assert_eq!(r, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn quarter_turn_about_z() {
        let u = su2_rotation([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2);
        let r = su2_to_so3(u.as_ref()).unwrap();
        let want = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
        let minus = linalg::scale(u.as_ref(), -ONE);
        assert_eq!(su2_to_so3(minus.as_ref()).unwrap(), r);
    }

    #[test]
    fn binary_groups_have_expected_order() {
        assert_eq!(binary_group(AngularGroup::Octahedral).len(), 48);
        assert_eq!(binary_group(AngularGroup::InversionOnly).len(), 8);
        for u in binary_group(AngularGroup::Octahedral) {
            let r = su2_to_so3(u.as_ref()).unwrap();
            assert!((det3(&r) - 1.0).abs() < 1e-12);
            let rr = matmul3(&r, &transpose3(&r));
            assert!((rr[0][0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_rotation_on_modes() {
        let g = build_mode_grid(1, 1.0, AngularGroup::Octahedral, 1.0).unwrap();
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let u = rotate_photon_modes(&id, &g).unwrap();
        assert!(linalg::frobenius(linalg::sub(u.as_ref(), linalg::identity(g.len()).as_ref()).as_ref()) < 1e-15);
    }

    #[test]
    fn off_grid_rotation_rejected() {
        let g = build_mode_grid(1, 1.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let quarter = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(matches!(rotate_photon_modes(&quarter, &g), Err(Error::GridNotPreserved(_))));
    }

    #[test]
    fn real_diagonal_is_conjugation_symmetric() {
        let h = linalg::diag_real(&[1.0, -2.0, 0.5]);
        let k = AntiOp::antilinear(linalg::identity(3));
        assert_eq!(check_symmetry(h.as_ref(), &k).unwrap(), 0.0);
    }

    #[test]
    fn commutant_dimensions() {
        let gens: Vec<CMat> = (0..3)
            .map(|a| {
                let mut axis = [0.0; 3];
                axis[a] = 1.0;
                su2_rotation(axis, 0.7)
            })
            .collect();
        assert_eq!(irreducibility_check(&gens, linalg::identity(2).as_ref(), 1e-10).unwrap(), 1);
        assert_eq!(irreducibility_check(&[linalg::identity(2)], linalg::identity(2).as_ref(), 1e-10).unwrap(), 4);
    }

    #[test]
    fn kramers_refuses_broken_symmetry() {
        let h = linalg::diag_real(&[0.0, 1.0]);
        let t = AntiOp::antilinear(linalg::pauli()[1].clone());
        assert!(matches!(kramers_check(h.as_ref(), &t, 1e-10), Err(Error::SymmetryViolated { .. })));
    }
}
