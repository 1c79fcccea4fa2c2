//! Truncated bosonic Fock space over a mode grid.

use std::collections::HashMap;

use faer::MatRef;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, AntiOp, CMat, SparseMatrix};
use crate::modes::ModeGrid;

pub const DEFAULT_DIM_CAP: usize = 200_000;

/// Occupation-number basis with total occupation at most `max_total`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub n_modes: usize,
    pub max_total: usize,
    pub states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    FieldEnergy,
    SecondQuantized,
}

#[derive(Clone, Debug)]
pub struct ModeOperator {
    pub kind: OperatorKind,
    pub matrix: SparseMatrix,
    pub antilinear: bool,
}

impl ModeOperator {
    pub fn to_dense(&self) -> CMat {
        self.matrix.to_dense()
    }

    pub fn to_anti_op(&self) -> AntiOp {
        AntiOp { matrix: self.to_dense(), antilinear: self.antilinear }
    }
}

/// `C(m + n, n)` or `None` on overflow.
pub fn fock_dimension(n_modes: usize, max_total: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..=max_total as u128 {
        acc = acc.checked_mul(n_modes as u128 + i)? / i;
    }
    usize::try_from(acc).ok()
}

fn push_sector(n_modes: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() == n_modes {
        if remaining == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if prefix.len() + 1 == n_modes {
        prefix.push(remaining as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for take in (0..=remaining).rev() {
        prefix.push(take as u8);
        push_sector(n_modes, remaining - take, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(n_modes: usize, max_total: usize) -> Result<Self> {
        Self::with_cap(n_modes, max_total, DEFAULT_DIM_CAP)
    }

    /// States are grouped by total occupation (vacuum first) and ordered
    /// lexicographically (descending) within a sector.
    pub fn with_cap(n_modes: usize, max_total: usize, cap: usize) -> Result<Self> {
        if max_total > u8::MAX as usize {
            return Err(Error::InvalidParameter(format!("max_total {max_total} too large")));
        }
        let dim = fock_dimension(n_modes, max_total).unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        let mut states = Vec::with_capacity(dim);
        if n_modes == 0 {
            states.push(Vec::new());
        } else {
            for total in 0..=max_total {
                push_sector(n_modes, total, &mut Vec::with_capacity(n_modes), &mut states);
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { n_modes, max_total, states, index })
    }

    pub fn over_grid(grid: &ModeGrid, max_total: usize) -> Result<Self> {
        Self::new(grid.len(), max_total)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().map(|&n| n as usize).sum()
    }

    /// Index of the single-photon state in `mode`.
    pub fn one_photon(&self, mode: usize) -> Option<usize> {
        if self.max_total == 0 || mode >= self.n_modes {
            return None;
        }
        let mut occ = vec![0u8; self.n_modes];
        occ[mode] = 1;
        self.index_of(&occ)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::InvalidParameter(format!(
                "mode {mode} out of range for {} modes",
                self.n_modes
            )));
        }
        Ok(())
    }

    pub fn annihilation(&self, mode: usize) -> Result<ModeOperator> {
        self.check_mode(mode)?;
        let mut m = SparseMatrix::new(self.dim(), self.dim());
        let mut scratch = vec![0u8; self.n_modes];
        for (col, s) in self.states.iter().enumerate() {
            let n = s[mode];
            if n == 0 {
                continue;
            }
            scratch.copy_from_slice(s);
            scratch[mode] -= 1;
            let row = self.index[&scratch];
            m.push(row, col, C64::new((n as f64).sqrt(), 0.0));
        }
        Ok(ModeOperator { kind: OperatorKind::Annihilation, matrix: m, antilinear: false })
    }

    /// Adjoint of the annihilator; states at the top sector are mapped to zero.
    pub fn creation(&self, mode: usize) -> Result<ModeOperator> {
        let a = self.annihilation(mode)?;
        Ok(ModeOperator { kind: OperatorKind::Creation, matrix: a.matrix.adjoint(), antilinear: false })
    }

    pub fn field_energy(&self, grid: &ModeGrid) -> Result<ModeOperator> {
        if grid.len() != self.n_modes {
            return Err(Error::DimensionMismatch(format!(
                "grid has {} modes, basis {}",
                grid.len(),
                self.n_modes
            )));
        }
        Ok(self.diagonal_energy(&grid.omegas()))
    }

    pub fn diagonal_energy(&self, omega: &[f64]) -> ModeOperator {
        let mut m = SparseMatrix::new(self.dim(), self.dim());
        for (i, s) in self.states.iter().enumerate() {
            let e: f64 = s.iter().zip(omega).map(|(&n, w)| n as f64 * w).sum();
            m.push(i, i, C64::new(e, 0.0));
        }
        ModeOperator { kind: OperatorKind::FieldEnergy, matrix: m, antilinear: false }
    }

    /// Diagonal projector onto states with total occupation below the cutoff.
    pub fn interior_projector(&self) -> CMat {
        let d: Vec<f64> = (0..self.dim())
            .map(|i| if self.total(i) < self.max_total { 1.0 } else { 0.0 })
            .collect();
        linalg::diag_real(&d)
    }

    /// `Γ(u)`: the multiplicative extension of a one-mode unitary (or
    /// antiunitary `u K`) to the truncated Fock space.
    pub fn second_quantize(&self, map: &AntiOp) -> Result<ModeOperator> {
        let u = map.matrix.as_ref();
        if u.nrows() != self.n_modes || u.ncols() != self.n_modes {
            return Err(Error::DimensionMismatch(format!(
                "mode map is {}x{}, basis has {} modes",
                u.nrows(),
                u.ncols(),
                self.n_modes
            )));
        }
        let defect = linalg::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        let mut m = SparseMatrix::new(self.dim(), self.dim());
        let lists: Vec<Vec<usize>> = self.states.iter().map(|s| mode_list(s)).collect();
        let norms: Vec<f64> = self
            .states
            .iter()
            .map(|s| s.iter().map(|&n| factorial(n)).product::<f64>().sqrt())
            .collect();
        let mut start = 0;
        while start < self.dim() {
            let total = self.total(start);
            let mut end = start;
            while end < self.dim() && self.total(end) == total {
                end += 1;
            }
            let mut block = vec![C64::new(0.0, 0.0); total * total];
            for col in start..end {
                for row in start..end {
                    for (a, &r) in lists[row].iter().enumerate() {
                        for (b, &c) in lists[col].iter().enumerate() {
                            block[a * total + b] = u[(r, c)];
                        }
                    }
                    let p = permanent(&block, total) / (norms[row] * norms[col]);
                    if p.norm() > 1e-15 {
                        m.push(row, col, p);
                    }
                }
            }
            start = end;
        }
        Ok(ModeOperator { kind: OperatorKind::SecondQuantized, matrix: m, antilinear: map.antilinear })
    }
}

fn mode_list(occ: &[u8]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat(i).take(n as usize))
        .collect()
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// Ryser's formula for the permanent of a row-major `n × n` matrix.
pub fn permanent(a: &[C64], n: usize) -> C64 {
    match n {
        0 => C64::new(1.0, 0.0),
        1 => a[0],
        2 => a[0] * a[3] + a[1] * a[2],
        _ => {
            let mut total = C64::new(0.0, 0.0);
            for subset in 1u64..(1u64 << n) {
                let mut prod = C64::new(1.0, 0.0);
                for i in 0..n {
                    let row: C64 = (0..n).filter(|j| subset >> j & 1 == 1).map(|j| a[i * n + j]).sum();
                    prod *= row;
                }
                let sign = if (n as u32 - subset.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                total += prod * sign;
            }
            total
        }
    }
}

/// `‖([a_i, a*_j] − δ_ij) P‖` over all pairs, with `P` the interior projector.
/// Ladder operators map basis states to single basis states, so each column of
/// the commutator is built directly instead of through dense products.
pub fn ccr_defect(basis: &FockBasis) -> Result<f64> {
    let dim = basis.dim();
    let mut ann: Vec<Vec<Option<(usize, C64)>>> = Vec::with_capacity(basis.n_modes);
    let mut cre: Vec<Vec<Option<(usize, C64)>>> = Vec::with_capacity(basis.n_modes);
    for i in 0..basis.n_modes {
        let mut a = vec![None; dim];
        let mut c = vec![None; dim];
        for &(r, col, v) in &basis.annihilation(i)?.matrix.entries {
            a[col] = Some((r, v));
            c[r] = Some((col, v.conj()));
        }
        ann.push(a);
        cre.push(c);
    }
    let interior: Vec<usize> = (0..dim).filter(|&c| basis.total(c) < basis.max_total).collect();
    let apply = |op: &[Option<(usize, C64)>], x: Option<(usize, C64)>| {
        x.and_then(|(r, v)| op[r].map(|(r2, w)| (r2, w * v)))
    };
    let mut worst: f64 = 0.0;
    for i in 0..basis.n_modes {
        for j in 0..basis.n_modes {
            let mut sq = 0.0;
            for &c in &interior {
                let e = Some((c, C64::new(1.0, 0.0)));
                let mut col: Vec<(usize, C64)> = Vec::with_capacity(3);
                let mut add = |t: Option<(usize, C64)>, s: f64| {
                    if let Some((r, v)) = t {
                        match col.iter_mut().find(|x| x.0 == r) {
                            Some(x) => x.1 += v * s,
                            None => col.push((r, v * s)),
                        }
                    }
                };
                add(apply(&ann[i], apply(&cre[j], e)), 1.0);
                add(apply(&cre[j], apply(&ann[i], e)), -1.0);
                if i == j {
                    add(e, -1.0);
                }
                sq += col.iter().map(|x| x.1.norm_sqr()).sum::<f64>();
            }
            worst = worst.max(sq.sqrt());
        }
    }
    Ok(worst)
}

/// Frobenius norm of a commutator between a sparse diagonal and a dense matrix.
pub fn commutator_norm(a: &ModeOperator, b: MatRef<'_, C64>) -> f64 {
    let ad = a.to_dense();
    linalg::frobenius(linalg::commutator(ad.as_ref(), b).as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{build_mode_grid, AngularGroup};

    fn dense_ccr_defect(basis: &FockBasis) -> f64 {
        let p = basis.interior_projector();
        let id = linalg::identity(basis.dim());
        let mut worst: f64 = 0.0;
        for i in 0..basis.n_modes {
            for j in 0..basis.n_modes {
                let a = basis.annihilation(i).unwrap().to_dense();
                let b = basis.creation(j).unwrap().to_dense();
                let mut c = linalg::commutator(a.as_ref(), b.as_ref());
                if i == j {
                    c = linalg::sub(c.as_ref(), id.as_ref());
                }
                worst = worst.max(linalg::frobenius((c.as_ref() * p.as_ref()).as_ref()));
            }
        }
        worst
    }

    #[test]
    fn ccr_defect_matches_dense_products() {
        for (m, n) in [(1, 1), (3, 2), (4, 3)] {
            let b = FockBasis::new(m, n).unwrap();
            let fast = ccr_defect(&b).unwrap();
            assert!(fast < 1e-14 && dense_ccr_defect(&b) < 1e-14, "{fast}");
        }
        // without the projector the top sector violates the relation
        let b = FockBasis::new(2, 1).unwrap();
        let a = b.annihilation(0).unwrap().to_dense();
        let c = b.creation(0).unwrap().to_dense();
        let comm = linalg::commutator(a.as_ref(), c.as_ref());
        let top = b.one_photon(0).unwrap();
        assert!((comm[(top, top)].re - 1.0).abs() > 0.5);
    }

    #[test]
    fn dimensions_follow_stars_and_bars() {
        assert_eq!(FockBasis::new(4, 0).unwrap().dim(), 1);
        assert_eq!(FockBasis::new(4, 1).unwrap().dim(), 5);
        assert_eq!(FockBasis::new(4, 2).unwrap().dim(), 15);
        assert_eq!(fock_dimension(24, 2), Some(325));
    }

    #[test]
    fn vacuum_first_and_index_bijective() {
        let b = FockBasis::new(3, 2).unwrap();
        assert_eq!(b.states[0], vec![0, 0, 0]);
        for (i, s) in b.states.iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
    }

    #[test]
    fn overflow_rejected() {
        assert!(matches!(
            FockBasis::with_cap(100, 3, 1000),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn ladder_rule_on_doubly_occupied_mode() {
        let b = FockBasis::new(3, 2).unwrap();
        let a = b.annihilation(1).unwrap().to_dense();
        let col = b.index_of(&[0, 2, 0]).unwrap();
        let row = b.index_of(&[0, 1, 0]).unwrap();
        assert!((a[(row, col)].re - 2f64.sqrt()).abs() < 1e-15);
        for r in 0..b.dim() {
            assert_eq!(a[(r, 0)], C64::new(0.0, 0.0));
        }
        assert!(b.annihilation(3).is_err());
    }

    #[test]
    fn field_energy_is_additive() {
        let b = FockBasis::new(2, 2).unwrap();
        let h = b.diagonal_energy(&[0.7, 1.1]).to_dense();
        assert_eq!(h[(0, 0)].re, 0.0);
        let one = b.index_of(&[1, 0]).unwrap();
        let both = b.index_of(&[1, 1]).unwrap();
        assert!((h[(one, one)].re - 0.7).abs() < 1e-15);
        assert!((h[(both, both)].re - 1.8).abs() < 1e-15);
    }

    #[test]
    fn field_energy_grid_mismatch() {
        let g = build_mode_grid(1, 1.0, AngularGroup::InversionOnly, 1.0).unwrap();
        let b = FockBasis::new(3, 1).unwrap();
        assert!(b.field_energy(&g).is_err());
    }

    #[test]
    fn permanent_of_all_ones() {
        // perm(J_n) = n!
        let a = vec![C64::new(1.0, 0.0); 16];
        assert!((permanent(&a, 4).re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn second_quantized_identity() {
        let b = FockBasis::new(3, 2).unwrap();
        let g = b.second_quantize(&AntiOp::linear(linalg::identity(3))).unwrap().to_dense();
        assert!(linalg::frobenius(linalg::sub(g.as_ref(), linalg::identity(b.dim()).as_ref()).as_ref()) < 1e-14);
    }

    #[test]
    fn second_quantize_rejects_non_unitary() {
        let b = FockBasis::new(2, 1).unwrap();
        let m = linalg::scale(linalg::identity(2).as_ref(), C64::new(2.0, 0.0));
        assert!(matches!(b.second_quantize(&AntiOp::linear(m)), Err(Error::NotUnitary(_))));
    }
}
