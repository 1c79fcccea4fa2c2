//! Small dense/sparse complex linear-algebra helpers shared by the physics modules.

use std::io::Write;
use std::path::Path;

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn dagger(m: MatRef<'_, C64>) -> CMat {
    m.adjoint().to_owned()
}

pub fn conj(m: MatRef<'_, C64>) -> CMat {
    m.conjugate().to_owned()
}

pub fn scale(m: MatRef<'_, C64>, s: C64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn add(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)])
}

pub fn sub(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)])
}

pub fn matmul(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    a * b
}

/// `a b - b a`
pub fn commutator(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    sub((a * b).as_ref(), (b * a).as_ref())
}

pub fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn frobenius(m: MatRef<'_, C64>) -> f64 {
    m.norm_l2()
}

pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    m.norm_max()
}

/// Frobenius distance `‖m† m − 1‖`.
pub fn unitarity_defect(m: MatRef<'_, C64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let p = m.adjoint() * m;
    frobenius(sub(p.as_ref(), identity(m.nrows()).as_ref()).as_ref())
}

pub fn hermiticity_defect(m: MatRef<'_, C64>) -> f64 {
    frobenius(sub(m, m.adjoint().to_owned().as_ref()).as_ref())
}

pub fn is_finite(m: MatRef<'_, C64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

pub fn det2(m: MatRef<'_, C64>) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Diagonal matrix from real entries.
pub fn diag_real(d: &[f64]) -> CMat {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMat {
    Mat::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [CMat; 3] {
    let s1 = Mat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
    let s2 = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    });
    let s3 = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    });
    [s1, s2, s3]
}

/// Matrix exponential for small matrices by scaling and squaring of a Taylor series.
pub fn expm(a: MatRef<'_, C64>) -> CMat {
    let n = a.nrows();
    let norm = frobenius(a);
    let mut squarings = 0u32;
    let mut s = 1.0;
    while norm * s > 0.5 {
        s *= 0.5;
        squarings += 1;
    }
    let a_s = scale(a, C64::new(s, 0.0));
    let mut term = identity(n);
    let mut result = identity(n);
    for k in 1..=20 {
        term = scale((term.as_ref() * a_s.as_ref()).as_ref(), C64::new(1.0 / k as f64, 0.0));
        result = add(result.as_ref(), term.as_ref());
    }
    for _ in 0..squarings {
        result = result.as_ref() * result.as_ref();
    }
    result
}

pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let a = random_complex(n, n, rng);
    let h = add(a.as_ref(), a.adjoint().to_owned().as_ref());
    scale(h.as_ref(), C64::new(0.5, 0.0))
}

/// Haar-random unitary from the QR factorization of a complex Gaussian matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let z = random_complex(n, n, rng);
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Mat::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        q[(i, j)] * phase
    })
}

/// Orthonormal basis for the column span of `m` (thin QR, assumes full column rank).
pub fn orthonormalize(m: MatRef<'_, C64>) -> CMat {
    let qr = m.qr();
    let q = qr.compute_thin_Q();
    q
}

pub fn singular_values(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| Error::Convergence(format!("svd: {e:?}")))
}

/// Operator acting either linearly or antilinearly: `x ↦ M x` or `x ↦ M x̄`.
#[derive(Clone, Debug)]
pub struct AntiOp {
    pub matrix: CMat,
    pub antilinear: bool,
}

impl AntiOp {
    pub fn linear(matrix: CMat) -> Self {
        Self { matrix, antilinear: false }
    }

    pub fn antilinear(matrix: CMat) -> Self {
        Self { matrix, antilinear: true }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: MatRef<'_, C64>) -> CMat {
        if self.antilinear {
            self.matrix.as_ref() * x.conjugate()
        } else {
            self.matrix.as_ref() * x
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &AntiOp) -> AntiOp {
        let rhs = if self.antilinear { conj(other.matrix.as_ref()) } else { other.matrix.clone() };
        AntiOp {
            matrix: self.matrix.as_ref() * rhs.as_ref(),
            antilinear: self.antilinear ^ other.antilinear,
        }
    }

    /// Adjoint in the sense `⟨x, T y⟩ = conj⟨T* x, y⟩` for antilinear `T`.
    pub fn adjoint(&self) -> AntiOp {
        if self.antilinear {
            // (M K)* = K M† = conj(M†) K = M^T K
            AntiOp::antilinear(self.matrix.transpose().to_owned())
        } else {
            AntiOp::linear(dagger(self.matrix.as_ref()))
        }
    }

    pub fn square(&self) -> AntiOp {
        self.compose(self)
    }

    /// `S H S*` as a linear matrix.
    pub fn conjugate_operator(&self, h: MatRef<'_, C64>) -> CMat {
        let inner = if self.antilinear { conj(h) } else { h.to_owned() };
        let tmp = self.matrix.as_ref() * inner.as_ref();
        tmp.as_ref() * self.matrix.adjoint()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(self.matrix.as_ref())
    }

    /// `A ⊗ B` with a shared antilinear flag (both parts must agree).
    pub fn tensor(&self, other: &AntiOp) -> Result<AntiOp> {
        if self.antilinear != other.antilinear {
            return Err(Error::InvalidParameter(
                "tensor factors must share linearity".into(),
            ));
        }
        Ok(AntiOp {
            matrix: kron(self.matrix.as_ref(), other.matrix.as_ref()),
            antilinear: self.antilinear,
        })
    }
}

/// Coordinate-format sparse complex matrix. Duplicate entries are summed on
/// densification.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, r: usize, c: usize, v: C64) {
        if v != ZERO {
            self.entries.push((r, c, v));
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> SparseMatrix {
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        }
    }

    pub fn scaled(&self, s: C64) -> SparseMatrix {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
        }
    }

    /// Sorts and merges duplicate coordinates, dropping exact zeros.
    pub fn compress(&mut self) {
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out: Vec<(usize, usize, C64)> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| e.2 != ZERO);
        self.entries = out;
    }

    /// Appends `a ⊗ self` into `target` scaled by `s`, where `a` is a small dense block.
    pub fn kron_into(&self, a: MatRef<'_, C64>, s: C64, target: &mut SparseMatrix) {
        for ai in 0..a.nrows() {
            for aj in 0..a.ncols() {
                let av = a[(ai, aj)] * s;
                if av == ZERO {
                    continue;
                }
                for &(r, c, v) in &self.entries {
                    target.push(ai * self.nrows + r, aj * self.ncols + c, av * v);
                }
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(f, "{} {} {}", self.nrows, self.ncols, self.entries.len())?;
        for &(r, c, v) in &self.entries {
            writeln!(f, "{} {} {:.17e} {:.17e}", r + 1, c + 1, v.re, v.im)?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn from_dense(m: MatRef<'_, C64>) -> SparseMatrix {
        let mut s = SparseMatrix::new(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                s.push(i, j, m[(i, j)]);
            }
        }
        s
    }
}

/// Writes a dense matrix in Matrix Market coordinate format.
pub fn write_matrix_market(m: MatRef<'_, C64>, path: &Path) -> Result<()> {
    SparseMatrix::from_dense(m).write_matrix_market(path)
}

/// JSON form of a dense complex matrix: rows of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct JsonMatrix(pub Vec<Vec<[f64; 2]>>);

impl JsonMatrix {
    pub fn from_mat(m: MatRef<'_, C64>) -> Self {
        JsonMatrix(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    pub fn to_mat(&self) -> Result<CMat> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, |r| r.len());
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Model("ragged matrix rows".into()));
        }
        Ok(Mat::from_fn(rows, cols, |i, j| C64::new(self.0[i][j][0], self.0[i][j][1])))
    }
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
