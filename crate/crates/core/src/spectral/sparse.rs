//! Shift-invert subspace iteration for operators above the dense limit.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eigs::{cluster_values, eigs, SpectrumResult, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, SparseMatrix};

#[derive(Clone, Debug)]
pub struct ShiftInvertOptions {
    pub nev: usize,
    /// Extra subspace columns beyond `nev`.
    pub guard: usize,
    pub max_iter: usize,
    /// Residual tolerance relative to `‖H‖_F`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for ShiftInvertOptions {
    fn default() -> Self {
        Self { nev: 6, guard: 8, max_iter: 200, tol: 1e-10, seed: 0 }
    }
}

fn to_faer(h: &SparseMatrix, sigma: C64) -> Result<SparseColMat<usize, C64>> {
    let mut trip: Vec<Triplet<usize, usize, C64>> =
        h.entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    // the shift goes on every diagonal entry, including structurally zero ones
    trip.extend((0..h.nrows).map(|i| Triplet::new(i, i, -sigma)));
    SparseColMat::try_new_from_triplets(h.nrows, h.ncols, &trip)
        .map_err(|e| Error::DimensionMismatch(format!("sparse assembly: {e:?}")))
}

fn sparse_mul(h: &SparseMatrix, v: &CMat) -> CMat {
    let mut out = linalg::zeros(h.nrows, v.ncols());
    for &(r, c, x) in &h.entries {
        for k in 0..v.ncols() {
            out[(r, k)] += x * v[(c, k)];
        }
    }
    out
}

/// Eigenpairs of `h` nearest to `sigma`. `start` seeds the leading columns.
pub fn shift_invert(
    h: &SparseMatrix,
    sigma: C64,
    start: Option<&CMat>,
    opts: &ShiftInvertOptions,
) -> Result<SpectrumResult> {
    let n = h.nrows;
    if n != h.ncols {
        return Err(Error::DimensionMismatch("shift-invert needs a square operator".into()));
    }
    if h.entries.iter().any(|e| !e.2.is_finite()) {
        return Err(Error::NonFinite);
    }
    let m = (opts.nev + opts.guard).min(n);
    let nev = opts.nev.min(m);
    let a = to_faer(h, sigma)?;
    let lu = a.sp_lu().map_err(|e| Error::Convergence(format!("sparse LU: {e:?}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = linalg::random_complex(n, m, &mut rng);
    if let Some(s) = start {
        for c in 0..s.ncols().min(m) {
            for r in 0..n {
                v[(r, c)] = s[(r, c)];
            }
        }
    }
    let mut v = linalg::orthonormalize(v.as_ref());
    let hnorm = h.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt();

    for _ in 0..opts.max_iter {
        let w = lu.solve(v.as_ref());
        v = linalg::orthonormalize(w.as_ref());
        let hv = sparse_mul(h, &v);
        let t = v.adjoint() * hv.as_ref();
        let small = eigs(t.as_ref())?;
        let mut order: Vec<usize> = (0..small.eigenvalues.len()).collect();
        order.sort_by(|&x, &y| {
            (small.eigenvalues[x] - sigma).norm().total_cmp(&(small.eigenvalues[y] - sigma).norm())
        });
        order.truncate(nev);
        let y = Mat::from_fn(m, nev, |r, c| small.eigenvectors[(r, order[c])]);
        let mut x = v.as_ref() * y.as_ref();
        for c in 0..nev {
            let nrm = (0..n).map(|r| x[(r, c)].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..n {
                x[(r, c)] /= nrm;
            }
        }
        let hx = sparse_mul(h, &x);
        let vals: Vec<C64> = order.iter().map(|&i| small.eigenvalues[i]).collect();
        let residuals: Vec<f64> = (0..nev)
            .map(|c| (0..n).map(|r| (hx[(r, c)] - vals[c] * x[(r, c)]).norm_sqr()).sum::<f64>().sqrt())
            .collect();
        if residuals.iter().all(|&r| r <= opts.tol * hnorm.max(1.0)) {
            let clusters = cluster_values(&vals, CLUSTER_TOL);
            return Ok(SpectrumResult {
                eigenvalues: vals,
                eigenvectors: x,
                residuals,
                clusters,
                matrix_norm: hnorm,
                warnings: Vec::new(),
            });
        }
    }
    Err(Error::Convergence(format!("shift-invert at {sigma} did not converge in {} sweeps", opts.max_iter)))
}
