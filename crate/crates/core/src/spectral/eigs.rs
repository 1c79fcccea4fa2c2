use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Relative clustering tolerance for eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Cluster {
    pub indices: Vec<usize>,
    pub center: C64,
    pub spread: f64,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns, same order as `eigenvalues`.
    pub eigenvectors: CMat,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub matrix_norm: f64,
    pub warnings: Vec<String>,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(Cluster::multiplicity).collect()
    }
}

fn cmp_complex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Groups values whose pairwise distance is within `tol` times the spectral
/// radius (transitively linked), ordered by smallest real part.
pub fn cluster_values(values: &[C64], tol: f64) -> Vec<Cluster> {
    let n = values.len();
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
    let thresh = tol * radius;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= thresh {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|idx| {
            let center = idx.iter().map(|&i| values[i]).sum::<C64>() / idx.len() as f64;
            Cluster { spread: spread(idx.iter().map(|&i| values[i])), center, indices: idx }
        })
        .collect();
    clusters.sort_by(|a, b| cmp_complex(&a.center, &b.center));
    clusters
}

/// Largest pairwise distance in a set of complex values.
pub fn spread(values: impl Iterator<Item = C64> + Clone) -> f64 {
    let v: Vec<C64> = values.collect();
    let mut s: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s = s.max((v[i] - v[j]).norm());
        }
    }
    s
}

/// Full eigendecomposition of a general complex matrix.
pub fn eigs(h: MatRef<'_, C64>) -> Result<SpectrumResult> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch("eigs needs a square matrix".into()));
    }
    if !linalg::is_finite(h) {
        return Err(Error::NonFinite);
    }
    let n = h.nrows();
    let evd = h.eigen().map_err(|e| Error::Convergence(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<C64> = (0..n).map(|i| s[i]).collect();
    order.sort_by(|&a, &b| cmp_complex(&vals[a], &vals[b]));

    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let mut eigenvectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    for c in 0..n {
        let norm = (0..n).map(|r| eigenvectors[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for r in 0..n {
                eigenvectors[(r, c)] /= norm;
            }
        }
    }
    let hv = h * eigenvectors.as_ref();
    let residuals = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| (hv[(r, c)] - eigenvalues[c] * eigenvectors[(r, c)]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let matrix_norm = linalg::frobenius(h);
    let mut warnings = Vec::new();
    if n > 0 {
        let sv = linalg::singular_values(eigenvectors.as_ref())?;
        let smin = sv.last().copied().unwrap_or(0.0);
        if smin < 1e-8 {
            warnings.push(format!(
                "eigenvector matrix ill-conditioned (smallest singular value {smin:.2e}); matrix may be defective"
            ));
        }
    }
    let clusters = cluster_values(&eigenvalues, CLUSTER_TOL);
    Ok(SpectrumResult { eigenvalues, eigenvectors, residuals, clusters, matrix_norm, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum_exact() {
        let h = linalg::diag_real(&[3.0, 1.0, 2.0]);
        let r = eigs(h.as_ref()).unwrap();
        let re: Vec<f64> = r.eigenvalues.iter().map(|e| e.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0]);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn jordan_block_warns() {
        let h = linalg::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = eigs(h.as_ref()).unwrap();
        assert!(r.eigenvalues.iter().all(|e| e.norm() < 1e-12));
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn non_finite_rejected() {
        let h = linalg::from_real(1, 1, &[f64::NAN]);
        assert!(matches!(eigs(h.as_ref()), Err(Error::NonFinite)));
    }
}
