use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Inputs to the Hermitian eigensolver may deviate from exact Hermiticity by
/// at most this much (entrywise).
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Eigenvalues at or below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// Eigen-decomposition of a Hermitian matrix with a reproducible basis.
///
/// Eigenvalues are sorted descending. Inside a degenerate cluster the basis
/// is rebuilt from the standard basis vectors (pivoted Gram-Schmidt on their
/// projections onto the cluster), so e.g. `I/2` always yields the
/// computational basis. Every eigenvector has its largest-magnitude entry
/// real and positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }

    /// Smallest gap between consecutive eigenvalues above `floor`.
    ///
    /// Returns `f64::INFINITY` when fewer than two eigenvalues exceed the floor.
    pub fn min_gap_above(&self, floor: f64) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&l| l > floor)
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITIAN_TOLERANCE,
        });
    }
    Ok(())
}

/// Eigenvalues only, sorted descending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = m
        .hermitian_part()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(m)?;
    let n = m.rows();
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end - 1] - eigenvalues[end] <= DEGENERACY_TOLERANCE {
            end += 1;
        }
        if end - start > 1 {
            let canonical = canonical_cluster_basis(&columns[start..end]);
            columns.splice(start..end, canonical);
        }
        start = end;
    }

    for col in &mut columns {
        fix_phase(col);
    }

    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| columns[k][i]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Replaces an arbitrary orthonormal basis of a degenerate eigenspace with a
/// deterministic one: repeatedly take the standard basis vector with the
/// largest residual after projecting onto the remaining subspace (lowest
/// index on ties). This is column-pivoted Gram-Schmidt on `V V†`.
fn canonical_cluster_basis(cluster: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = cluster[0].len();
    let k = cluster.len();
    // residual[i] = P e_i, stored per basis index i
    let mut residual: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let mut r = vec![Complex64::new(0.0, 0.0); n];
            for v in cluster {
                let coeff = v[i].conj();
                for (ri, &vj) in r.iter_mut().zip(v) {
                    *ri += vj * coeff;
                }
            }
            r
        })
        .collect();
    let mut norms: Vec<f64> = residual.iter().map(|r| norm(r)).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(k);

    for _ in 0..k {
        let best = norms.iter().copied().fold(0.0, f64::max);
        let pivot = norms
            .iter()
            .position(|&x| x >= best - 1e-10)
            .expect("cluster residuals exhausted");
        let mut q = residual[pivot].clone();
        // one extra orthogonalization pass keeps the basis orthonormal to
        // machine precision even after many rank-one downdates
        for b in &basis {
            let overlap = inner(b, &q);
            for (qi, &bi) in q.iter_mut().zip(b) {
                *qi -= bi * overlap;
            }
        }
        let qn = norm(&q);
        for qi in &mut q {
            *qi /= qn;
        }
        for (i, r) in residual.iter_mut().enumerate() {
            // q lies in the remaining subspace, so ⟨q, r_i⟩ = conj(q_i)
            let coeff = q[i].conj();
            for (rj, &qj) in r.iter_mut().zip(&q) {
                *rj -= qj * coeff;
            }
            norms[i] = norm(r);
        }
        basis.push(q);
    }
    basis
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotates the global phase so the largest-magnitude entry (first on ties)
/// is real and positive.
fn fix_phase(v: &mut [Complex64]) {
    let best = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if best == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= best * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let rot = phase.conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = Complex64::new(v[pivot].norm(), 0.0);
}

/// `-Σ λ log₂ λ` over eigenvalues above [`ENTROPY_CUTOFF`].
pub fn shannon_entropy_bits(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum()
}
