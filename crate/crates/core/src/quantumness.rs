//! Coin-position correlations: mutual information, the measurement `Π`
//! induced by the spectral resolutions of both marginals, and the
//! measurement-induced disturbance `Q(ρ) = I(ρ) − I(Π(ρ))`.
//!
//! `Π` is unique only when both marginals have simple spectra. Degenerate
//! marginals fall back to the canonical eigenbasis of
//! [`eig_hermitian`](crate::linalg::eig_hermitian) and are flagged in the
//! report; such values are relative to that convention. Kernel degeneracy
//! (many zero eigenvalues, as on a mostly empty lattice) does not affect `Π`
//! and is not flagged.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, eigvals_hermitian, partial_trace, shannon_entropy_bits, tensor, ComplexMatrix,
    DensityMatrix, Spectrum, Subsystem, DEGENERACY_TOLERANCE,
};

/// Marginal eigenvalues at or below this are treated as the kernel when
/// looking for degeneracies.
pub const SUPPORT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QmidReport {
    /// `I(ρ)` in bits.
    pub i_total: f64,
    /// `I(Π(ρ))` in bits.
    pub i_classical: f64,
    /// `I(ρ) − I(Π(ρ))` in bits.
    pub q: f64,
    pub degenerate_marginals: bool,
    /// Smallest gap between distinct nonzero eigenvalues of either marginal.
    pub degeneracy_gap: f64,
    /// `½‖ρ − Π(ρ)‖₁`, only filled by [`qmid_with_distance`].
    pub disturbance_distance: Option<f64>,
}

fn bipartition(rho: &DensityMatrix) -> Result<(usize, usize)> {
    rho.factors()
        .ok_or_else(|| Error::MalformedState("quantumness needs a bipartite state".into()))
}

pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let sa = shannon_entropy_bits(&partial_trace(rho, Subsystem::Coin)?.eigenvalues()?);
    let sb = shannon_entropy_bits(&partial_trace(rho, Subsystem::Position)?.eigenvalues()?);
    let s = shannon_entropy_bits(&rho.eigenvalues()?);
    Ok(sa + sb - s)
}

struct Marginals {
    coin: Spectrum,
    position: Spectrum,
}

impl Marginals {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            coin: eig_hermitian(partial_trace(rho, Subsystem::Coin)?.matrix())?,
            position: eig_hermitian(partial_trace(rho, Subsystem::Position)?.matrix())?,
        })
    }

    fn gap(&self) -> f64 {
        self.coin
            .min_gap_above(SUPPORT_FLOOR)
            .min(self.position.min_gap_above(SUPPORT_FLOOR))
    }

    /// Diagonal of `(V_A ⊗ V_B)† ρ (V_A ⊗ V_B)`: the spectrum of `Π(ρ)`.
    #[allow(clippy::needless_range_loop)]
    fn classical_distribution(&self, rho: &DensityMatrix) -> Vec<f64> {
        let (da, db) = rho.factors().expect("checked by caller");
        let m = rho.matrix();
        let dim = da * db;
        let va = &self.coin.eigenvectors;
        let vb = &self.position.eigenvectors;

        // w[a][b][k] = (V_B† ρ_ab V_B)[k,k]
        let mut w = vec![vec![vec![Complex64::new(0.0, 0.0); db]; da]; da];
        let mut block_times_v = vec![Complex64::new(0.0, 0.0); db * db];
        for a in 0..da {
            for b in 0..da {
                block_times_v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for x in 0..db {
                    let row = &m.as_slice()[(a * db + x) * dim + b * db..(a * db + x) * dim + (b + 1) * db];
                    let out = &mut block_times_v[x * db..(x + 1) * db];
                    for (y, &rxy) in row.iter().enumerate() {
                        if rxy == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let vrow = &vb.as_slice()[y * db..(y + 1) * db];
                        for (o, &v) in out.iter_mut().zip(vrow) {
                            *o += rxy * v;
                        }
                    }
                }
                for k in 0..db {
                    w[a][b][k] = (0..db)
                        .map(|x| vb[(x, k)].conj() * block_times_v[x * db + k])
                        .sum();
                }
            }
        }

        let mut probs = Vec::with_capacity(dim);
        for j in 0..da {
            for k in 0..db {
                let mut z = Complex64::new(0.0, 0.0);
                for a in 0..da {
                    for b in 0..da {
                        z += va[(a, j)].conj() * va[(b, j)] * w[a][b][k];
                    }
                }
                probs.push(z.re.max(0.0));
            }
        }
        probs
    }
}

/// `Π(ρ) = Σ_{j,k} (Π_A^j ⊗ Π_B^k) ρ (Π_A^j ⊗ Π_B^k)`
pub fn pi_projection(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (da, db) = bipartition(rho)?;
    let marginals = Marginals::of(rho)?;
    let probs = marginals.classical_distribution(rho);
    let v = tensor(&marginals.coin.eigenvectors, &marginals.position.eigenvectors);
    let n = da * db;
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * probs[j]);
    let mut out = scaled.matmul(&v.adjoint())?;
    // restore unit trace lost to clamping of round-off negatives
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        out = out.scale(Complex64::new(1.0 / total, 0.0));
    }
    DensityMatrix::bipartite(out.hermitian_part(), da, db)
}

pub fn qmid(rho: &DensityMatrix) -> Result<QmidReport> {
    bipartition(rho)?;
    let marginals = Marginals::of(rho)?;
    let sa = shannon_entropy_bits(&marginals.coin.eigenvalues);
    let sb = shannon_entropy_bits(&marginals.position.eigenvalues);
    let s = shannon_entropy_bits(&eigvals_hermitian(rho.matrix())?);
    let s_classical = shannon_entropy_bits(&marginals.classical_distribution(rho));
    // Π preserves both marginals, so I(Π(ρ)) shares S(ρ_A) + S(ρ_B) with I(ρ)
    let i_total = sa + sb - s;
    let i_classical = sa + sb - s_classical;
    let gap = marginals.gap();
    Ok(QmidReport {
        i_total,
        i_classical,
        q: i_total - i_classical,
        degenerate_marginals: gap < DEGENERACY_TOLERANCE,
        degeneracy_gap: gap,
        disturbance_distance: None,
    })
}

/// [`qmid`] plus the trace distance between `ρ` and `Π(ρ)`.
pub fn qmid_with_distance(rho: &DensityMatrix) -> Result<QmidReport> {
    let mut report = qmid(rho)?;
    report.disturbance_distance = Some(rho.trace_distance(&pi_projection(rho)?)?);
    Ok(report)
}
