use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::spectrum::{eigvals_hermitian, shannon_entropy_bits, HERMITIAN_TOLERANCE};
use crate::error::{Error, Result};

/// Dimension of the coin register.
pub const COIN_DIM: usize = 2;

pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Which factor of a bipartite state to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// The first tensor factor (the coin for walk states).
    Coin,
    /// The second tensor factor (the position register for walk states).
    Position,
}

/// A unit-trace Hermitian matrix, optionally split into `first ⊗ second`.
///
/// Walk states carry the split `(2, positions)` with the coin first. Reduced
/// states produced by [`partial_trace`] carry no split.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    factors: Option<(usize, usize)>,
}

impl DensityMatrix {
    /// A coin ⊗ position state; the position dimension is `dim / 2`.
    pub fn coin_position(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !dim.is_multiple_of(COIN_DIM) {
            return Err(Error::MalformedState(format!(
                "dimension {dim} is not divisible by the coin dimension {COIN_DIM}"
            )));
        }
        Self::bipartite(matrix, COIN_DIM, dim / COIN_DIM)
    }

    pub fn bipartite(matrix: ComplexMatrix, first: usize, second: usize) -> Result<Self> {
        if first == 0 || second == 0 || first * second != matrix.rows() {
            return Err(Error::MalformedState(format!(
                "factorization {first}x{second} does not match dimension {}",
                matrix.rows()
            )));
        }
        let mut rho = Self::single(matrix)?;
        rho.factors = Some((first, second));
        Ok(rho)
    }

    /// A state with no tensor-product structure.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::MalformedState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermiticity_error();
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITIAN_TOLERANCE,
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::MalformedState(format!("trace is {trace}, expected 1")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            factors: None,
        })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector split as `first ⊗ second`.
    pub fn pure(amplitudes: &[Complex64], first: usize, second: usize) -> Result<Self> {
        Self::bipartite(ComplexMatrix::outer(amplitudes), first, second)
    }

    /// Re-symmetrizes and wraps a matrix whose trace and Hermiticity the
    /// caller already controls (channel and walk updates).
    pub(crate) fn from_evolved(matrix: ComplexMatrix, factors: Option<(usize, usize)>) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            factors,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn factors(&self) -> Option<(usize, usize)> {
        self.factors
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(ρ²)`, using Hermiticity: `Σ |ρ_ij|²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvals_hermitian(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or(0.0))
    }

    /// Checks positivity (the one invariant not verified at construction).
    pub fn check_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::MalformedState(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(())
    }

    /// `½ ‖ρ − σ‖₁`
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.matrix.sub(&other.matrix)?;
        let values = eigvals_hermitian(&diff)?;
        Ok(0.5 * values.iter().map(|l| l.abs()).sum::<f64>())
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy_bits(&rho.eigenvalues()?))
}

/// Traces out everything except `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let (da, db) = rho
        .factors
        .ok_or_else(|| Error::MalformedState("state has no tensor-product factorization".into()))?;
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::Coin => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::Position => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    };
    Ok(DensityMatrix::from_evolved(reduced, None))
}
