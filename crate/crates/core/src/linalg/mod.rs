//! Dense complex linear algebra: matrices, density matrices, Hermitian
//! spectra and entropies.
//!
//! The Hermitian eigensolver is nalgebra's; this module adds deterministic
//! ordering and basis conventions on top of it.

mod density;
mod local;
mod matrix;
mod spectrum;

pub use density::{
    partial_trace, von_neumann_entropy, DensityMatrix, Subsystem, COIN_DIM, POSITIVITY_TOLERANCE,
    TRACE_TOLERANCE,
};
pub use matrix::{tensor, ComplexMatrix};
pub(crate) use local::CoinMap;
pub use spectrum::{
    eig_hermitian, eigvals_hermitian, shannon_entropy_bits, Spectrum, DEGENERACY_TOLERANCE,
    ENTROPY_CUTOFF, HERMITIAN_TOLERANCE,
};

pub use num_complex::Complex64;
