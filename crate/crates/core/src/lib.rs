//! Simulation of decoherent discrete-time quantum walks.
//!
//! A walker with a two-level coin moves on a truncated line or an odd
//! n-cycle. The joint coin ⊗ position state is evolved as a density matrix,
//! optionally with a noise channel acting on the coin every step. On top of
//! the evolution sit the usual diagnostics: position statistics, the
//! phase-gate symmetry test (Kolmogorov distance) and quantumness via
//! measurement-induced disturbance.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod noise;
pub mod quantumness;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Spectrum, Subsystem};
pub use noise::{ChannelSpec, CoinChannel, SgadParams};
pub use walk::{CoinParams, Geometry, InitialState, NoisePlacement, WalkSetup, WalkState};
