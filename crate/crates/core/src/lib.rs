//! # renyicap
//!
//! Sandwiched Rényi relative entropy and the channel quantities built on it:
//! the α-information radius, the α-Holevo information, the Holevo capacity,
//! and strong-converse bounds on the success probability of classical
//! communication over entanglement-breaking and Hadamard channels.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`linalg`] | Hermitian eigendecomposition, pseudo-powers on supports, Schatten norms, tensor products, partial traces |
//! | [`channels`] | States, ensembles, POVMs, Kraus channels, Stinespring dilations, complements, EB certification, sampling |
//! | [`divergences`] | D̃_α, D_α, D, classical Rényi, sandwiched α-norms, maximum output norms and minimum output entropies |
//! | [`capacity`] | K̃_α, K̃_α^\[σ\], χ̃_α, χ_D, χ, c(N), subadditivity gaps |
//! | [`converse`] | Success-probability bounds, α selection, PGM decoding, exact codebook simulation |
//! | [`io`] | JSON formats for matrices, channels, ensembles and code specs |
//! | [`verify`] | Seeded property corpora with JSON reports |
//!
//! All logarithms are base two; every divergence is reported in bits.
//!
//! ## Quick start
//!
//! ```
//! use renyicap::channels::DensityMatrix;
//! use renyicap::divergences::sandwiched_d;
//!
//! let rho = DensityMatrix::basis(2, 0).unwrap();
//! let sigma = DensityMatrix::maximally_mixed(2);
//! let d = sandwiched_d(rho.op(), sigma.op(), 1.5).unwrap();
//! assert!((d.value - 1.0).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod capacity;
pub mod channels;
pub mod converse;
pub mod divergences;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod verify;

pub use num_complex::Complex64;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("Hermitian eigensolver did not converge (dimension {0})")]
    EigenNonConvergence(usize),

    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("outside the strong-converse regime: {0}")]
    Regime(String),

    #[error("unbounded constant: {0}")]
    Unbounded(String),

    #[error("bound chain step failed: {0}")]
    ChainViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
