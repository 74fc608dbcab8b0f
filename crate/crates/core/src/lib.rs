//! Exact lattice and graph machinery for rational curves on quasi-polarized
//! K3 surfaces: colored intersection graphs and their elliptic / parabolic /
//! hyperbolic trichotomy, intrinsic polarizations and degree bounds, a
//! certified bound enumerator, explicit Néron–Severi models built from
//! elliptic fibrations, Mordell–Weil height arithmetic, and the
//! number-theoretic gates used by the witness constructions.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! every reported certificate is deterministic.

pub mod arith;
pub mod dynkin;
pub mod enumerate;
pub mod exact;
pub mod fano;
pub mod mwl;
pub mod nsmodel;
pub mod polarize;

pub use exact::{BigRat, DiscriminantGroup, Signature, SymmetricForm};
pub use fano::{ColoredGraph, GraphClass};

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("form is degenerate")]
    DegenerateForm,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph is not elliptic")]
    NotElliptic,
    #[error("graph is not parabolic")]
    NotParabolic,
    #[error("graph is not hyperbolic")]
    NotHyperbolic,
    #[error("component is not an ADE diagram")]
    ComponentNotAde,
    #[error("reflection root must have square -2, got {0}")]
    RootSquareNotMinusTwo(i64),
    #[error("integer overflow in intersection arithmetic")]
    Overflow,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Stable 64-bit FNV-1a hash, used for content hashes in certificates.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
