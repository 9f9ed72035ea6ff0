//! Norm-induced quantum coherence measures.
//!
//! The crate computes `C_ν(ρ) = min { ν(ρ − σ) : σ incoherent }` for `ℓ_{q,p}`,
//! Schatten and gauge-defined unitary-similarity-invariant norms, represents
//! incoherent Kraus channels, and checks the coherence-measure axioms on
//! concrete states and channels. The [`oracles`] module holds independent
//! brute-force checks of the supporting norm inequalities.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod catalog;
pub mod channels;
pub mod eigen;
pub mod error;
pub mod io;
pub mod matrix;
pub mod measures;
pub mod norms;
pub mod oracles;
pub mod random;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::{
    diag_part, direct_sum, make_all_ones, validate_density, ComplexMatrix, DensityState, DiagonalState,
    EigenResult, HermitianMatrix, C64,
};
pub use measures::{CoherenceMeasure, MeasureMethod, MeasureSpec, MinimizationResult};
pub use norms::{NormSpec, PExponent};
pub use solver::SolverConfig;
