//! Sub-Gaussian norms and error bounds for likelihood-based hypothesis
//! tests.
//!
//! The library computes the sub-Gaussian norm σ_Φ0(α) of the binary test
//! indicator ([`subgauss`]), evaluates the Pinsker, sub-Gaussian, M-ary
//! and Fano error bounds built on it ([`bounds`]), and validates every
//! bound against exact enumeration and seeded Monte Carlo simulation of
//! the underlying likelihood-ratio tests ([`testing`]) over the hypothesis
//! laws in [`distributions`].
//!
//! Everything is a pure function over immutable values; sampling takes
//! explicit seeds and Monte Carlo tallies are partition-invariant, so any
//! operation may run from any number of threads.

pub mod bounds;
pub mod distributions;
mod error;
pub mod subgauss;
pub mod testing;

pub use bounds::{
    dominance_map, gap_bound, mary_bounds, pinsker_binary, subgauss_binary,
    subgauss_binary_symmetric, BinaryBoundReport, DominanceRow, MaryBoundReport, Winner,
};
pub use distributions::{kl, Distribution, Sample};
pub use error::{Error, Result};
pub use subgauss::{norm_table, solve_norm, SubGaussFit};
pub use testing::{
    classify_mary, confusion_matrix, exact_binary, lrt_statistic, phi, simulate_binary,
    verify_binary, verify_mary, BinaryCheck, BinaryTestConfig, Classification, ConfusionMatrix,
    ConfusionMode, ConfusionResult, EmpiricalCounts, ErrorRates, EstimateMode, MaryCheck,
};
