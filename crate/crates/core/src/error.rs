//! Crate-wide error type.

use alloc::string::String;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// Operation requires a non-empty dataset.
    #[error("dataset is empty")]
    EmptyDataset,
    /// The binary target is single-class, so the WRAcc baseline is undefined.
    #[error("degenerate labels: baseline rate {p0} is not strictly between 0 and 1")]
    DegenerateLabels {
        /// Observed baseline positive rate.
        p0: f64,
    },
    /// Column layout of an input does not match the fitted model.
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    /// Requested more features than are available for ranking.
    #[error("requested {requested} features but only {available} are rankable")]
    KFeatTooLarge {
        /// Requested feature count.
        requested: usize,
        /// Rankable feature count.
        available: usize,
    },
    /// Problem size exceeds the statevector simulator guard.
    #[error("{n} qubits exceeds the simulator cap of {max}")]
    TooManyQubits {
        /// Requested qubit count.
        n: usize,
        /// Configured cap.
        max: usize,
    },
    /// Exact QUBO fit requested above the enumeration limit.
    #[error("exact QUBO fit supports at most {max} variables (got {n}); use surrogate mode")]
    ExactFitTooLarge {
        /// Variable count.
        n: usize,
        /// Enumeration limit.
        max: usize,
    },
    /// Too few distinct fit samples for the regression unknowns.
    #[error("underdetermined regression: {samples} distinct samples for {unknowns} unknowns")]
    Underdetermined {
        /// Distinct sample count after deduplication.
        samples: usize,
        /// Regression unknowns.
        unknowns: usize,
    },
    /// A cardinality required by the caller was skipped or never enumerated.
    #[error("cardinality {k} was not enumerated by the exhaustive search")]
    CardinalityUnavailable {
        /// Requested cardinality.
        k: u32,
    },
    /// QUBO/Ising consistency check failed; indicates a conversion bug.
    #[error("QUBO/Ising energy mismatch at bitstring {mask:#b}: {qubo} vs {ising}")]
    IsingConsistency {
        /// Bitstring where the check failed.
        mask: u32,
        /// Energy under the QUBO form.
        qubo: f64,
        /// Energy under the Ising form.
        ising: f64,
    },
    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Subgroup is empty where a non-empty one is required.
    #[error("subgroup has no member records")]
    EmptySubgroup,
    /// Training data contains a single class.
    #[error("classifier training requires both classes present")]
    SingleClass,
    /// Attack filter removed every positive record.
    #[error("attack filter left zero attack records; WRAcc baseline undefined")]
    NoAttacksAfterFilter,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
