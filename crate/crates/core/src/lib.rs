//! Core algorithms for conjunctive subgroup discovery driven by quantum-style
//! combinatorial optimization.
//!
//! The crate is organized around one data shape — a binarized feature matrix
//! with a binary target ([`BinaryDataset`]) — and the operations that turn it
//! into ranked subgroup rules:
//!
//! - [`binarize`]: standardize/threshold numeric columns into bits, rank
//!   features by information gain and select the qubit variables,
//! - [`subgroup`]: evaluate conjunction rules (WRAcc, coverage, contrast),
//! - [`search`]: exhaustive enumeration and beam search baselines,
//! - [`qubo`]: least-squares QUBO fit of the negated WRAcc landscape,
//!   cardinality penalty calibration, and the Ising conversion,
//! - [`qaoa`]: exact statevector simulation of depth-p QAOA for diagonal cost
//!   Hamiltonians with a derivative-free variational loop and shot sampling,
//! - [`evaluate`]: sample decoding, dual approximation ratios, statistical
//!   validation, and test-set generalization,
//! - [`hybrid`]: two-tier rule/classifier intrusion-detection evaluation.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all IO, file formats,
//! and orchestration live in the companion pipeline crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod binarize;
pub mod bitset;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod hybrid;
pub mod optim;
pub mod qaoa;
pub mod qubo;
pub mod search;
pub mod stats;
pub mod subgroup;

pub use bitset::RowSet;
pub use dataset::{AttackCategory, AttackFilter, BinaryDataset, EncodedDataset};
pub use error::{Error, Result};
pub use subgroup::{evaluate_subgroup, FeatureSubset, SubgroupMetrics};
