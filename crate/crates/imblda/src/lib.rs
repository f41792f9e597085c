//! Linear discriminant rules for high-dimensional imbalanced binary
//! classification.
//!
//! The library provides:
//!
//! - hard-thresholding discriminants and their split-and-average,
//!   bias-corrected variants for diagonal and general covariances
//!   ([`classifiers`]);
//! - plug-in LDA, an under-sampled baseline, and sparse LDA with
//!   entrywise-thresholded estimates;
//! - exact conditional error rates alongside empirical ones ([`eval`]);
//! - seeded Gaussian benchmark generators ([`datagen`]);
//! - leave-one-out threshold tuning minimizing the minority-class error
//!   ([`tuning`]);
//! - a reproducible experiment harness with CSV/JSON interfaces
//!   ([`harness`]).
//!
//! Labels are `1` (majority) and `2` (minority); every rule classifies to
//! class 1 exactly when its affine score is negative.

pub mod classifiers;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod harness;
pub mod linalg;
pub mod seed;
pub mod tuning;

pub use error::{Error, Result};
