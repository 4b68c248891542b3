//! Sensing subjective well-being from social-media records.
//!
//! The pipeline extracts demographic (D), behavioral (B) and linguistic (L)
//! features from user records over a window around each survey, trains one
//! of four regressors per well-being dimension, and scores convergent
//! validity as the Pearson correlation between out-of-fold predictions and
//! questionnaire scores.
//!
//! - [`data_model`]: records, the `.jsonl` dataset format, synthetic corpora
//! - [`lexicon`]: `.dic` category dictionaries, segmentation, category counts
//! - [`features`]: feature registry, extraction, min-max normalization
//! - [`regressors`]: OLS, stepwise, LASSO, MARS and epsilon-SVR
//! - [`evaluation`]: Pearson, folds, cross-validation, sweeps, t-tests
//! - [`numerics`]: dense QR, special functions, seeded RNG

pub mod data_model;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod lexicon;
pub mod numerics;
pub mod regressors;

pub use error::{Error, Result};
