//! Pearson γ, fold plans, leakage-safe cross-validation, the sweep grid and
//! the feature-analysis statistics.

mod analysis;
mod cv;
mod folds;
mod stats;
mod sweep;

pub use analysis::{
    age_correlations, analyze, feature_correlations, group_ttest, AnalysisReport, CorrelationTable, Grouping,
};
pub use cv::{cross_validate, cross_validate_matrix, fit_fold, EvalResult, FoldFit};
pub use folds::{make_folds, FoldPlan};
pub use stats::{pearson, student_t_test, TTest};
pub use sweep::{
    best_per_dimension, format_gamma, run_sweep, run_sweep_on_matrix, BestResult, SweepConfig, SweepReport,
    REPORT_SCHEMA_VERSION,
};
