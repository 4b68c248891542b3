//! Demographic, behavioral and linguistic feature extraction, the feature
//! matrix, and min-max normalization.

mod extract;
mod matrix;
mod normalize;
mod registry;

pub use extract::{
    extract_behavioral, extract_demographic, extract_linguistic, is_utc_weekend, utc_hour, window_category_counts,
    TextMarkers, WindowSpec, SECONDS_PER_DAY,
};
pub use matrix::{build_matrix, FeatureMatrix};
pub use normalize::{apply_normalization, fit_normalization, NormalizationParams};
pub use registry::{
    FeatureColumn, FeatureFamily, FeatureRegistry, FeatureSet, BEHAVIORAL_FEATURES, DEMOGRAPHIC_FEATURES,
    LINGUISTIC_PREFIX,
};
