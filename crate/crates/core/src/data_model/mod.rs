//! Corpus schema, the line-delimited dataset format, and the synthetic
//! corpus generator.

mod dataset;
mod generator;
mod types;

pub use dataset::{load_dataset, write_dataset, Dataset};
pub use generator::{
    generate_corpus, generate_corpus_with_lexicon, GeneratorConfig, Marginals, PlantedModel, PostsPerUser, SURVEY_EPOCH,
};
pub use types::{
    DatasetMetadata, Dimension, Gender, GenderCounts, LabelRange, LivingPlace, LivingPlaceCounts, PerDimension, Post,
    Profile, SwbLabels, UserRecord,
};
