//! Rating model built on relative PCA attribute ranking functions and
//! k-means clustering.
//!
//! The pipeline has four stages:
//!
//! 1. [`normalize`]: direction-aware min-max scaling of every indicator onto [0, 1].
//! 2. [`pca`] and [`attributes`]: principal components of the normalized
//!    set, l1-scaled; their absolute values form the ranking matrix `W`, and
//!    each object maps to its ranking-function values `b·W`.
//! 3. [`kmeans`]: k-means++ / Lloyd clustering in ranking-function space.
//! 4. [`rating`]: cluster centers are projected onto the rating vector `Λ`
//!    (retained variance fractions) and categories are bound best-first by
//!    descending projection.
//!
//! [`pipeline`] chains the stages and produces a [`pipeline::ModelSnapshot`]
//! that can rate new objects later.

pub mod attributes;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod eigen;
pub mod error;
pub mod io;
pub mod kmeans;
pub mod matrix;
pub mod normalize;
pub mod pca;
pub mod pipeline;
pub mod rating;
pub mod rng;

pub use attributes::{attribute_vector, map_to_feature_space, rank_value, RankedFeatureMatrix, RelativeAttribute};
pub use config::PipelineConfig;
pub use dataset::{load_dataset, read_dataset, Direction, IndicatorSpec, RawDataset};
pub use error::{RelarmError, Result};
pub use kmeans::{kmeans, ClusteringResult, KMeansParams};
pub use matrix::Matrix;
pub use normalize::{normalize_column, normalize_dataset, NormalizedMatrix};
pub use pca::{fit_pca, fit_pca_with, verify_fixture_w, PcaModel, PcaOptions};
pub use pipeline::{fit_pipeline, FittedPipeline, ModelSnapshot};
pub use rating::{assign_ratings, project_center, score_agreement, RatingResult, RatingScale};
