//! End-to-end fit: normalize → PCA → feature map → k-means → ratings, and
//! the model snapshot that re-scores new objects without refitting.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attributes::{explain_object, map_rows, map_to_feature_space, RankedFeatureMatrix, RelativeAttribute};
use crate::config::PipelineConfig;
use crate::dataset::{IndicatorSpec, RawDataset};
use crate::error::{RelarmError, Result};
use crate::io::{read_file, to_json_pretty, write_file};
use crate::kmeans::{kmeans, nearest_center, ClusteringResult};
use crate::matrix::Matrix;
use crate::normalize::{apply_scalers, normalize_dataset, ColumnScaler, NormalizedMatrix};
use crate::pca::{fit_pca_with, PcaModel, PcaOptions};
use crate::rating::{assign_ratings, AgreementReport, ClusterRating, ObjectRating, RatingResult, RatingScale};

#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    pub config: PipelineConfig,
    pub normalized: NormalizedMatrix,
    pub pca: PcaModel,
    pub features: RankedFeatureMatrix,
    pub clustering: ClusteringResult,
    pub ratings: RatingResult,
}

pub fn fit_pipeline(raw: &RawDataset, config: &PipelineConfig) -> Result<FittedPipeline> {
    config.validate()?;
    let normalized = normalize_dataset(raw)?;
    let pca = fit_pca_with(
        &normalized.values,
        &PcaOptions {
            variance_threshold: config.variance_threshold,
            center: config.center,
        },
    )?;
    FittedPipeline::from_pca(normalized, pca, config)
}

impl FittedPipeline {
    /// Runs every stage after PCA with a given model.
    pub fn from_pca(normalized: NormalizedMatrix, pca: PcaModel, config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let scale = RatingScale::new(config.labels.clone())?;
        let features = map_to_feature_space(&normalized, &pca)?;
        let clustering = kmeans(&features.values, &config.kmeans_params()?)?;
        let ratings = assign_ratings(&features.objects, &clustering, &pca.lambda, &scale)?;
        Ok(Self {
            config: config.clone(),
            normalized,
            pca,
            features,
            clustering,
            ratings,
        })
    }

    pub fn scale(&self) -> RatingScale {
        RatingScale::new(self.config.labels.clone()).expect("validated at fit time")
    }

    pub fn snapshot(&self) -> ModelSnapshot {
        let mut config = self.config.clone();
        config.out_dir = None;
        config.dump_intermediates = false;
        ModelSnapshot {
            format: SNAPSHOT_FORMAT.to_owned(),
            version: SNAPSHOT_VERSION,
            config,
            indicators: self.normalized.indicators.clone(),
            scalers: self.normalized.scalers.clone(),
            pca: self.pca.clone(),
            centers: self.clustering.centers.clone(),
            clusters: self.ratings.clusters.clone(),
            tie_flags: self.ratings.tie_flags.clone(),
            training: TrainingSummary {
                objects: self.normalized.nrows(),
                sse: self.clustering.sse,
                best_restart: self.clustering.best_restart,
                iterations: self.clustering.iterations,
                converged: self.clustering.converged,
            },
        }
    }

    pub fn relative_attributes(&self) -> Result<Vec<ObjectAttributes>> {
        (0..self.normalized.nrows())
            .map(|i| {
                Ok(ObjectAttributes {
                    object: self.normalized.objects[i].clone(),
                    attributes: explain_object(&self.normalized, &self.pca, i)?,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectAttributes {
    pub object: String,
    pub attributes: Vec<RelativeAttribute>,
}

pub const SNAPSHOT_FORMAT: &str = "relarm-model";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub objects: usize,
    pub sse: f64,
    pub best_restart: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Everything needed to rate new objects against a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSnapshot {
    pub format: String,
    pub version: u32,
    pub config: PipelineConfig,
    pub indicators: Vec<IndicatorSpec>,
    pub scalers: Vec<ColumnScaler>,
    pub pca: PcaModel,
    pub centers: Matrix,
    pub clusters: Vec<ClusterRating>,
    pub tie_flags: Vec<(usize, usize)>,
    pub training: TrainingSummary,
}

impl ModelSnapshot {
    pub fn to_json(&self) -> String {
        to_json_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: Self = serde_json::from_str(text).map_err(|e| RelarmError::json("<model>", e))?;
        if snap.format != SNAPSHOT_FORMAT || snap.version != SNAPSHOT_VERSION {
            return Err(RelarmError::Config(format!(
                "unsupported model snapshot {} v{}",
                snap.format, snap.version
            )));
        }
        Ok(snap)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?).map_err(|e| match e {
            RelarmError::Json { source, .. } => RelarmError::json(path, source),
            other => other,
        })
    }

    /// Rates `raw` with the stored scaling, `W`, and centers. Values outside
    /// the training range are clamped onto [0, 1]; each object joins its
    /// nearest center.
    pub fn score(&self, raw: &RawDataset) -> Result<RatingResult> {
        let names: Vec<&str> = raw.indicators().iter().map(|s| s.name.as_str()).collect();
        let expected: Vec<&str> = self.indicators.iter().map(|s| s.name.as_str()).collect();
        if names != expected {
            return Err(RelarmError::InvalidDataset(format!(
                "data indicators {names:?} do not match the model's {expected:?}"
            )));
        }
        let b = apply_scalers(raw, &self.scalers)?;
        let features = map_rows(&b, &self.pca)?;
        let objects = raw
            .objects()
            .iter()
            .zip(features.rows())
            .map(|(id, f)| {
                let q = nearest_center(f, &self.centers);
                ObjectRating {
                    object: id.clone(),
                    cluster: q,
                    projection: self.clusters[q].projection,
                    category: self.clusters[q].category.clone(),
                }
            })
            .collect();
        Ok(RatingResult {
            objects,
            clusters: self.clusters.clone(),
            tie_flags: self.tie_flags.clone(),
        })
    }
}

/// Files written by a full run, for callers that want to inspect them.
#[derive(Debug, Clone, Default)]
pub struct WrittenFiles {
    pub paths: Vec<PathBuf>,
}

/// Writes the rating list and model snapshot, the agreement report when
/// given, and every intermediate matrix when `dump_intermediates` is set.
pub fn write_run_outputs(
    out_dir: &Path,
    fitted: &FittedPipeline,
    agreement: Option<&AgreementReport>,
    dump_intermediates: bool,
) -> Result<WrittenFiles> {
    let mut files = WrittenFiles::default();
    let mut put = |name: &str, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        write_file(&path, contents)?;
        files.paths.push(path);
        Ok(())
    };
    put("ratings.csv", fitted.ratings.to_csv())?;
    put("model.json", fitted.snapshot().to_json())?;
    if let Some(report) = agreement {
        put("agreement.json", report.to_json())?;
    }
    if dump_intermediates {
        put("normalized.csv", fitted.normalized.to_csv())?;
        put("w.csv", fitted.pca.w_csv())?;
        put("lambda.csv", fitted.pca.lambda_csv())?;
        put("features.csv", fitted.features.to_csv())?;
        put("centers.csv", fitted.clustering.centers_csv())?;
        put(
            "assignments.csv",
            fitted.clustering.assignments_csv(&fitted.features.objects),
        )?;
        put("attributes.json", to_json_pretty(&fitted.relative_attributes()?))?;
    }
    Ok(files)
}
