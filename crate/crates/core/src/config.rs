//! Pipeline configuration file.
//!
//! ```json
//! {
//!   "indicators": [{"name": "GDP growth", "direction": "positive"}],
//!   "variance_threshold": 0.95,
//!   "k": 7,
//!   "labels": ["AAA", "AA", "A", "BBB", "BB", "B", "CCC"],
//!   "seed": 2016,
//!   "restarts": 50
//! }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{validate_specs, IndicatorSpec};
use crate::error::{RelarmError, Result};
use crate::io::read_file;
use crate::kmeans::KMeansParams;

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.95;
pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERATIONS: usize = 300;

/// The seven coarse categories used for sovereign ratings, best first.
pub fn standard_scale() -> Vec<String> {
    ["AAA", "AA", "A", "BBB", "BB", "B", "CCC"]
        .into_iter()
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub indicators: Vec<IndicatorSpec>,
    #[serde(default = "default_threshold")]
    pub variance_threshold: f64,
    /// Number of clusters, hence of rating categories. Required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Category labels best first; defaults to [`standard_scale`].
    #[serde(default = "standard_scale")]
    pub labels: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Only `"euclidean"` is accepted.
    #[serde(default, deserialize_with = "deserialize_distance")]
    pub distance: DistanceMetric,
    /// Mean-center the normalized data before PCA.
    #[serde(default = "default_true")]
    pub center: bool,
    /// Extra or overriding entries for the agency category collapse table;
    /// `null` marks a code as "not rated".
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub collapse: BTreeMap<String, Option<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dump_intermediates: bool,
}

fn default_threshold() -> f64 {
    DEFAULT_VARIANCE_THRESHOLD
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}
fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}
fn default_true() -> bool {
    true
}

fn deserialize_distance<'de, D: serde::Deserializer<'de>>(d: D) -> Result<DistanceMetric, D::Error> {
    let s = String::deserialize(d)?;
    match s.to_ascii_lowercase().as_str() {
        "euclidean" => Ok(DistanceMetric::Euclidean),
        other => Err(serde::de::Error::custom(format!(
            "unsupported distance {other:?}; only \"euclidean\" is implemented"
        ))),
    }
}

impl PipelineConfig {
    pub fn new(indicators: Vec<IndicatorSpec>, k: usize) -> Self {
        let labels = if k == 7 {
            standard_scale()
        } else {
            (1..=k).map(|i| format!("C{i}")).collect()
        };
        Self {
            indicators,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
            k: Some(k),
            labels,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            distance: DistanceMetric::Euclidean,
            center: true,
            collapse: BTreeMap::new(),
            out_dir: None,
            dump_intermediates: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        Self::from_json(&text).map_err(|e| match e {
            RelarmError::Json { source, .. } => RelarmError::json(path, source),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| RelarmError::json("<config>", e))?;
        validate_specs(&config.indicators)?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_pretty(self)
    }

    /// Checks every cross-field constraint; call after applying overrides.
    pub fn validate(&self) -> Result<()> {
        validate_specs(&self.indicators)?;
        if !(self.variance_threshold > 0.0 && self.variance_threshold <= 1.0) {
            return Err(RelarmError::Config(format!(
                "variance_threshold must lie in (0, 1], got {}",
                self.variance_threshold
            )));
        }
        let k = self.k()?;
        if k < 1 {
            return Err(RelarmError::Config("k must be at least 1".into()));
        }
        if self.labels.len() != k {
            return Err(RelarmError::Config(format!(
                "rating scale has {} labels but k = {k}",
                self.labels.len()
            )));
        }
        if self.restarts < 1 {
            return Err(RelarmError::Config("restarts must be at least 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(RelarmError::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> Result<usize> {
        self.k
            .ok_or_else(|| RelarmError::Config("missing required key \"k\"".into()))
    }

    pub fn kmeans_params(&self) -> Result<KMeansParams> {
        Ok(KMeansParams {
            k: self.k()?,
            seed: self.seed,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"indicators": [{"name": "x", "direction": "positive"}], "k": 7}"#;

    #[test]
    fn defaults_applied() {
        let c = PipelineConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.variance_threshold, 0.95);
        assert_eq!(c.restarts, 50);
        assert_eq!(c.max_iterations, 300);
        assert_eq!(c.labels, standard_scale());
        assert!(c.center);
        c.validate().unwrap();
    }

    #[test]
    fn missing_k_is_a_config_error() {
        let c = PipelineConfig::from_json(r#"{"indicators": [{"name": "x", "direction": "negative"}]}"#)
            .unwrap();
        assert!(matches!(c.validate(), Err(RelarmError::Config(m)) if m.contains("\"k\"")));
    }

    #[test]
    fn threshold_and_scale_checked() {
        let mut c = PipelineConfig::from_json(MINIMAL).unwrap();
        c.variance_threshold = 0.0;
        assert!(c.validate().is_err());
        c.variance_threshold = 1.0;
        c.validate().unwrap();
        c.variance_threshold = 1.01;
        assert!(c.validate().is_err());
        c.variance_threshold = 0.9;
        c.k = Some(3);
        assert!(c.validate().is_err());
    }

    #[test]
    fn only_euclidean_distance() {
        let ok = r#"{"indicators": [{"name": "x", "direction": "positive"}], "k": 2,
                     "labels": ["A", "B"], "distance": "euclidean"}"#;
        PipelineConfig::from_json(ok).unwrap().validate().unwrap();
        let bad = ok.replace("\"euclidean\"", "\"manhattan\"");
        assert!(PipelineConfig::from_json(&bad).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"indicators": [{"name": "x", "direction": "positive"}], "kk": 7}"#;
        assert!(PipelineConfig::from_json(bad).is_err());
    }
}
