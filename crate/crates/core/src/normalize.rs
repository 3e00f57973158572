//! Direction-aware min-max scaling onto the unit interval.

use serde::{Deserialize, Serialize};

use crate::dataset::{Direction, IndicatorSpec, RawDataset};
use crate::error::{RelarmError, Result};
use crate::matrix::Matrix;

/// Value assigned to every entry of a constant column.
pub const CONSTANT_COLUMN_VALUE: f64 = 0.5;

/// Maps a single raw value given its column's minimum and maximum.
///
/// Positive indicators map `min → 0, max → 1`; negative ones the reverse.
/// When `max == min` the column carries no information and the result is
/// [`CONSTANT_COLUMN_VALUE`].
pub fn normalize_value(p: f64, min: f64, max: f64, direction: Direction) -> f64 {
    let span = max - min;
    if span == 0.0 {
        return CONSTANT_COLUMN_VALUE;
    }
    let b = match direction {
        Direction::Positive => (p - min) / span,
        Direction::Negative => (max - p) / span,
    };
    // only bites for values outside the fitted range (re-scoring new objects)
    b.clamp(0.0, 1.0)
}

/// Fitted per-column transform, kept in model snapshots so new objects can
/// be scaled against the training sample's range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnScaler {
    MinMax {
        min: f64,
        max: f64,
        direction: Direction,
    },
    /// Column already on [0, 1]; values pass through after a range check.
    Identity,
}

impl ColumnScaler {
    pub fn fit(raw: &[f64], spec: &IndicatorSpec) -> Self {
        if spec.pre_normalized {
            return Self::Identity;
        }
        let (min, max) = raw
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Self::MinMax {
            min,
            max,
            direction: spec.direction,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::MinMax { min, max, .. } if min == max)
    }

    /// Returns `None` for a pre-normalized value outside [0, 1].
    pub fn apply(&self, p: f64) -> Option<f64> {
        match *self {
            Self::MinMax {
                min,
                max,
                direction,
            } => Some(normalize_value(p, min, max, direction)),
            Self::Identity => (0.0..=1.0).contains(&p).then_some(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedColumn {
    pub values: Vec<f64>,
    /// Set when the input had a single distinct value.
    pub constant: bool,
}

pub fn normalize_column(raw: &[f64], direction: Direction) -> Result<NormalizedColumn> {
    if raw.len() < 2 {
        return Err(RelarmError::InvalidDataset(format!(
            "a column needs at least 2 values to normalize, found {}",
            raw.len()
        )));
    }
    if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
        return Err(RelarmError::InvalidDataset(format!(
            "cannot normalize non-finite value {bad}"
        )));
    }
    let scaler = ColumnScaler::fit(raw, &IndicatorSpec::new("column", direction));
    Ok(NormalizedColumn {
        values: raw.iter().map(|&p| scaler.apply(p).expect("min-max")).collect(),
        constant: scaler.is_constant(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeWarning {
    ConstantColumn { indicator: String },
}

impl std::fmt::Display for NormalizeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ConstantColumn { indicator } => write!(
                f,
                "indicator {indicator:?} is constant; all objects set to {CONSTANT_COLUMN_VALUE}"
            ),
        }
    }
}

/// The normalized parameter set: an M×N matrix with entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    pub objects: Vec<String>,
    pub indicators: Vec<IndicatorSpec>,
    pub values: Matrix,
    pub scalers: Vec<ColumnScaler>,
    pub warnings: Vec<NormalizeWarning>,
}

impl NormalizedMatrix {
    /// Wraps an already-normalized matrix, checking the unit range.
    pub fn from_values(objects: Vec<String>, indicators: Vec<IndicatorSpec>, values: Matrix) -> Result<Self> {
        let raw = RawDataset::new(objects, indicators, values)?;
        let pre: Vec<IndicatorSpec> = raw
            .indicators()
            .iter()
            .map(|s| IndicatorSpec::pre_normalized(s.name.clone()))
            .collect();
        let raw = RawDataset::new(raw.objects().to_vec(), pre, raw.values().clone())?;
        normalize_dataset(&raw)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn indicator_names(&self) -> Vec<String> {
        self.indicators.iter().map(|s| s.name.clone()).collect()
    }

    pub fn to_csv(&self) -> String {
        crate::io::labeled_matrix_csv("object", &self.indicator_names(), &self.objects, &self.values)
    }
}

pub fn normalize_dataset(raw: &RawDataset) -> Result<NormalizedMatrix> {
    let scalers: Vec<ColumnScaler> = raw
        .indicators()
        .iter()
        .enumerate()
        .map(|(j, spec)| ColumnScaler::fit(&raw.values().column(j), spec))
        .collect();
    let values = apply_scalers(raw, &scalers)?;
    let warnings = raw
        .indicators()
        .iter()
        .zip(&scalers)
        .filter(|(_, s)| s.is_constant())
        .map(|(spec, _)| NormalizeWarning::ConstantColumn {
            indicator: spec.name.clone(),
        })
        .collect();
    Ok(NormalizedMatrix {
        objects: raw.objects().to_vec(),
        indicators: raw.indicators().to_vec(),
        values,
        scalers,
        warnings,
    })
}

/// Scales `raw` with previously fitted column transforms.
pub fn apply_scalers(raw: &RawDataset, scalers: &[ColumnScaler]) -> Result<Matrix> {
    if scalers.len() != raw.indicators().len() {
        return Err(RelarmError::DimensionMismatch {
            context: "column scalers",
            expected: raw.indicators().len(),
            found: scalers.len(),
        });
    }
    let mut out = Matrix::zeros(raw.len(), scalers.len());
    for (i, row) in raw.values().rows().enumerate() {
        for (j, (&p, scaler)) in row.iter().zip(scalers).enumerate() {
            out[(i, j)] = scaler.apply(p).ok_or_else(|| RelarmError::OutOfUnitRange {
                indicator: raw.indicators()[j].name.clone(),
                object: raw.objects()[i].clone(),
                value: p,
            })?;
        }
    }
    Ok(out)
}
