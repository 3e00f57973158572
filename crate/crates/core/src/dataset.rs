//! Raw rating-object tables and indicator declarations.
//!
//! Data files are comma-separated with a header row. The first column holds
//! object identifiers, every other column one indicator. Indicator directions
//! live in a separate JSON file (usually the pipeline config), so the data
//! stays pure measurements.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{RelarmError, Result};
use crate::io::read_file;
use crate::matrix::Matrix;

/// How an indicator influences the rated property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[serde(alias = "Positive")]
    Positive,
    #[serde(alias = "Negative")]
    Negative,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorSpec {
    pub name: String,
    pub direction: Direction,
    /// The column is already on the unit interval (an expert score, say) and
    /// is copied through normalization after a range check.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pre_normalized: bool,
}

impl IndicatorSpec {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
            pre_normalized: false,
        }
    }

    pub fn pre_normalized(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Positive,
            pre_normalized: true,
        }
    }
}

/// Checks names are non-empty and unique.
pub fn validate_specs(specs: &[IndicatorSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(RelarmError::InvalidIndicator(
            "at least one indicator is required".into(),
        ));
    }
    let mut seen = HashSet::new();
    for s in specs {
        if s.name.trim().is_empty() {
            return Err(RelarmError::InvalidIndicator("empty indicator name".into()));
        }
        if !seen.insert(s.name.as_str()) {
            return Err(RelarmError::InvalidIndicator(format!(
                "duplicate indicator name {:?}",
                s.name
            )));
        }
    }
    Ok(())
}

/// An M×N table of raw indicator values, one row per rating object.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    objects: Vec<String>,
    indicators: Vec<IndicatorSpec>,
    values: Matrix,
}

impl RawDataset {
    pub fn new(objects: Vec<String>, indicators: Vec<IndicatorSpec>, values: Matrix) -> Result<Self> {
        validate_specs(&indicators)?;
        if objects.len() < 2 {
            return Err(RelarmError::InvalidDataset(format!(
                "need at least 2 rating objects, found {}",
                objects.len()
            )));
        }
        if values.nrows() != objects.len() {
            return Err(RelarmError::DimensionMismatch {
                context: "dataset rows",
                expected: objects.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != indicators.len() {
            return Err(RelarmError::DimensionMismatch {
                context: "dataset columns",
                expected: indicators.len(),
                found: values.ncols(),
            });
        }
        let mut seen = HashSet::new();
        for (i, id) in objects.iter().enumerate() {
            if id.trim().is_empty() {
                return Err(RelarmError::MissingCell {
                    row: i + 1,
                    column: 1,
                    name: "object".into(),
                });
            }
            if !seen.insert(id.as_str()) {
                return Err(RelarmError::DuplicateObject {
                    row: i + 1,
                    id: id.clone(),
                });
            }
        }
        for (i, row) in values.rows().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(RelarmError::NonNumericCell {
                    row: i + 1,
                    column: j + 2,
                    name: indicators[j].name.clone(),
                    value: row[j].to_string(),
                });
            }
        }
        Ok(Self {
            objects,
            indicators,
            values,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn indicator_names(&self) -> Vec<String> {
        self.indicators.iter().map(|s| s.name.clone()).collect()
    }

    /// Appends a column, e.g. a synthesized expert score.
    pub fn with_column(&self, spec: IndicatorSpec, column: &[f64]) -> Result<Self> {
        if column.len() != self.len() {
            return Err(RelarmError::DimensionMismatch {
                context: "appended column",
                expected: self.len(),
                found: column.len(),
            });
        }
        let n = self.indicators.len();
        let mut data = Vec::with_capacity(self.len() * (n + 1));
        for (row, v) in self.values.rows().zip(column) {
            data.extend_from_slice(row);
            data.push(*v);
        }
        let mut indicators = self.indicators.clone();
        indicators.push(spec);
        Self::new(
            self.objects.clone(),
            indicators,
            Matrix::from_row_major(self.len(), n + 1, data)?,
        )
    }

    /// Serializes back to the input CSV layout with lossless float text.
    pub fn to_csv(&self) -> String {
        crate::io::labeled_matrix_csv("object", &self.indicator_names(), &self.objects, &self.values)
    }
}

/// Loads a data file whose directions are declared in the JSON file at
/// `spec_path` (any JSON object with an `indicators` array, typically the
/// pipeline config).
pub fn load_dataset(path: impl AsRef<Path>, spec_path: impl AsRef<Path>) -> Result<RawDataset> {
    let config = PipelineConfig::load(spec_path.as_ref())?;
    read_dataset(path.as_ref(), &config.indicators)
}

pub fn read_dataset(path: &Path, specs: &[IndicatorSpec]) -> Result<RawDataset> {
    let text = read_file(path)?;
    parse_dataset(&text, specs).map_err(|e| match e {
        RelarmError::Csv { source, .. } => RelarmError::csv(path, source),
        other => other,
    })
}

/// Parses CSV text, reordering columns to match `specs`.
///
/// Row numbers in errors are 1-based file lines (the header is line 1);
/// column numbers are 1-based field positions (the id column is 1).
pub fn parse_dataset(text: &str, specs: &[IndicatorSpec]) -> Result<RawDataset> {
    validate_specs(specs)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| RelarmError::csv("<data>", e))?
        .clone();
    if headers.len() < 2 {
        return Err(RelarmError::InvalidDataset(
            "header must contain an object id column and at least one indicator".into(),
        ));
    }
    let declared: HashMap<&str, usize> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();
    // spec index for each data column after the id
    let mut column_to_spec = Vec::with_capacity(headers.len() - 1);
    let mut present = HashSet::new();
    for name in headers.iter().skip(1) {
        let idx = *declared
            .get(name)
            .ok_or_else(|| RelarmError::UndeclaredIndicator(name.to_owned()))?;
        if !present.insert(idx) {
            return Err(RelarmError::InvalidDataset(format!(
                "indicator column {name:?} appears twice in the header"
            )));
        }
        column_to_spec.push(idx);
    }
    if let Some(missing) = specs.iter().enumerate().find(|(i, _)| !present.contains(i)) {
        return Err(RelarmError::MissingIndicator(missing.1.name.clone()));
    }

    let n = specs.len();
    let mut objects = Vec::new();
    let mut data = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| RelarmError::csv("<data>", e))?;
        let row = record.position().map_or(objects.len() + 2, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != headers.len() {
            return Err(RelarmError::RaggedRow {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(RelarmError::MissingCell {
                row,
                column: 1,
                name: headers[0].to_owned(),
            });
        }
        if !seen.insert(id.to_owned()) {
            return Err(RelarmError::DuplicateObject {
                row,
                id: id.to_owned(),
            });
        }
        let mut values = vec![0.0; n];
        for (c, field) in record.iter().skip(1).enumerate() {
            let name = &headers[c + 1];
            if field.is_empty() {
                return Err(RelarmError::MissingCell {
                    row,
                    column: c + 2,
                    name: name.to_owned(),
                });
            }
            let v: f64 = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| RelarmError::NonNumericCell {
                    row,
                    column: c + 2,
                    name: name.to_owned(),
                    value: field.to_owned(),
                })?;
            values[column_to_spec[c]] = v;
        }
        objects.push(id.to_owned());
        data.extend(values);
    }
    let m = objects.len();
    RawDataset::new(objects, specs.to_vec(), Matrix::from_row_major(m, n, data)?)
}
