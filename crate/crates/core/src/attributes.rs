//! Relative PCA attributes and their ranking functions.
//!
//! For a normalized object row `b` and component `p`, the relative attribute
//! is the entrywise product of `b` with the signed component. Its l1 norm is
//! the ranking function `r_p(b) = Σ_k b_k |w_kp|`, and stacking `r_1..r_d`
//! maps every object into the d-dimensional feature space that gets
//! clustered.

use serde::Serialize;

use crate::error::{RelarmError, Result};
use crate::matrix::Matrix;
use crate::normalize::NormalizedMatrix;
use crate::pca::PcaModel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeAttribute {
    pub object_index: usize,
    pub component_index: usize,
    pub values: Vec<f64>,
}

impl RelativeAttribute {
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

fn check_row(b: &[f64], model: &PcaModel, p: usize) -> Result<()> {
    if b.len() != model.n_indicators() {
        return Err(RelarmError::DimensionMismatch {
            context: "normalized row length",
            expected: model.n_indicators(),
            found: b.len(),
        });
    }
    if p >= model.d {
        return Err(RelarmError::IndexOutOfRange {
            context: "retained component",
            index: p,
            len: model.d,
        });
    }
    Ok(())
}

/// Relative attribute of row `b` for retained component `p` (0-based).
pub fn attribute_vector(b: &[f64], model: &PcaModel, p: usize) -> Result<RelativeAttribute> {
    attribute_vector_for(0, b, model, p)
}

pub fn attribute_vector_for(
    object_index: usize,
    b: &[f64],
    model: &PcaModel,
    p: usize,
) -> Result<RelativeAttribute> {
    check_row(b, model, p)?;
    let values = b
        .iter()
        .enumerate()
        .map(|(k, bk)| bk * model.components[(k, p)])
        .collect();
    Ok(RelativeAttribute {
        object_index,
        component_index: p,
        values,
    })
}

/// Ranking function `r_p(b)`: strength of the p-th main attribute in `b`.
pub fn rank_value(b: &[f64], model: &PcaModel, p: usize) -> Result<f64> {
    check_row(b, model, p)?;
    Ok(b.iter()
        .enumerate()
        .fold(0.0, |acc, (k, bk)| acc + bk * model.w[(k, p)]))
}

/// Objects expressed as ranking-function values, one row per object.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeatureMatrix {
    pub objects: Vec<String>,
    pub values: Matrix,
}

impl RankedFeatureMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn to_csv(&self) -> String {
        let headers: Vec<String> = (1..=self.dim()).map(|p| format!("r{p}")).collect();
        crate::io::labeled_matrix_csv("object", &headers, &self.objects, &self.values)
    }
}

/// Maps raw normalized rows through `W`.
pub fn map_rows(b: &Matrix, model: &PcaModel) -> Result<Matrix> {
    if b.ncols() != model.n_indicators() {
        return Err(RelarmError::DimensionMismatch {
            context: "feature map input columns",
            expected: model.n_indicators(),
            found: b.ncols(),
        });
    }
    b.matmul(&model.w)
}

pub fn map_to_feature_space(b: &NormalizedMatrix, model: &PcaModel) -> Result<RankedFeatureMatrix> {
    Ok(RankedFeatureMatrix {
        objects: b.objects.clone(),
        values: map_rows(&b.values, model)?,
    })
}

/// Per-object, per-component contribution breakdown for reports.
pub fn explain_object(b: &NormalizedMatrix, model: &PcaModel, object_index: usize) -> Result<Vec<RelativeAttribute>> {
    if object_index >= b.nrows() {
        return Err(RelarmError::IndexOutOfRange {
            context: "object",
            index: object_index,
            len: b.nrows(),
        });
    }
    let row = b.values.row(object_index);
    (0..model.d)
        .map(|p| attribute_vector_for(object_index, row, model, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::ranking_matrix;

    fn model_from_components(components: Matrix, d: usize) -> PcaModel {
        let n = components.nrows();
        PcaModel {
            w: ranking_matrix(&components, d),
            components,
            eigenvalues: vec![0.0; n],
            variance_fractions: vec![1.0 / n as f64; n],
            solver_order: (0..n).collect(),
            d,
            lambda: vec![1.0 / n as f64; d],
            means: vec![0.0; n],
            centered: true,
            variance_threshold: 0.95,
        }
    }

    #[test]
    fn attribute_examples() {
        let model = model_from_components(Matrix::from_rows(&[[0.3, 0.6], [-0.7, 0.4]]).unwrap(), 2);
        let a = attribute_vector(&[1.0, 1.0], &model, 0).unwrap();
        assert_eq!(a.values, vec![0.3, -0.7]);
        let a = attribute_vector(&[0.0, 0.0], &model, 0).unwrap();
        assert_eq!(a.values, vec![0.0, 0.0]);
        let a = attribute_vector(&[0.5, 0.5], &model, 1).unwrap();
        assert!((a.values[0] - 0.30).abs() < 1e-15 && (a.values[1] - 0.20).abs() < 1e-15);
    }

    #[test]
    fn rank_value_extremes_and_consistency() {
        let model = model_from_components(Matrix::from_rows(&[[0.3, 0.6], [-0.7, 0.4]]).unwrap(), 2);
        for p in 0..2 {
            assert!((rank_value(&[1.0, 1.0], &model, p).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(rank_value(&[0.0, 0.0], &model, p).unwrap(), 0.0);
            let b = [0.25, 0.8];
            let r = rank_value(&b, &model, p).unwrap();
            let a = attribute_vector(&b, &model, p).unwrap();
            assert!((r - a.l1_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn index_and_shape_errors() {
        let model = model_from_components(Matrix::from_rows(&[[0.5, 0.5], [0.5, -0.5]]).unwrap(), 1);
        assert!(matches!(
            attribute_vector(&[1.0, 1.0], &model, 1),
            Err(RelarmError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            rank_value(&[1.0], &model, 0),
            Err(RelarmError::DimensionMismatch { .. })
        ));
        assert!(map_rows(&Matrix::zeros(2, 3), &model).is_err());
    }

    #[test]
    fn unit_rows_select_rows_of_w() {
        let comps = Matrix::from_rows(&[[0.2, -0.5, 0.1], [-0.3, 0.25, 0.6], [0.5, 0.25, -0.3]]).unwrap();
        let model = model_from_components(comps, 3);
        let mapped = map_rows(&Matrix::identity(3), &model).unwrap();
        assert_eq!(mapped, model.w);
        let ones = Matrix::from_rows(&[[1.0, 1.0, 1.0]]).unwrap();
        for v in map_rows(&ones, &model).unwrap().row(0) {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
