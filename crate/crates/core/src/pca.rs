//! Principal components of the normalized set, l1-scaled, with the ranking
//! matrix `W` and the rating vector `Λ` derived from them.

use serde::{Deserialize, Serialize};

use crate::eigen::symmetric_eigen;
use crate::error::{RelarmError, Result};
use crate::matrix::Matrix;
use crate::normalize::NormalizedMatrix;

/// Eigenvalues at or below this fraction of the trace count as zero when
/// determining the numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Slack on the cumulative-variance comparison, absorbing summation error
/// when the threshold is exactly reachable (e.g. 1.0).
const CUMULATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaOptions {
    pub variance_threshold: f64,
    /// Subtract column means before forming the covariance matrix.
    pub center: bool,
}

impl Default for PcaOptions {
    fn default() -> Self {
        Self {
            variance_threshold: crate::config::DEFAULT_VARIANCE_THRESHOLD,
            center: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// N×N; column k is the k-th component scaled to unit l1 norm.
    pub components: Matrix,
    /// Covariance eigenvalues, descending, negatives from round-off clamped to 0.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalue over trace, descending, summing to 1.
    pub variance_fractions: Vec<f64>,
    /// Solver output position of each sorted component; records how ties
    /// were ordered.
    pub solver_order: Vec<usize>,
    pub d: usize,
    /// N×d absolute weights of the first d components.
    pub w: Matrix,
    /// First d variance fractions.
    pub lambda: Vec<f64>,
    pub means: Vec<f64>,
    pub centered: bool,
    pub variance_threshold: f64,
}

impl PcaModel {
    pub fn n_indicators(&self) -> usize {
        self.components.nrows()
    }

    /// Component `k` rescaled to unit Euclidean length, as the eigensolver
    /// produced it (up to sign).
    pub fn unit_eigenvector(&self, k: usize) -> Vec<f64> {
        let col = self.components.column(k);
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        col.iter().map(|x| x / norm).collect()
    }

    /// Copy of the model with component `k` negated. Downstream outputs must
    /// not change, since only absolute weights are used.
    pub fn with_flipped_component(&self, k: usize) -> Result<Self> {
        if k >= self.components.ncols() {
            return Err(RelarmError::IndexOutOfRange {
                context: "principal component",
                index: k,
                len: self.components.ncols(),
            });
        }
        let mut flipped = self.clone();
        let negated: Vec<f64> = self.components.column(k).iter().map(|x| -x).collect();
        flipped.components.set_column(k, &negated);
        flipped.w = ranking_matrix(&flipped.components, flipped.d);
        Ok(flipped)
    }

    pub fn w_csv(&self) -> String {
        let headers = (1..=self.d).map(|p| format!("PC{p}")).collect::<Vec<_>>();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&headers).expect("in-memory write");
        for row in self.w.rows() {
            w.write_record(row.iter().map(|&x| crate::io::format_f64(x)))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn lambda_csv(&self) -> String {
        let headers = (1..=self.d).map(|p| format!("PC{p}")).collect::<Vec<_>>();
        let values: Vec<String> = self.lambda.iter().map(|&x| crate::io::format_f64(x)).collect();
        format!("{}\n{}\n", headers.join(","), values.join(","))
    }
}

/// Sample covariance (divisor M−1) of the columns of `b`, optionally about
/// the column means.
pub fn covariance(b: &Matrix, center: bool) -> Result<(Matrix, Vec<f64>)> {
    let m = b.nrows();
    let n = b.ncols();
    if m < 2 {
        return Err(RelarmError::InvalidDataset(format!(
            "PCA needs at least 2 objects, found {m}"
        )));
    }
    let means: Vec<f64> = if center {
        (0..n)
            .map(|j| b.rows().map(|r| r[j]).sum::<f64>() / m as f64)
            .collect()
    } else {
        vec![0.0; n]
    };
    let mut c = Matrix::zeros(n, n);
    for row in b.rows() {
        for i in 0..n {
            let di = row[i] - means[i];
            for j in i..n {
                c[(i, j)] += di * (row[j] - means[j]);
            }
        }
    }
    let denom = (m - 1) as f64;
    for i in 0..n {
        for j in i..n {
            let v = c[(i, j)] / denom;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok((c, means))
}

/// Absolute values of the first `d` columns.
pub fn ranking_matrix(components: &Matrix, d: usize) -> Matrix {
    components.leading_columns(d).map(f64::abs)
}

/// Smallest count whose cumulative fraction reaches `threshold`, capped at
/// the numerical rank.
pub fn select_component_count(fractions: &[f64], threshold: f64) -> usize {
    let rank = fractions.iter().filter(|&&f| f > RANK_TOLERANCE).count().max(1);
    let mut cumulative = 0.0;
    let mut d = fractions.len();
    for (i, f) in fractions.iter().enumerate() {
        cumulative += f;
        if cumulative >= threshold - CUMULATIVE_SLACK {
            d = i + 1;
            break;
        }
    }
    d.min(rank)
}

pub fn fit_pca(b: &NormalizedMatrix, variance_threshold: f64) -> Result<PcaModel> {
    fit_pca_with(
        &b.values,
        &PcaOptions {
            variance_threshold,
            ..PcaOptions::default()
        },
    )
}

pub fn fit_pca_with(b: &Matrix, options: &PcaOptions) -> Result<PcaModel> {
    let threshold = options.variance_threshold;
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(RelarmError::Config(format!(
            "variance threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let n = b.ncols();
    if n == 0 {
        return Err(RelarmError::InvalidDataset("PCA needs at least one indicator".into()));
    }
    let (cov, means) = covariance(b, options.center)?;
    let eig = symmetric_eigen(&cov)?;

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep solver order
    order.sort_by(|&i, &j| eig.values[j].total_cmp(&eig.values[i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.values[i].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(RelarmError::Numerical(
            "normalized data has zero total variance; every indicator is constant".into(),
        ));
    }
    let variance_fractions: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();

    let mut components = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let v = eig.vectors.column(src);
        let l1: f64 = v.iter().map(|x| x.abs()).sum();
        let scaled: Vec<f64> = v.iter().map(|x| x / l1).collect();
        components.set_column(k, &scaled);
    }

    let d = select_component_count(&variance_fractions, threshold);
    Ok(PcaModel {
        w: ranking_matrix(&components, d),
        lambda: variance_fractions[..d].to_vec(),
        components,
        eigenvalues,
        variance_fractions,
        solver_order: order,
        d,
        means,
        centered: options.center,
        variance_threshold: threshold,
    })
}

pub const W_COLUMN_SUM_TOLERANCE: f64 = 1e-3;
pub const LAMBDA_SUM_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy)]
pub struct LambdaFixture<'a> {
    pub values: &'a [f64],
    pub expected_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureReport {
    pub column_sums: Vec<f64>,
    pub lambda_sum: Option<f64>,
}

/// Arithmetic self-check of published `W` / `Λ` tables: every `W` column
/// must sum to 1 and `Λ` must add up to the stated retained variance.
pub fn verify_fixture_w(w: &Matrix, lambda: Option<LambdaFixture<'_>>) -> Result<FixtureReport> {
    if w.ncols() == 0 || w.nrows() == 0 {
        return Err(RelarmError::Fixture("W fixture is empty".into()));
    }
    if let Some(&bad) = w.as_slice().iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(RelarmError::Fixture(format!("W fixture has negative entry {bad}")));
    }
    let column_sums: Vec<f64> = (0..w.ncols()).map(|j| w.column(j).iter().sum()).collect();
    for (j, s) in column_sums.iter().enumerate() {
        if (s - 1.0).abs() > W_COLUMN_SUM_TOLERANCE {
            return Err(RelarmError::Fixture(format!(
                "W column {} sums to {s}, not 1 ± {W_COLUMN_SUM_TOLERANCE}",
                j + 1
            )));
        }
    }
    let lambda_sum = match lambda {
        None => None,
        Some(fx) => {
            if fx.values.len() != w.ncols() {
                return Err(RelarmError::Fixture(format!(
                    "rating vector has {} entries but W has {} columns",
                    fx.values.len(),
                    w.ncols()
                )));
            }
            if fx.values.windows(2).any(|p| p[0] < p[1]) {
                return Err(RelarmError::Fixture("rating vector is not descending".into()));
            }
            let sum: f64 = fx.values.iter().sum();
            if (sum - fx.expected_sum).abs() > LAMBDA_SUM_TOLERANCE {
                return Err(RelarmError::Fixture(format!(
                    "rating vector sums to {sum}, expected {} ± {LAMBDA_SUM_TOLERANCE}",
                    fx.expected_sum
                )));
            }
            Some(sum)
        }
    };
    Ok(FixtureReport {
        column_sums,
        lambda_sum,
    })
}
