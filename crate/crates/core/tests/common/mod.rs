#![allow(dead_code)]

use std::path::PathBuf;

use relarm::matrix::squared_distance;
use relarm::rng::SplitMix64;
use relarm::{fit_pipeline, load_dataset, FittedPipeline, Matrix, PipelineConfig, RawDataset};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn country_config() -> PipelineConfig {
    PipelineConfig::load(&fixture("countries_config.json")).unwrap()
}

pub fn country_raw() -> RawDataset {
    load_dataset(fixture("countries_raw.csv"), fixture("countries_config.json")).unwrap()
}

pub fn country_fit() -> FittedPipeline {
    fit_pipeline(&country_raw(), &country_config()).unwrap()
}

/// Numeric CSV with a header row; `skip` leading label columns are dropped.
pub fn read_numeric_table(name: &str, skip: usize) -> Matrix {
    let mut reader = csv::Reader::from_path(fixture(name)).unwrap();
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().skip(skip).map(|v| v.parse().unwrap()).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.next_f64()).collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

/// Independent PCA reference: covariance formed with nalgebra, eigenpairs
/// from nalgebra's symmetric QR solver, sorted descending.
pub struct OracleEigen {
    pub covariance: nalgebra::DMatrix<f64>,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn oracle_pca(b: &Matrix, center: bool) -> OracleEigen {
    let m = b.nrows();
    let n = b.ncols();
    let x = nalgebra::DMatrix::from_row_slice(m, n, b.as_slice());
    let x = if center {
        let means = x.row_mean();
        let mut centered = x.clone();
        for mut row in centered.row_iter_mut() {
            row -= &means;
        }
        centered
    } else {
        x
    };
    let cov = x.transpose() * &x / (m as f64 - 1.0);
    let eig = nalgebra::SymmetricEigen::new(cov.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    OracleEigen {
        values: idx.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: idx
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
        covariance: cov,
    }
}

/// Plain Lloyd with uniformly drawn distinct seeds; returns the best SSE.
pub fn naive_lloyd_best_sse(points: &Matrix, k: usize, runs: usize, seed: u64) -> f64 {
    let m = points.nrows();
    let d = points.ncols();
    let mut rng = SplitMix64::new(seed);
    let mut best = f64::INFINITY;
    for _ in 0..runs {
        let mut chosen: Vec<usize> = Vec::new();
        while chosen.len() < k {
            let i = rng.below(m);
            if chosen
                .iter()
                .all(|&c| squared_distance(points.row(c), points.row(i)) > 0.0)
            {
                chosen.push(i);
            }
        }
        let mut centers: Vec<Vec<f64>> = chosen.iter().map(|&i| points.row(i).to_vec()).collect();
        let mut labels = vec![usize::MAX; m];
        for _ in 0..300 {
            let mut changed = false;
            for i in 0..m {
                let mut bq = 0;
                for q in 1..k {
                    if squared_distance(points.row(i), &centers[q])
                        < squared_distance(points.row(i), &centers[bq])
                    {
                        bq = q;
                    }
                }
                if labels[i] != bq {
                    labels[i] = bq;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for q in 0..k {
                let members: Vec<usize> = (0..m).filter(|&i| labels[i] == q).collect();
                if members.is_empty() {
                    continue;
                }
                centers[q] = (0..d)
                    .map(|j| members.iter().map(|&i| points[(i, j)]).sum::<f64>() / members.len() as f64)
                    .collect();
            }
        }
        let sse: f64 = (0..m)
            .map(|i| squared_distance(points.row(i), &centers[labels[i]]))
            .sum();
        best = best.min(sse);
    }
    best
}
