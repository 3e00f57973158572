mod common;

use common::{oracle_pca, random_matrix};
use proptest::prelude::*;
use relarm::eigen::{eigen_residual, symmetric_eigen};
use relarm::pca::covariance;
use relarm::rng::SplitMix64;
use relarm::{fit_pca_with, Matrix, PcaOptions};

const TOL: f64 = 1e-8;

fn options(center: bool) -> PcaOptions {
    PcaOptions {
        variance_threshold: 0.95,
        center,
    }
}

/// Components are only unique up to sign when their eigenvalue is nonzero
/// and isolated, so only those are compared entrywise.
fn isolated(values: &[f64], k: usize, trace: f64) -> bool {
    let gap = 1e-4 * trace;
    values[k] > gap
        && (k == 0 || values[k - 1] - values[k] > gap)
        && (k + 1 == values.len() || values[k] - values[k + 1] > gap)
}

fn compare_with_oracle(b: &Matrix, center: bool) -> Result<(), String> {
    let model = fit_pca_with(b, &options(center)).map_err(|e| e.to_string())?;
    let oracle = oracle_pca(b, center);
    let clamped: Vec<f64> = oracle.values.iter().map(|v| v.max(0.0)).collect();
    let trace: f64 = clamped.iter().sum();
    for (k, (ours, theirs)) in model.variance_fractions.iter().zip(&clamped).enumerate() {
        if (ours - theirs / trace).abs() > TOL {
            return Err(format!("fraction {k}: {ours} vs {}", theirs / trace));
        }
    }
    for k in 0..b.ncols() {
        if !isolated(&clamped, k, trace) {
            continue;
        }
        let l1: f64 = oracle.vectors[k].iter().map(|x| x.abs()).sum();
        for (i, theirs) in oracle.vectors[k].iter().enumerate() {
            let ours = model.components[(i, k)].abs();
            if (ours - theirs.abs() / l1).abs() > TOL {
                return Err(format!("component {k} entry {i}: {ours} vs {}", theirs.abs() / l1));
            }
        }
    }
    Ok(())
}

#[test]
fn matches_oracle_on_random_matrices() {
    let mut rng = SplitMix64::new(20_160_401);
    for trial in 0..200 {
        let m = 4 + rng.below(9);
        let n = 2 + rng.below(5);
        let b = random_matrix(&mut rng, m, n);
        compare_with_oracle(&b, trial % 2 == 0).unwrap_or_else(|e| panic!("trial {trial} ({m}x{n}): {e}"));
    }
}

#[test]
fn eigenpair_residuals_are_tiny() {
    let mut rng = SplitMix64::new(7);
    for _ in 0..200 {
        let m = 4 + rng.below(9);
        let n = 2 + rng.below(5);
        let (cov, _) = covariance(&random_matrix(&mut rng, m, n), true).unwrap();
        let eig = symmetric_eigen(&cov).unwrap();
        for k in 0..n {
            let v = eig.vectors.column(k);
            assert!(eigen_residual(&cov, &v, eig.values[k]) < 1e-10);
        }
    }
}

#[test]
fn covariance_matches_oracle() {
    let mut rng = SplitMix64::new(99);
    let b = random_matrix(&mut rng, 9, 5);
    for center in [true, false] {
        let (ours, _) = covariance(&b, center).unwrap();
        let oracle = oracle_pca(&b, center).covariance;
        for i in 0..5 {
            for j in 0..5 {
                assert!((ours[(i, j)] - oracle[(i, j)]).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn rank_deficient_input_caps_d() {
    // three objects span at most a 2-dimensional centered subspace
    let b = Matrix::from_rows(&[[0.1, 0.2, 0.3, 0.4], [0.9, 0.1, 0.5, 0.2], [0.4, 0.7, 0.0, 1.0]]).unwrap();
    let model = fit_pca_with(&b, &PcaOptions { variance_threshold: 1.0, center: true }).unwrap();
    assert_eq!(model.d, 2);
    assert!(model.variance_fractions[2..].iter().all(|&f| f < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_conserved(seed in any::<u64>(), m in 4usize..13, n in 2usize..7) {
        let mut rng = SplitMix64::new(seed);
        let b = random_matrix(&mut rng, m, n);
        let (cov, _) = covariance(&b, true).unwrap();
        let trace: f64 = (0..n).map(|i| cov[(i, i)]).sum();
        let model = fit_pca_with(&b, &options(true)).unwrap();
        let total: f64 = model.eigenvalues.iter().sum();
        prop_assert!((total - trace).abs() <= 1e-12 * trace.max(1.0));
        prop_assert!((model.variance_fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_invariants_hold(seed in any::<u64>(), m in 4usize..13, n in 2usize..7, t in 0.5f64..1.0) {
        let mut rng = SplitMix64::new(seed);
        let b = random_matrix(&mut rng, m, n);
        let model = fit_pca_with(&b, &PcaOptions { variance_threshold: t, center: true }).unwrap();
        prop_assert!(model.variance_fractions.windows(2).all(|w| w[0] >= w[1]));
        for p in 0..model.d {
            let s: f64 = model.w.column(p).iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(model.w.column(p).iter().all(|&x| x >= 0.0));
        }
        let cumulative: f64 = model.lambda.iter().sum();
        prop_assert!(cumulative >= t - 1e-12);
        let before: f64 = model.lambda[..model.d - 1].iter().sum();
        prop_assert!(before < t - 1e-12);
    }
}
