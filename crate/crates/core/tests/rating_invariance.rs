mod common;

use common::{country_fit, fixture, read_numeric_table};
use proptest::prelude::*;
use relarm::kmeans::ClusteringResult;
use relarm::rating::{bind_categories, parse_rating_list, parse_reference, CollapseTable};
use relarm::rng::SplitMix64;
use relarm::{assign_ratings, project_center, score_agreement, FittedPipeline, Matrix, RatingScale};

fn categories(r: &relarm::RatingResult) -> Vec<String> {
    r.objects.iter().map(|o| o.category.clone()).collect()
}

#[test]
fn scaling_lambda_keeps_categories() {
    let fitted = country_fit();
    let scale = fitted.scale();
    let base = categories(&fitted.ratings);
    for c in [0.1, 3.0, 100.0] {
        let lambda: Vec<f64> = fitted.pca.lambda.iter().map(|l| c * l).collect();
        let scaled = assign_ratings(&fitted.features.objects, &fitted.clustering, &lambda, &scale).unwrap();
        assert_eq!(categories(&scaled), base, "c = {c}");
    }
}

#[test]
fn relabeling_clusters_keeps_categories() {
    let fitted = country_fit();
    let scale = fitted.scale();
    let base = categories(&fitted.ratings);
    let mut rng = SplitMix64::new(12);
    for _ in 0..200 {
        let mut perm: Vec<usize> = (0..7).collect();
        for i in (1..7).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let relabeled = fitted.clustering.relabeled(&perm).unwrap();
        let ratings = assign_ratings(&fitted.features.objects, &relabeled, &fitted.pca.lambda, &scale).unwrap();
        assert_eq!(categories(&ratings), base, "perm {perm:?}");
    }
}

#[test]
fn flipping_any_component_sign_changes_nothing_downstream() {
    let fitted = country_fit();
    for k in 0..fitted.pca.n_indicators() {
        let flipped = fitted.pca.with_flipped_component(k).unwrap();
        let refit = FittedPipeline::from_pca(fitted.normalized.clone(), flipped, &fitted.config).unwrap();
        assert_eq!(refit.pca.w_csv(), fitted.pca.w_csv());
        assert_eq!(refit.pca.lambda_csv(), fitted.pca.lambda_csv());
        assert_eq!(refit.features.to_csv(), fitted.features.to_csv());
        assert_eq!(refit.clustering, fitted.clustering);
        assert_eq!(refit.ratings.to_csv(), fitted.ratings.to_csv());
        assert_eq!(refit.ratings, fitted.ratings);
    }
}

#[test]
fn published_centers_project_onto_published_lambda() {
    let centers = read_numeric_table("published_centers.csv", 1);
    let lambda = read_numeric_table("published_lambda.csv", 0);
    // exact rational products of the published digits
    let expected = [0.30782953, 0.12225569, 0.60324984, 0.4430439, 0.47807695, 0.7539509, 0.61191008];
    let projections: Vec<f64> = centers
        .rows()
        .map(|c| project_center(c, lambda.row(0)).unwrap())
        .collect();
    for (p, e) in projections.iter().zip(expected) {
        assert!((p - e).abs() < 1e-12, "{p} vs {e}");
    }
    let scale = RatingScale::standard();
    let (rank, ties) = bind_categories(&projections, &scale).unwrap();
    assert!(ties.is_empty());
    let labels: Vec<&str> = rank.iter().map(|&r| scale.labels()[r].as_str()).collect();
    assert_eq!(labels, ["B", "CCC", "A", "BB", "BBB", "AAA", "AA"]);
}

#[test]
fn equal_projections_are_flagged_and_ordered_by_index() {
    let scale = RatingScale::new(["hi", "mid", "lo"]).unwrap();
    let (rank, ties) = bind_categories(&[0.2, 0.5, 0.2], &scale).unwrap();
    assert_eq!(rank, vec![1, 0, 2]);
    assert_eq!(ties, vec![(0, 2)]);
}

#[test]
fn reference_reconstruction_agrees_with_published_flags() {
    let read = |n: &str| std::fs::read_to_string(fixture(n)).unwrap();
    let model = parse_rating_list(&read("published_ratings.csv")).unwrap();
    let reference = parse_reference(&read("agency_reference.csv")).unwrap();
    let report = score_agreement(&model, &reference, &CollapseTable::default(), &RatingScale::standard()).unwrap();
    let mut flags = csv::Reader::from_path(fixture("agency_match_flags.csv")).unwrap();
    let agencies: Vec<String> = flags.headers().unwrap().iter().skip(1).map(str::to_owned).collect();
    let mut rows = 0;
    for record in flags.records() {
        let record = record.unwrap();
        let object = report.objects.iter().find(|o| o.object == record[0]).unwrap();
        for (agency, flag) in agencies.iter().zip(record.iter().skip(1)) {
            let cmp = object.agencies.iter().find(|a| &a.agency == agency).unwrap();
            let expected = match flag {
                "+" => Some(true),
                "-" => Some(false),
                _ => None,
            };
            assert_eq!(cmp.matches, expected, "{} / {agency}", object.object);
        }
        rows += 1;
    }
    assert_eq!(rows, 30);
}

fn clustering_from_centers(centers: Matrix) -> ClusteringResult {
    let k = centers.nrows();
    ClusteringResult {
        assignments: (0..k).collect(),
        centers,
        sse: 0.0,
        restarts_used: 1,
        best_restart: 0,
        seed: 0,
        iterations: 1,
        converged: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dominating_centers_never_rate_worse(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = SplitMix64::new(seed);
        let lambda: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
        let low: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
        let high: Vec<f64> = low.iter().map(|&x| x + (1.0 - x) * rng.next_f64()).collect();
        let other: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
        let centers = Matrix::from_rows(&[low, high, other]).unwrap();
        let objects: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let scale = RatingScale::new(["A", "B", "C"]).unwrap();
        let r = assign_ratings(&objects, &clustering_from_centers(centers), &lambda, &scale).unwrap();
        prop_assert!(r.clusters[1].rank <= r.clusters[0].rank);
    }

    #[test]
    fn categories_form_a_bijection(seed in any::<u64>(), k in 1usize..8) {
        let mut rng = SplitMix64::new(seed);
        let projections: Vec<f64> = (0..k).map(|_| (rng.below(4)) as f64).collect();
        let labels: Vec<String> = (0..k).map(|i| format!("L{i}")).collect();
        let (rank, ties) = bind_categories(&projections, &RatingScale::new(labels).unwrap()).unwrap();
        let mut sorted = rank.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..k).collect::<Vec<_>>());
        for a in 0..k {
            for b in 0..k {
                if projections[a] > projections[b] {
                    prop_assert!(rank[a] < rank[b]);
                }
            }
        }
        for &(a, b) in &ties {
            prop_assert!(a < b && projections[a] == projections[b] && rank[a] < rank[b]);
        }
    }
}
