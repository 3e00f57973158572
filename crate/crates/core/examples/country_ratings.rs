// End-to-end run on the 30-country sample: normalize, fit, cluster into
// seven categories and print the rating list.
//
//     cargo run --example country_ratings

use std::path::PathBuf;

use relarm::{fit_pipeline, load_dataset, FittedPipeline, PipelineConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn run_example() -> relarm::Result<FittedPipeline> {
    let config_path = fixture("countries_config.json");
    let config = PipelineConfig::load(&config_path)?;
    let raw = load_dataset(fixture("countries_raw.csv"), &config_path)?;
    let fitted = fit_pipeline(&raw, &config)?;

    println!(
        "{} components keep {:.1}% of the variance; Λ = {:.3?}",
        fitted.pca.d,
        100.0 * fitted.pca.lambda.iter().sum::<f64>(),
        fitted.pca.lambda
    );
    let mut clusters = fitted.ratings.clusters.clone();
    clusters.sort_by_key(|c| c.rank);
    for c in &clusters {
        let members: Vec<&str> = fitted
            .ratings
            .objects
            .iter()
            .filter(|o| o.cluster == c.cluster)
            .map(|o| o.object.as_str())
            .collect();
        println!("{:>4}  PR = {:.4}  {}", c.category, c.projection, members.join(", "));
    }
    Ok(fitted)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
