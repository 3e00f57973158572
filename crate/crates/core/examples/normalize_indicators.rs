// Direction-aware min-max scaling: the two worked values for Russia and the
// full country matrix compared against the published normalized table.
//
//     cargo run --example normalize_indicators

use std::path::PathBuf;

use relarm::normalize::normalize_value;
use relarm::{load_dataset, normalize_dataset, Direction, NormalizedMatrix};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn run_example() -> relarm::Result<NormalizedMatrix> {
    let wef = normalize_value(4.44, 3.3, 5.76, Direction::Positive);
    let inflation = normalize_value(7.5, -1.3, 180.9, Direction::Negative);
    println!("Russia, competitiveness index 4.44 (positive) -> {wef:.4}");
    println!("Russia, inflation 7.5% (negative)            -> {inflation:.4}");

    let config_path = fixture("countries_config.json");
    let raw = load_dataset(fixture("countries_raw.csv"), &config_path)?;
    let b = normalize_dataset(&raw)?;

    let published = load_dataset(fixture("countries_normalized.csv"), &config_path)?;
    let worst = b
        .values
        .as_slice()
        .iter()
        .zip(published.values().as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!(
        "normalized {}×{} matrix; largest deviation from the published table: {worst:.4}",
        b.nrows(),
        b.ncols()
    );
    for w in &b.warnings {
        println!("warning: {w}");
    }
    Ok(b)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
