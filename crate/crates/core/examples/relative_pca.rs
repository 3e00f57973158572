// Principal components of the normalized country matrix, the ranking
// matrix W, the rating vector Λ, and one country's relative attributes.
// Also runs the arithmetic self-check on the published W and Λ tables.
//
//     cargo run --example relative_pca

use std::path::PathBuf;

use relarm::attributes::explain_object;
use relarm::pca::LambdaFixture;
use relarm::{fit_pca, load_dataset, normalize_dataset, verify_fixture_w, Matrix, PcaModel};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read_table(name: &str) -> Matrix {
    let mut reader = csv::Reader::from_path(fixture(name)).expect("fixture exists");
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.expect("valid csv").iter().map(|v| v.parse().expect("number")).collect())
        .collect();
    Matrix::from_rows(&rows).expect("rectangular table")
}

pub fn run_example() -> relarm::Result<PcaModel> {
    let config = fixture("countries_config.json");
    let b = normalize_dataset(&load_dataset(fixture("countries_raw.csv"), &config)?)?;
    let model = fit_pca(&b, 0.95)?;

    println!("variance fractions: {:.4?}", model.variance_fractions);
    println!("d = {} (cumulative {:.4})", model.d, model.lambda.iter().sum::<f64>());
    println!("W (rows = indicators):");
    for (name, row) in b.indicator_names().iter().zip(model.w.rows()) {
        println!("  {name:<22} {row:.4?}");
    }

    let russia = b.objects.iter().position(|o| o == "Russia").expect("Russia in sample");
    for attr in explain_object(&b, &model, russia)? {
        println!(
            "Russia, main attribute {}: r = {:.4}",
            attr.component_index + 1,
            attr.l1_norm()
        );
    }

    let w = read_table("published_w.csv");
    let lambda = read_table("published_lambda.csv");
    let report = verify_fixture_w(
        &w,
        Some(LambdaFixture {
            values: lambda.row(0),
            expected_sum: 0.96,
        }),
    )?;
    println!("published W column sums: {:.4?}", report.column_sums);
    println!("published Λ sum: {:.4}", report.lambda_sum.unwrap_or_default());
    Ok(model)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
