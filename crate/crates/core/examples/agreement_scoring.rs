// Scores the published model categories against agency ratings, collapsing
// subcategories (AA+, Baa2, ...) onto the seven-category scale.
//
//     cargo run --example agreement_scoring

use std::fs;
use std::path::PathBuf;

use relarm::rating::{parse_rating_list, parse_reference, AgreementReport, CollapseTable};
use relarm::{score_agreement, RatingScale};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn run_example() -> relarm::Result<AgreementReport> {
    let read = |name: &str| fs::read_to_string(fixture(name)).expect("fixture exists");
    let model = parse_rating_list(&read("published_ratings.csv"))?;
    let reference = parse_reference(&read("agency_reference.csv"))?;
    let report = score_agreement(&model, &reference, &CollapseTable::default(), &RatingScale::standard())?;
    for o in report.objects.iter().filter(|o| o.matched == Some(false)) {
        let seen: Vec<String> = o
            .agencies
            .iter()
            .map(|a| format!("{} {}", a.agency, a.reported))
            .collect();
        println!("miss: {} rated {} vs {}", o.object, o.model_category, seen.join(", "));
    }
    println!("{}", report.status);
    println!("{}", report.footer);
    Ok(report)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
