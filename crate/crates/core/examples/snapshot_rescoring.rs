// Fits the country model, saves the snapshot, reloads it and rates two new
// objects without refitting.
//
//     cargo run --example snapshot_rescoring

use std::path::PathBuf;

use relarm::dataset::parse_dataset;
use relarm::{fit_pipeline, load_dataset, ModelSnapshot, PipelineConfig, RatingResult};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn run_example() -> relarm::Result<RatingResult> {
    let config_path = fixture("countries_config.json");
    let config = PipelineConfig::load(&config_path)?;
    let raw = load_dataset(fixture("countries_raw.csv"), &config_path)?;
    let fitted = fit_pipeline(&raw, &config)?;

    let dir = std::env::temp_dir().join(format!("relarm-snapshot-{}", std::process::id()));
    let path = dir.join("model.json");
    relarm::io::write_file(&path, fitted.snapshot().to_json())?;
    let snapshot = ModelSnapshot::load(&path)?;
    let _ = std::fs::remove_dir_all(&dir);

    // a strong and a weak hypothetical sovereign
    let new_objects = "\
country,GDP growth,WEF competitiveness,GDP per capita,Government debt/GDP,Budget balance/GDP,Inflation level,Inflation volatility,(CAB+FDI)/GDP,Reserves
Atlantis,2.5,5.6,70000,30,2.0,0.5,0.5,9.0,400
Erewhon,-1.0,3.4,4000,120,-9.0,60,25,-6.0,2
";
    let fresh = parse_dataset(new_objects, &snapshot.indicators)?;
    let rated = snapshot.score(&fresh)?;
    for o in &rated.objects {
        println!("{:<10} {:>4}  (cluster {}, PR {:.4})", o.object, o.category, o.cluster + 1, o.projection);
    }

    let replay = snapshot.score(&raw)?;
    println!("training objects re-rated identically: {}", replay.objects == fitted.ratings.objects);
    Ok(rated)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
