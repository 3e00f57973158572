// Seeded k-means++ on three planted blobs, then the same seed again to show
// the run is reproducible.
//
//     cargo run --example kmeans_clustering

use relarm::rng::SplitMix64;
use relarm::{kmeans, ClusteringResult, KMeansParams, Matrix};

pub fn run_example() -> relarm::Result<ClusteringResult> {
    let mut rng = SplitMix64::new(11);
    let anchors = [[0.1, 0.1], [0.5, 0.9], [0.9, 0.2]];
    let mut rows = Vec::new();
    for anchor in anchors {
        for _ in 0..20 {
            rows.push([
                anchor[0] + 0.01 * (rng.next_f64() - 0.5),
                anchor[1] + 0.01 * (rng.next_f64() - 0.5),
            ]);
        }
    }
    let points = Matrix::from_rows(&rows)?;
    let params = KMeansParams::new(3, 2016);
    let result = kmeans(&points, &params)?;
    println!(
        "SSE {:.6} after {} iterations (best of {} restarts: #{})",
        result.sse, result.iterations, result.restarts_used, result.best_restart
    );
    for (q, c) in result.centers.rows().enumerate() {
        println!("cluster {}: center {c:.3?}, {} points", q + 1, result.cluster_sizes()[q]);
    }
    let again = kmeans(&points, &params)?;
    println!("identical on rerun: {}", again == result);
    Ok(result)
}

#[allow(dead_code)]
fn main() -> relarm::Result<()> {
    run_example().map(|_| ())
}
