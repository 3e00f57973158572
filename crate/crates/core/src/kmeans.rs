//! k-means clustering: k-means++ seeding followed by Lloyd iterations, best
//! of several seeded restarts.
//!
//! Points are first put in a canonical (lexicographic) order, so the result
//! depends only on the set of points, not on the order they were supplied.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{RelarmError, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: usize,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            restarts: crate::config::DEFAULT_RESTARTS,
            max_iterations: crate::config::DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    /// Cluster of each point, 0-based, in input order.
    pub assignments: Vec<usize>,
    /// k×d cluster centers.
    pub centers: Matrix,
    pub sse: f64,
    pub restarts_used: usize,
    /// Restart that produced this partition.
    pub best_restart: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
}

impl ClusteringResult {
    pub fn k(&self) -> usize {
        self.centers.nrows()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    /// Renames cluster `q` to `perm[q]`, reordering centers to match.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let k = self.k();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(RelarmError::InvalidDataset(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        let mut centers = Matrix::zeros(k, self.centers.ncols());
        for (q, &p) in perm.iter().enumerate() {
            centers.row_mut(p).copy_from_slice(self.centers.row(q));
        }
        Ok(Self {
            assignments: self.assignments.iter().map(|&a| perm[a]).collect(),
            centers,
            ..self.clone()
        })
    }

    pub fn centers_csv(&self) -> String {
        let headers: Vec<String> = (1..=self.centers.ncols()).map(|p| format!("r{p}")).collect();
        let labels: Vec<String> = (1..=self.k()).map(|q| q.to_string()).collect();
        crate::io::labeled_matrix_csv("cluster", &headers, &labels, &self.centers)
    }

    pub fn assignments_csv(&self, objects: &[String]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["object", "cluster"]).expect("in-memory write");
        for (id, &a) in objects.iter().zip(&self.assignments) {
            w.write_record([id.as_str(), &(a + 1).to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// One Lloyd descent from given initial centers.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub assignments: Vec<usize>,
    pub centers: Matrix,
    /// SSE after every center update, first entry after the initial one.
    pub sse_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl LloydRun {
    pub fn sse(&self) -> f64 {
        *self.sse_history.last().expect("at least one update")
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub fn distinct_point_count(points: &Matrix) -> usize {
    let mut rows: Vec<&[f64]> = points.rows().collect();
    rows.sort_by(|a, b| lexicographic(a, b));
    rows.dedup_by(|a, b| lexicographic(a, b).is_eq());
    rows.len()
}

pub fn total_sse(points: &Matrix, centers: &Matrix, assignments: &[usize]) -> f64 {
    points
        .rows()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, centers.row(a)))
        .sum()
}

/// Index of the closest center, lowest index on ties.
pub fn nearest_center(point: &[f64], centers: &Matrix) -> usize {
    nearest(point, centers, None)
}

/// Nearest center; ties go to `current` when it is among the closest,
/// otherwise to the lowest index.
fn nearest(point: &[f64], centers: &Matrix, current: Option<usize>) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (q, c) in centers.rows().enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best = q;
            best_d = d;
        }
    }
    match current {
        Some(cur) if squared_distance(point, centers.row(cur)) <= best_d => cur,
        _ => best,
    }
}

fn assign(points: &Matrix, centers: &Matrix, previous: Option<&[usize]>) -> Vec<usize> {
    points
        .rows()
        .enumerate()
        .map(|(i, p)| nearest(p, centers, previous.map(|a| a[i])))
        .collect()
}

/// Gives every empty cluster the point lying farthest from its center,
/// taken from a cluster that keeps at least one member.
fn repair_empty(points: &Matrix, centers: &mut Matrix, assignments: &mut [usize]) {
    let k = centers.nrows();
    let mut sizes = vec![0usize; k];
    for &a in assignments.iter() {
        sizes[a] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut pick: Option<(usize, f64)> = None;
        for (i, p) in points.rows().enumerate() {
            let a = assignments[i];
            if sizes[a] < 2 {
                continue;
            }
            let d = squared_distance(p, centers.row(a));
            if pick.is_none_or(|(_, best)| d > best) {
                pick = Some((i, d));
            }
        }
        let Some((i, _)) = pick else { return };
        sizes[assignments[i]] -= 1;
        assignments[i] = empty;
        sizes[empty] = 1;
        centers.row_mut(empty).copy_from_slice(points.row(i));
    }
}

fn cluster_means(points: &Matrix, assignments: &[usize], k: usize) -> Matrix {
    let d = points.ncols();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (p, &a) in points.rows().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums.row_mut(a).iter_mut().zip(p) {
            *s += x;
        }
    }
    for (q, &c) in counts.iter().enumerate() {
        if c > 0 {
            for s in sums.row_mut(q) {
                *s /= c as f64;
            }
        }
    }
    sums
}

/// Lloyd's algorithm: alternate nearest-center assignment and mean updates
/// until the assignment stops changing or `max_iterations` updates ran.
pub fn lloyd(points: &Matrix, initial_centers: &Matrix, max_iterations: usize) -> Result<LloydRun> {
    let k = initial_centers.nrows();
    if k == 0 || k > points.nrows() {
        return Err(RelarmError::Config(format!(
            "need 1 ≤ k ≤ {} points, got k = {k}",
            points.nrows()
        )));
    }
    if initial_centers.ncols() != points.ncols() {
        return Err(RelarmError::DimensionMismatch {
            context: "initial centers",
            expected: points.ncols(),
            found: initial_centers.ncols(),
        });
    }
    let mut centers = initial_centers.clone();
    let mut assignments = assign(points, &centers, None);
    repair_empty(points, &mut centers, &mut assignments);
    centers = cluster_means(points, &assignments, k);
    let mut sse_history = vec![total_sse(points, &centers, &assignments)];
    let mut iterations = 1;
    let mut converged = false;

    while iterations < max_iterations.max(1) {
        let mut next = assign(points, &centers, Some(&assignments));
        repair_empty(points, &mut centers, &mut next);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
        centers = cluster_means(points, &assignments, k);
        sse_history.push(total_sse(points, &centers, &assignments));
        iterations += 1;
    }
    if !converged {
        // the cap may land exactly on a fixed point
        converged = assign(points, &centers, Some(&assignments)) == assignments;
    }
    Ok(LloydRun {
        assignments,
        centers,
        sse_history,
        iterations,
        converged,
    })
}

/// k-means++ seeding: first center uniform, each next one drawn with
/// probability proportional to squared distance from the nearest chosen center.
pub fn kmeans_plus_plus(points: &Matrix, k: usize, rng: &mut SplitMix64) -> Result<Matrix> {
    let m = points.nrows();
    if k == 0 || m == 0 {
        return Err(RelarmError::Config("k-means++ needs k ≥ 1 and at least one point".into()));
    }
    let mut centers = Matrix::zeros(k, points.ncols());
    let first = rng.below(m);
    centers.row_mut(0).copy_from_slice(points.row(first));
    let mut d2: Vec<f64> = points
        .rows()
        .map(|p| squared_distance(p, centers.row(0)))
        .collect();

    for c in 1..k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            return Err(RelarmError::Config(format!(
                "k = {k} exceeds the number of distinct points"
            )));
        }
        let target = rng.next_f64() * total;
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (i, w) in d2.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            cumulative += w;
            chosen = Some(i);
            if cumulative > target {
                break;
            }
        }
        let chosen = chosen.expect("positive total weight");
        centers.row_mut(c).copy_from_slice(points.row(chosen));
        for (i, p) in points.rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, centers.row(c)));
        }
    }
    Ok(centers)
}

/// Best-of-`restarts` k-means. Restart `r` draws from
/// `SplitMix64::for_stream(seed, r)`; the lowest SSE wins, ties going to the
/// earliest restart.
pub fn kmeans(points: &Matrix, params: &KMeansParams) -> Result<ClusteringResult> {
    let KMeansParams {
        k,
        seed,
        restarts,
        max_iterations,
    } = *params;
    if k < 1 {
        return Err(RelarmError::Config("k must be at least 1".into()));
    }
    if restarts < 1 {
        return Err(RelarmError::Config("restarts must be at least 1".into()));
    }
    let distinct = distinct_point_count(points);
    if k > distinct {
        return Err(RelarmError::Config(format!(
            "k = {k} exceeds the number of distinct points ({distinct})"
        )));
    }

    let m = points.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| lexicographic(points.row(a), points.row(b)));
    let mut canonical = Matrix::zeros(m, points.ncols());
    for (dst, &src) in order.iter().enumerate() {
        canonical.row_mut(dst).copy_from_slice(points.row(src));
    }

    let mut best: Option<(usize, LloydRun)> = None;
    for r in 0..restarts {
        let mut rng = SplitMix64::for_stream(seed, r as u64);
        let init = kmeans_plus_plus(&canonical, k, &mut rng)?;
        let run = lloyd(&canonical, &init, max_iterations)?;
        if best.as_ref().is_none_or(|(_, b)| run.sse() < b.sse()) {
            best = Some((r, run));
        }
    }
    let (best_restart, run) = best.expect("restarts ≥ 1");

    let mut assignments = vec![0; m];
    for (dst, &src) in order.iter().enumerate() {
        assignments[src] = run.assignments[dst];
    }
    Ok(ClusteringResult {
        assignments,
        sse: run.sse(),
        centers: run.centers,
        restarts_used: restarts,
        best_restart,
        seed,
        iterations: run.iterations,
        converged: run.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> Matrix {
        Matrix::from_row_major(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn two_blobs_on_a_line() {
        let pts = column(&[0.0, 0.1, 0.9, 1.0]);
        let res = kmeans(&pts, &KMeansParams::new(2, 1)).unwrap();
        let mut centers = res.centers.column(0);
        centers.sort_by(f64::total_cmp);
        assert!((centers[0] - 0.05).abs() < 1e-12);
        assert!((centers[1] - 0.95).abs() < 1e-12);
        assert!((res.sse - 0.01).abs() < 1e-12);
        assert_eq!(res.assignments[0], res.assignments[1]);
        assert_ne!(res.assignments[1], res.assignments[2]);
    }

    #[test]
    fn k_equals_m_gives_zero_sse() {
        let pts = Matrix::from_rows(&[[0.0, 1.0], [0.3, 0.2], [0.9, 0.9], [0.5, 0.5]]).unwrap();
        let res = kmeans(&pts, &KMeansParams::new(4, 3)).unwrap();
        assert_eq!(res.sse, 0.0);
        let mut labels = res.assignments.clone();
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn invalid_k() {
        let pts = column(&[0.0, 0.0, 1.0]);
        assert!(kmeans(&pts, &KMeansParams::new(0, 0)).is_err());
        assert!(kmeans(&pts, &KMeansParams::new(3, 0)).is_err());
        let mut p = KMeansParams::new(1, 0);
        p.restarts = 0;
        assert!(kmeans(&pts, &p).is_err());
    }

    #[test]
    fn duplicates_allowed_up_to_distinct_count() {
        let pts = column(&[0.0, 0.0, 0.0, 1.0, 1.0]);
        let res = kmeans(&pts, &KMeansParams::new(2, 9)).unwrap();
        assert_eq!(res.sse, 0.0);
        assert_eq!(res.cluster_sizes().iter().copied().max(), Some(3));
    }

    #[test]
    fn repair_fills_empty_clusters() {
        // both initial centers far to the right: cluster 1 starts empty
        let pts = column(&[0.0, 0.1, 0.2, 5.0]);
        let init = column(&[10.0, 11.0]);
        let run = lloyd(&pts, &init, 300).unwrap();
        let mut sizes = [0; 2];
        for &a in &run.assignments {
            sizes[a] += 1;
        }
        assert!(sizes.iter().all(|&s| s > 0));
        assert!(run.converged);
    }

    #[test]
    fn relabel_checks_permutation() {
        let pts = column(&[0.0, 0.1, 0.9, 1.0]);
        let res = kmeans(&pts, &KMeansParams::new(2, 1)).unwrap();
        let swapped = res.relabeled(&[1, 0]).unwrap();
        assert_eq!(swapped.centers.row(0), res.centers.row(1));
        assert!(res.relabeled(&[0, 0]).is_err());
        assert!(res.relabeled(&[0]).is_err());
    }

    #[test]
    fn single_cluster() {
        let pts = column(&[1.0, 2.0, 3.0]);
        let res = kmeans(&pts, &KMeansParams::new(1, 0)).unwrap();
        assert_eq!(res.centers[(0, 0)], 2.0);
        assert!((res.sse - 2.0).abs() < 1e-12);
    }
}
