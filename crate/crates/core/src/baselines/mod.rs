//! Classical baselines (k-means++ and k-medoids) and the accuracy objectives
//! used to compare them against fair clusterings.

mod kmeans;
mod kmedoids;
mod objectives;

pub use kmeans::kmeans_pp;
pub use kmedoids::kmedoids;
pub use objectives::{objective_cost, objective_kmeans, objective_kmeans_centroid, objective_kmedoids};

use crate::error::{Error, Result};

/// Settings for one randomized baseline run. Equal settings give equal output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeededRun {
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the objective improves by at most this fraction.
    pub tolerance: f64,
}

impl SeededRun {
    pub fn new(seed: u64) -> Self {
        SeededRun { seed, max_iterations: 300, tolerance: 1e-6 }
    }
}

impl Default for SeededRun {
    fn default() -> Self {
        SeededRun::new(0)
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidProblem("no points to cluster".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidProblem(format!("k = {k} must lie in 1..={n}")));
    }
    Ok(())
}

/// Objectives may only go down between iterations, up to rounding.
fn assert_non_increasing(prev: f64, next: f64) {
    assert!(next <= prev + 1e-9 * prev.abs().max(1e-12), "objective increased from {prev} to {next}");
}

/// Refills empty clusters by moving, one at a time, the point farthest from
/// its own cluster's center (among clusters with at least two points) into
/// the empty one. Ties go to the lowest index.
fn repair_empty(labels: &mut [usize], k: usize, dist_to_own: impl Fn(usize, usize) -> f64) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut moved: Vec<usize> = Vec::new();
    for t in 0..k {
        if sizes[t] > 0 {
            continue;
        }
        let mut far: Option<(f64, usize)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 || moved.contains(&i) {
                continue;
            }
            let d = dist_to_own(i, l);
            if far.is_none_or(|(fd, _)| d > fd) {
                far = Some((d, i));
            }
        }
        let (_, i) = far.expect("k <= n leaves a cluster with two points");
        sizes[labels[i]] -= 1;
        labels[i] = t;
        sizes[t] = 1;
        moved.push(i);
    }
}
