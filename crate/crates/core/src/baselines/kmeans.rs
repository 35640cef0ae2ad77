use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::objectives::{centroid, squared_euclidean};
use super::{assert_non_increasing, check_k, repair_empty, SeededRun};
use crate::error::{Error, Result};
use crate::problem::Clustering;

/// k-means++: D²-weighted seeding followed by Lloyd iterations.
pub fn kmeans_pp(rows: &[Vec<f64>], k: usize, run: &SeededRun) -> Result<Clustering> {
    check_k(rows.len(), k)?;
    let dim = rows[0].len();
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::DimensionMismatch { row, expected: dim, found: r.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut centers = seed_centers(rows, k, &mut rng);

    let mut labels = vec![0usize; rows.len()];
    let mut prev = f64::INFINITY;
    for _ in 0..run.max_iterations.max(1) {
        let changed = assign(rows, &centers, &mut labels);
        repair_empty(&mut labels, k, |i, t| squared_euclidean(&rows[i], &centers[t]));
        for (t, c) in centers.iter_mut().enumerate() {
            *c = centroid(rows.iter().zip(&labels).filter(|&(_, &l)| l == t).map(|(r, _)| r.as_slice()));
        }
        let obj: f64 = rows.iter().zip(&labels).map(|(r, &l)| squared_euclidean(r, &centers[l])).sum();
        assert_non_increasing(prev, obj);
        let converged = !changed || (prev.is_finite() && prev - obj <= run.tolerance * prev);
        prev = obj;
        if converged {
            break;
        }
    }
    Clustering::from_labels(k, &labels)
}

fn seed_centers(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = rows.iter().map(|r| squared_euclidean(r, &rows[chosen[0]])).collect();
    while chosen.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point coincides with a center: pick uniformly among the rest
            Err(_) => {
                let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                rest[rng.gen_range(0..rest.len())]
            }
        };
        chosen.push(next);
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(squared_euclidean(r, &rows[next]));
        }
    }
    chosen.into_iter().map(|i| rows[i].clone()).collect()
}

/// Nearest center for every row, ties to the lowest slot. Returns whether any label changed.
fn assign(rows: &[Vec<f64>], centers: &[Vec<f64>], labels: &mut [usize]) -> bool {
    let mut changed = false;
    for (r, l) in rows.iter().zip(labels.iter_mut()) {
        let mut best = (f64::INFINITY, 0);
        for (t, c) in centers.iter().enumerate() {
            let d = squared_euclidean(r, c);
            if d < best.0 {
                best = (d, t);
            }
        }
        changed |= *l != best.1;
        *l = best.1;
    }
    changed
}
