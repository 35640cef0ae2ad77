use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{assert_non_increasing, check_k, SeededRun};
use crate::error::Result;
use crate::metric::MetricInstance;
use crate::problem::Clustering;

/// Alternating k-medoids: random distinct initial medoids, then assign every
/// agent to its nearest medoid and move each medoid to the member minimizing
/// the in-cluster distance sum, until the medoids stop changing.
///
/// Medoids always stay in their own cluster, so no cluster ever empties.
/// Assignment ties go to the lowest slot; update ties keep the current medoid,
/// then prefer the lowest index.
pub fn kmedoids(metric: &MetricInstance, k: usize, run: &SeededRun) -> Result<Clustering> {
    let n = metric.n();
    check_k(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut medoids: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();

    let mut labels = vec![0usize; n];
    let mut prev = f64::INFINITY;
    for _ in 0..run.max_iterations.max(1) {
        assign(metric, &medoids, &mut labels);
        let mut obj = 0.0;
        let mut next = medoids.clone();
        for (t, m) in next.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == t).collect();
            let total = |c: usize| members.iter().map(|&i| metric.dist(i, c)).sum::<f64>();
            let mut best = (total(*m), *m);
            for &c in &members {
                let s = total(c);
                if s < best.0 {
                    best = (s, c);
                }
            }
            *m = best.1;
            obj += best.0;
        }
        assert_non_increasing(prev, obj);
        prev = obj;
        if next == medoids {
            break;
        }
        medoids = next;
    }
    assign(metric, &medoids, &mut labels);
    Clustering::from_labels(k, &labels)
}

fn assign(metric: &MetricInstance, medoids: &[usize], labels: &mut [usize]) {
    for (i, l) in labels.iter_mut().enumerate() {
        *l = match medoids.iter().position(|&m| m == i) {
            Some(t) => t,
            None => {
                let mut best = 0;
                for t in 1..medoids.len() {
                    if metric.dist(i, medoids[t]) < metric.dist(i, medoids[best]) {
                        best = t;
                    }
                }
                best
            }
        };
    }
}
