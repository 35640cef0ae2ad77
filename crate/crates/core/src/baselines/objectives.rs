use crate::metric::MetricInstance;
use crate::problem::Clustering;

/// Sum over clusters of the ordered-pair distance total divided by cluster size.
pub fn objective_cost(c: &Clustering, metric: &MetricInstance) -> f64 {
    pairwise(c, |i, j| metric.dist(i, j))
}

/// Pairwise k-means objective: like [`objective_cost`] with squared distances.
pub fn objective_kmeans(c: &Clustering, metric: &MetricInstance) -> f64 {
    pairwise(c, |i, j| metric.dist(i, j).powi(2))
}

/// Centroid form `Σ_t Σ_{x∈C_t} ‖x − μ_t‖²`. The pairwise form is exactly twice this.
pub fn objective_kmeans_centroid(c: &Clustering, rows: &[Vec<f64>]) -> f64 {
    c.nonempty_clusters()
        .map(|cl| {
            let mu = centroid(cl.iter().map(|&i| rows[i].as_slice()));
            cl.iter().map(|&i| squared_euclidean(&rows[i], &mu)).sum::<f64>()
        })
        .sum()
}

/// `Σ_t min_{m∈C_t} Σ_{i∈C_t} d(i, m)`.
pub fn objective_kmedoids(c: &Clustering, metric: &MetricInstance) -> f64 {
    c.nonempty_clusters()
        .map(|cl| cl.iter().map(|&m| cl.iter().map(|&i| metric.dist(i, m)).sum::<f64>()).fold(f64::INFINITY, f64::min))
        .sum()
}

fn pairwise(c: &Clustering, d: impl Fn(usize, usize) -> f64) -> f64 {
    c.nonempty_clusters()
        .map(|cl| {
            let total: f64 = cl.iter().flat_map(|&i| cl.iter().map(move |&j| (i, j))).map(|(i, j)| d(i, j)).sum();
            total / cl.len() as f64
        })
        .sum()
}

pub(crate) fn centroid<'a>(points: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for p in points {
        if sum.is_empty() {
            sum = vec![0.0; p.len()];
        }
        for (s, x) in sum.iter_mut().zip(p) {
            *s += x;
        }
        count += 1;
    }
    sum.iter_mut().for_each(|s| *s /= count as f64);
    sum
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
