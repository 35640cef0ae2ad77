//! Distance matrices over agents.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::Agent;

/// A symmetric matrix of nonnegative extended distances over `n` agents.
///
/// Construction only checks the matrix shape and that every entry is a valid
/// [`ExtReal`]; the metric axioms are diagnosed by [`validate_metric`].
/// Cloning is cheap, the matrix is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    n: usize,
    dist: Arc<[f64]>,
    positions: Option<Arc<[f64]>>,
}

impl MetricInstance {
    /// Builds an instance from a square matrix of raw distances (`f64::INFINITY` for INF).
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { row: i, expected: n, found: row.len() });
            }
            for (j, v) in row.into_iter().enumerate() {
                if ExtReal::new(v).is_none() {
                    return Err(Error::InvalidDistance { i, j, value: v });
                }
                dist.push(v);
            }
        }
        Ok(MetricInstance { n, dist: dist.into(), positions: None })
    }

    /// Builds the line metric `|x_i - x_j|`.
    ///
    /// Positions may be `±inf`; such agents are detached and sit at INF
    /// distance from every other agent.
    pub fn from_line(positions: &[f64]) -> Result<Self> {
        if let Some((i, &p)) = positions.iter().enumerate().find(|(_, p)| p.is_nan()) {
            return Err(Error::InvalidDistance { i, j: i, value: p });
        }
        let n = positions.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (a, b) = (positions[i], positions[j]);
                    dist[i * n + j] = if a.is_infinite() || b.is_infinite() { f64::INFINITY } else { (a - b).abs() };
                }
            }
        }
        Ok(MetricInstance { n, dist: dist.into(), positions: Some(positions.into()) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw distance; `f64::INFINITY` encodes INF.
    #[inline]
    pub fn dist(&self, i: Agent, j: Agent) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn distance(&self, i: Agent, j: Agent) -> ExtReal {
        ExtReal::from_f64_unchecked(self.dist(i, j))
    }

    #[inline]
    pub fn row(&self, i: Agent) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// One-dimensional coordinates, when the instance lives on a line.
    pub fn positions(&self) -> Option<&[f64]> {
        self.positions.as_deref()
    }

    /// Multiplies every finite distance (and position) by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {c}")));
        }
        let dist: Vec<f64> = self.dist.iter().map(|d| d * c).collect();
        let positions = self.positions.as_ref().map(|p| p.iter().map(|x| x * c).collect());
        Ok(MetricInstance { n: self.n, dist: dist.into(), positions })
    }

    /// Relabels agents: agent `i` of the result is agent `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[Agent]) -> Self {
        let n = self.n;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.dist(perm[i], perm[j]);
            }
        }
        let positions = self.positions.as_ref().map(|p| perm.iter().map(|&i| p[i]).collect());
        MetricInstance { n, dist: dist.into(), positions }
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

/// A violated metric axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NonzeroDiagonal { i: Agent, value: f64 },
    Asymmetric { i: Agent, j: Agent },
    Triangle { i: Agent, j: Agent, k: Agent },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MetricViolation::NonzeroDiagonal { i, value } => write!(f, "d({i},{i}) = {value} != 0"),
            MetricViolation::Asymmetric { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            MetricViolation::Triangle { i, j, k } => {
                write!(f, "d({i},{j}) > d({i},{k}) + d({k},{j})")
            }
        }
    }
}

/// Lists every violated metric axiom; empty iff `m` is a metric.
///
/// Symmetry violations are reported once per unordered pair `i < j`, and
/// triangle violations once per ordered pair `i < j` (first offending `k`).
pub fn validate_metric(m: &MetricInstance) -> Vec<MetricViolation> {
    let n = m.n();
    let mut out = Vec::new();
    for i in 0..n {
        let v = m.dist(i, i);
        if v != 0.0 {
            out.push(MetricViolation::NonzeroDiagonal { i, value: v });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m.dist(i, j) != m.dist(j, i) {
                out.push(MetricViolation::Asymmetric { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let dij = m.dist(i, j);
            // Relative slack absorbs rounding in metrics computed from coordinates.
            if let Some(k) = (0..n).find(|&k| {
                let via = m.dist(i, k) + m.dist(k, j);
                dij > via + 1e-12 * via.max(1.0)
            }) {
                out.push(MetricViolation::Triangle { i, j, k });
            }
        }
    }
    out
}

/// Euclidean distances between feature vectors. One-dimensional input also
/// records the coordinates as line positions.
pub fn metric_from_points(rows: &[Vec<f64>]) -> Result<MetricInstance> {
    let n = rows.len();
    let dim = rows.first().map_or(0, Vec::len);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch { row: r, expected: dim, found: row.len() });
        }
        if let Some(&v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDistance { i: r, j: r, value: v });
        }
    }
    if dim == 1 {
        let positions: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        return MetricInstance::from_line(&positions);
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(MetricInstance { n, dist: dist.into(), positions: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_matrix_is_a_metric() {
        let m = MetricInstance::from_matrix(vec![vec![0.0; 3]; 3]).unwrap();
        assert!(validate_metric(&m).is_empty());
    }

    #[test]
    fn asymmetry_is_reported() {
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[0][1] = 1.0;
        rows[1][0] = 2.0;
        let m = MetricInstance::from_matrix(rows).unwrap();
        let v = validate_metric(&m);
        assert!(v.contains(&MetricViolation::Asymmetric { i: 0, j: 1 }), "{v:?}");
        assert_eq!(v.iter().filter(|x| matches!(x, MetricViolation::Asymmetric { .. })).count(), 1);
    }

    #[test]
    fn line_metric_is_valid() {
        let m = MetricInstance::from_line(&[0.0, 1.0, 3.0]).unwrap();
        assert!(validate_metric(&m).is_empty());
        assert_eq!(m.dist(0, 2), 3.0);
    }

    #[test]
    fn detached_agents_are_at_inf() {
        let m = MetricInstance::from_line(&[0.0, 2.0, f64::INFINITY]).unwrap();
        assert!(m.distance(0, 2).is_inf());
        assert_eq!(m.dist(2, 2), 0.0);
        assert!(validate_metric(&m).is_empty());
    }

    #[test]
    fn triangle_violation_is_reported() {
        let rows = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let m = MetricInstance::from_matrix(rows).unwrap();
        assert_eq!(validate_metric(&m), vec![MetricViolation::Triangle { i: 0, j: 2, k: 1 }]);
    }

    #[test]
    fn points_examples() {
        let m = metric_from_points(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(m.to_matrix(), vec![vec![0.0, 0.0], vec![0.0, 0.0]]);

        let m = metric_from_points(&[vec![0.0], vec![3.0], vec![4.0]]).unwrap();
        assert_eq!(m.dist(0, 2), 4.0);
        assert_eq!(m.positions(), Some(&[0.0, 3.0, 4.0][..]));

        let m = metric_from_points(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.dist(0, 1), 5.0);
    }

    #[test]
    fn points_dimension_mismatch() {
        let err = metric_from_points(&[vec![0.0, 0.0], vec![3.0]]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { row: 1, expected: 2, found: 1 });
    }

    #[test]
    fn matrix_rejects_negative_entries() {
        assert!(MetricInstance::from_matrix(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
    }

    proptest! {
        #[test]
        fn points_always_give_a_metric(
            rows in (1usize..4).prop_flat_map(|d| prop::collection::vec(
                prop::collection::vec(-100.0f64..100.0, d), 1..12))
        ) {
            let m = metric_from_points(&rows).unwrap();
            prop_assert!(validate_metric(&m).is_empty());
        }
    }
}
