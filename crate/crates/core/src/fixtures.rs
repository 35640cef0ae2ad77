//! Constructed instances with known fairness behaviour: empty cores, tight
//! approximation examples and an instance where classical objectives fail.

use std::fmt;
use std::str::FromStr;

use crate::audit::LocationGroups;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::{ArbitraryLosses, LossKind, LossModel};
use crate::metric::MetricInstance;
use crate::problem::ProblemSpec;

/// Separation that stands in for INF when a fixture needs Euclidean coordinates.
pub const EMBEDDING_SEPARATION: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct FixtureInstance {
    pub name: String,
    /// What the instance demonstrates.
    pub provenance: &'static str,
    /// Absent for arbitrary-loss instances.
    pub metric: Option<MetricInstance>,
    pub model: LossModel,
    pub spec: ProblemSpec,
    pub groups: Option<LocationGroups>,
    /// Finite Euclidean coordinates for algorithms that need vectors.
    pub embedding: Option<Vec<Vec<f64>>>,
}

impl FixtureInstance {
    /// The same agents under a different metric-based loss.
    pub fn model_for(&self, kind: LossKind) -> Result<LossModel> {
        let metric = self.metric.clone().ok_or(Error::NeedsMetric { what: "changing the loss" })?;
        LossModel::new(kind, metric)
    }

    /// Metric induced by the Euclidean embedding.
    pub fn embedded_metric(&self) -> Result<MetricInstance> {
        let rows = self.embedding.as_ref().ok_or(Error::NeedsPositions { what: "embedded metric" })?;
        crate::metric::metric_from_points(rows)
    }

    fn on_line(
        name: String,
        provenance: &'static str,
        kind: LossKind,
        k: usize,
        locations: &[(f64, usize)],
    ) -> Result<Self> {
        let positions: Vec<f64> = locations.iter().flat_map(|&(x, c)| std::iter::repeat_n(x, c)).collect();
        let labels: Vec<usize> =
            locations.iter().enumerate().flat_map(|(g, &(_, c))| std::iter::repeat_n(g, c)).collect();
        let metric = MetricInstance::from_line(&positions)?;
        let groups = LocationGroups::new(labels, &metric)?;
        Ok(FixtureInstance {
            name,
            provenance,
            spec: ProblemSpec::new(positions.len(), k)?,
            model: LossModel::new(kind, metric.clone())?,
            metric: Some(metric),
            groups: Some(groups),
            embedding: None,
        })
    }
}

/// Four agents with tabulated losses for which every 2-clustering admits a
/// deviation improving its members infinitely.
///
/// Agents 0, 1 and 2 each want to share a pair with their successor modulo 3.
/// Agent 3 is INF-unhappy in every non-singleton cluster.
pub fn gen_arb_core_empty() -> FixtureInstance {
    let table = ArbitraryLosses::from_fn(4, |i, s| {
        let inf = ExtReal::INF;
        if i == 3 {
            return if s.len() == 1 { ExtReal::ZERO } else { inf };
        }
        let next = (i + 1) % 3;
        if s.contains(&3) || s == [0, 1, 2] || s.len() == 1 {
            inf
        } else if s.contains(&next) {
            ExtReal::ZERO
        } else {
            ExtReal::ONE
        }
    })
    .expect("four agents fit the table");
    FixtureInstance {
        name: "arb-core-empty".into(),
        provenance: "arbitrary losses, n=4, k=2: no clustering is in the alpha-core for any finite alpha",
        metric: None,
        model: LossModel::Arbitrary(table),
        spec: ProblemSpec::new(4, 2).expect("valid"),
        groups: None,
        embedding: None,
    }
}

/// Smallest agents-per-cluster count `n/k` the average-loss lower bound needs for `alpha`.
fn avg_core_lb_per_cluster(alpha: f64) -> f64 {
    let eps = (1.0 + 3f64.sqrt()) / 2.0 - alpha;
    (1.0 / (2.0 * eps) + 0.5).max(4.0 * alpha * alpha)
}

/// Average-loss instance with no `alpha`-core clustering for `alpha < (1+√3)/2`.
///
/// `k/2` agents sit at a hub `M_0`. Each of `k/2` areas has one agent at
/// `M_i`, and `n/k − 1` agents at each of `L_i` and `R_i`, with
/// `d(L_i, R_i) = 1` and `d(L_i, M_i) = d(R_i, M_i) = n/(2kα)`. Distinct
/// areas (and the hub) are INF apart.
pub fn gen_avg_core_lb(k: usize, alpha: f64) -> Result<FixtureInstance> {
    let limit = (1.0 + 3f64.sqrt()) / 2.0;
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!("k must be even and positive, got {k}")));
    }
    if !(1.0..limit).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [1, {limit:.6}), got {alpha}")));
    }
    let per = (avg_core_lb_per_cluster(alpha) - 1e-9).ceil() as usize;
    let n = per * k;
    let arm = n as f64 / (2.0 * k as f64 * alpha);

    // groups: hub, then (M_i, L_i, R_i) per area
    let mut sizes = vec![k / 2];
    for _ in 0..k / 2 {
        sizes.extend([1, per - 1, per - 1]);
    }
    let group_dist = |a: usize, b: usize| -> f64 {
        if a == b {
            return 0.0;
        }
        if a == 0 || b == 0 || (a - 1) / 3 != (b - 1) / 3 {
            return f64::INFINITY;
        }
        // same area: roles 0 = M, 1 = L, 2 = R
        if (a - 1).is_multiple_of(3) || (b - 1).is_multiple_of(3) {
            arm
        } else {
            1.0
        }
    };
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(g, &c)| std::iter::repeat_n(g, c)).collect();
    let rows = labels.iter().map(|&a| labels.iter().map(|&b| group_dist(a, b)).collect()).collect();
    let metric = MetricInstance::from_matrix(rows)?;
    let groups = LocationGroups::new(labels, &metric)?;
    Ok(FixtureInstance {
        name: format!("avg-core-lb-k{k}-a{alpha}"),
        provenance: "average loss: no alpha-core clustering below (1+sqrt 3)/2",
        spec: ProblemSpec::new(n, k)?,
        model: LossModel::Average(metric.clone()),
        metric: Some(metric),
        groups: Some(groups),
        embedding: None,
    })
}

/// Multiplicity patterns for [`gen_tight_line`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TightLineVariant {
    /// Greedy capture's output is improved by factors near 2 (maximum) and
    /// `n/2 − 3/2` (average).
    CoreTight,
    /// The smallest agent ball is about 2× (maximum) and 4× (average) worse
    /// than the most cohesive cluster.
    BallTight,
}

impl fmt::Display for TightLineVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TightLineVariant::CoreTight => "core-tight",
            TightLineVariant::BallTight => "ball-tight",
        })
    }
}

impl FromStr for TightLineVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "core-tight" => Ok(TightLineVariant::CoreTight),
            "ball-tight" => Ok(TightLineVariant::BallTight),
            other => Err(format!("unknown variant {other:?} (expected core-tight or ball-tight)")),
        }
    }
}

/// Line instance at `A = −far, B = −1, C = 0, D = eps, E = 1, F = 2 − eps`
/// with `k = 2` and maximum loss. `far` may be `INF`.
///
/// Multiplicities are `1, 2, n/2−3, 1, 1, n/2−2` for
/// [`TightLineVariant::CoreTight`] and `1, n/4, n/4−1, 1, 1, n/2−2` for
/// [`TightLineVariant::BallTight`].
pub fn gen_tight_line(n: usize, eps: f64, far: f64, variant: TightLineVariant) -> Result<FixtureInstance> {
    if n < 8 || !n.is_multiple_of(2) || (variant == TightLineVariant::BallTight && !n.is_multiple_of(4)) {
        return Err(Error::InvalidParameter(format!("n = {n} gives non-integral counts for {variant}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if far.is_nan() || far <= 2.0 {
        return Err(Error::InvalidParameter(format!("far must exceed 2, got {far}")));
    }
    let counts = match variant {
        TightLineVariant::CoreTight => [1, 2, n / 2 - 3, 1, 1, n / 2 - 2],
        TightLineVariant::BallTight => [1, n / 4, n / 4 - 1, 1, 1, n / 2 - 2],
    };
    let xs = [-far, -1.0, 0.0, eps, 1.0, 2.0 - eps];
    let locations: Vec<(f64, usize)> = xs.into_iter().zip(counts).collect();
    FixtureInstance::on_line(
        format!("tight-line-{variant}-n{n}"),
        "six-location line on which the approximation guarantees are tight",
        LossKind::Maximum,
        2,
        &locations,
    )
}

/// Average-loss line instance with an empty core for `k = 2`: one agent at 0,
/// `n/2 − 1` at 2, `n/2 − 1` at 3 and one detached at `+INF`.
pub fn gen_line_avg_core_empty(n: usize) -> Result<FixtureInstance> {
    if n <= 24 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n must be even and above 24, got {n}")));
    }
    let h = n / 2 - 1;
    FixtureInstance::on_line(
        format!("line-avg-core-empty-n{n}"),
        "average loss on a line: core empty for k = 2",
        LossKind::Average,
        2,
        &[(0.0, 1), (2.0, h), (3.0, h), (f64::INFINITY, 1)],
    )
}

/// Colocated groups, pairwise INF apart in the metric, on which k-means and
/// k-medoids style objectives favour clusterings with unbounded core and FJR
/// violations.
///
/// Group `T` holds `⌈n/k⌉` agents, `P` holds `max(1, ⌊(n−⌈n/k⌉)/3⌋)`, and
/// the remaining agents are split into `k−1` groups `Q_j`. The embedding puts
/// them on a line at `0`, `D` and `3D, 5D, …` with `D` = [`EMBEDDING_SEPARATION`],
/// so `P` is pulled toward `T` and merging `T ∪ P` costs little; the whole of `T`
/// then deviates to a loss of zero.
pub fn gen_incompatibility(n: usize, k: usize) -> Result<FixtureInstance> {
    if k < 2 || n < 2 * k {
        return Err(Error::InvalidParameter(format!("need k >= 2 and n >= 2k, got n = {n}, k = {k}")));
    }
    let tau = n.div_ceil(k);
    let p = ((n - tau) / 3).max(1);
    let rest = n - tau - p;
    let d = EMBEDDING_SEPARATION;
    let mut locations = vec![(0.0, tau), (d, p)];
    for j in 0..k - 1 {
        let size = rest / (k - 1) + usize::from(j < rest % (k - 1));
        locations.push(((3 + 2 * j) as f64 * d, size));
    }
    let labels: Vec<usize> = locations.iter().enumerate().flat_map(|(g, &(_, c))| std::iter::repeat_n(g, c)).collect();
    let rows =
        labels.iter().map(|&a| labels.iter().map(|&b| if a == b { 0.0 } else { f64::INFINITY }).collect()).collect();
    let metric = MetricInstance::from_matrix(rows)?;
    let groups = LocationGroups::new(labels, &metric)?;
    let embedding = locations.iter().flat_map(|&(x, c)| std::iter::repeat_n(vec![x], c)).collect();
    Ok(FixtureInstance {
        name: format!("incompatibility-n{n}-k{k}"),
        provenance: "classical objectives give no finite core or FJR approximation",
        spec: ProblemSpec::new(n, k)?,
        model: LossModel::Average(metric.clone()),
        metric: Some(metric),
        groups: Some(groups),
        embedding: Some(embedding),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;

    #[test]
    fn arb_table_entries() {
        let f = gen_arb_core_empty();
        let m = &f.model;
        assert_eq!(m.loss(0, &[0, 1]).unwrap(), ExtReal::ZERO);
        assert_eq!(m.loss(1, &[1, 0]).unwrap(), ExtReal::ONE);
        assert_eq!(m.loss(2, &[2, 3]).unwrap(), ExtReal::INF);
        assert_eq!(m.loss(2, &[0, 2]).unwrap(), ExtReal::ZERO);
        assert_eq!(m.loss(0, &[0, 1, 2]).unwrap(), ExtReal::INF);
        assert_eq!(m.loss(3, &[3]).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn avg_core_lb_sizes() {
        let f = gen_avg_core_lb(2, 1.2).unwrap();
        assert_eq!(f.spec.n(), 12);
        let m = f.metric.as_ref().unwrap();
        // hub at 0, M_1 at 1, L_1 at 2..7, R_1 at 7..12
        assert!((m.dist(1, 2) - 2.5).abs() < 1e-12);
        assert_eq!(m.dist(2, 7), 1.0);
        assert!(m.dist(0, 1).is_infinite());
        assert!(validate_metric(m).is_empty());

        let f = gen_avg_core_lb(2, 1.0).unwrap();
        assert_eq!(f.spec.n(), 8);
        assert!((f.metric.as_ref().unwrap().dist(1, 2) - 2.0).abs() < 1e-12);

        let f = gen_avg_core_lb(4, 1.1).unwrap();
        assert!(validate_metric(f.metric.as_ref().unwrap()).is_empty());
        assert!(gen_avg_core_lb(3, 1.2).is_err());
        assert!(gen_avg_core_lb(2, 1.4).is_err());
    }

    #[test]
    fn tight_line_counts() {
        let f = gen_tight_line(16, 0.1, 1e6, TightLineVariant::BallTight).unwrap();
        assert_eq!(f.groups.as_ref().unwrap().sizes(), vec![1, 4, 3, 1, 1, 6]);
        let f = gen_tight_line(16, 0.1, f64::INFINITY, TightLineVariant::CoreTight).unwrap();
        assert_eq!(f.groups.as_ref().unwrap().sizes(), vec![1, 2, 5, 1, 1, 6]);
        assert_eq!(f.metric.as_ref().unwrap().positions().unwrap()[15], 1.9);
        assert!(validate_metric(f.metric.as_ref().unwrap()).is_empty());
        assert!(gen_tight_line(18, 0.1, 1e6, TightLineVariant::BallTight).is_err());
        assert!(gen_tight_line(16, 1.0, 1e6, TightLineVariant::CoreTight).is_err());
    }

    #[test]
    fn line_avg_core_empty_groups() {
        let f = gen_line_avg_core_empty(26).unwrap();
        assert_eq!(f.groups.as_ref().unwrap().sizes(), vec![1, 12, 12, 1]);
        assert!(validate_metric(f.metric.as_ref().unwrap()).is_empty());
        assert!(gen_line_avg_core_empty(24).is_err());
    }

    #[test]
    fn incompatibility_layout() {
        let f = gen_incompatibility(12, 2).unwrap();
        assert_eq!(f.groups.as_ref().unwrap().sizes(), vec![6, 2, 4]);
        let e = f.embedded_metric().unwrap();
        assert_eq!(e.dist(0, 6), 1e6);
        assert_eq!(e.dist(6, 8), 2e6);
        assert!(f.metric.as_ref().unwrap().dist(0, 6).is_infinite());
        for (n, k) in [(6, 3), (20, 4), (9, 2)] {
            let f = gen_incompatibility(n, k).unwrap();
            let sizes = f.groups.as_ref().unwrap().sizes();
            assert_eq!(sizes.len(), k + 1);
            assert!(sizes.iter().all(|&s| s > 0));
            assert_eq!(sizes.iter().sum::<usize>(), n);
        }
    }
}
