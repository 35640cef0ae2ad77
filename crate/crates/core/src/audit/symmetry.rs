//! Core-emptiness certificates over instances made of colocated groups.
//!
//! Agents in one group are interchangeable, so clusterings and coalitions are
//! enumerated as per-group count vectors instead of agent sets.

use super::improves_beyond;
use crate::error::{Error, Result};
use crate::loss::LossModel;
use crate::metric::MetricInstance;
use crate::problem::ProblemSpec;
use crate::Agent;

/// Partition of the agents into groups of interchangeable (colocated) agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationGroups {
    labels: Vec<usize>,
    count: usize,
}

impl LocationGroups {
    /// Checks that agents sharing a label are at distance 0 from each other
    /// and have identical distances to everyone else. Labels must be `0..g`.
    pub fn new(labels: Vec<usize>, metric: &MetricInstance) -> Result<Self> {
        if labels.len() != metric.n() {
            return Err(Error::InvalidParameter(format!("{} group labels for {} agents", labels.len(), metric.n())));
        }
        let count = labels.iter().max().map_or(0, |&m| m + 1);
        let mut rep: Vec<Option<Agent>> = vec![None; count];
        for (i, &g) in labels.iter().enumerate() {
            match rep[g] {
                None => rep[g] = Some(i),
                Some(r) => {
                    if metric.row(i) != metric.row(r) {
                        return Err(Error::InvalidParameter(format!(
                            "agents {r} and {i} share group {g} but are not colocated"
                        )));
                    }
                }
            }
        }
        if let Some(g) = rep.iter().position(Option::is_none) {
            return Err(Error::InvalidParameter(format!("group {g} has no agents")));
        }
        Ok(LocationGroups { labels, count })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.count];
        for &g in &self.labels {
            s[g] += 1;
        }
        s
    }

    fn representatives(&self) -> Vec<Agent> {
        let mut rep = vec![usize::MAX; self.count];
        for (i, &g) in self.labels.iter().enumerate().rev() {
            rep[g] = i;
        }
        rep
    }
}

struct Reduced {
    sizes: Vec<usize>,
    dist: Vec<Vec<f64>>,
    maximum: bool,
}

impl Reduced {
    /// Loss of a member of group `a` in a cluster with per-group counts `x`.
    fn loss(&self, a: usize, x: &[usize]) -> f64 {
        if self.maximum {
            x.iter().zip(&self.dist[a]).filter(|(&c, _)| c > 0).map(|(_, &d)| d).fold(0.0, f64::max)
        } else {
            let total: usize = x.iter().sum();
            // skip empty groups so an INF distance to an absent group does not leak in
            let sum: f64 = x.iter().zip(&self.dist[a]).filter(|(&c, _)| c > 0).map(|(&c, &d)| c as f64 * d).sum();
            sum / total as f64
        }
    }
}

/// All count vectors `0 <= v <= bound` in mixed-radix order.
fn count_vectors(bound: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(bound.len())];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// Certifies that no `k`-clustering lies in the `alpha`-core: returns `true`
/// iff every clustering admits a coalition of at least `⌈n/k⌉` agents in
/// which every member improves by a factor strictly greater than `alpha`.
///
/// Only average and maximum losses are supported, since interchangeability
/// must follow from the metric.
pub fn symmetry_reduced_core_emptiness(
    model: &LossModel,
    groups: Option<&LocationGroups>,
    spec: &ProblemSpec,
    alpha: f64,
) -> Result<bool> {
    let groups = groups.ok_or(Error::MissingGroups)?;
    let metric = model.metric().ok_or(Error::NeedsMetric { what: "symmetry-reduced core check" })?;
    if metric.n() != spec.n() || groups.labels().len() != spec.n() {
        return Err(Error::InvalidProblem("group labels, metric and problem disagree on n".into()));
    }
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::InvalidParameter(format!("alpha must be at least 1, got {alpha}")));
    }
    let rep = groups.representatives();
    let red = Reduced {
        sizes: groups.sizes(),
        dist: rep.iter().map(|&a| rep.iter().map(|&b| metric.dist(a, b)).collect()).collect(),
        maximum: matches!(model, LossModel::Maximum(_)),
    };
    let coalitions: Vec<Vec<usize>> =
        count_vectors(&red.sizes).into_iter().filter(|s| s.iter().sum::<usize>() >= spec.tau()).collect();

    let mut clusters: Vec<Vec<usize>> = Vec::with_capacity(spec.k());
    let remaining = red.sizes.clone();
    let mut all_blocked = true;
    enumerate_clusterings(&red, spec.k(), &remaining, &mut clusters, &mut |cl| {
        if !blocked(&red, cl, &coalitions, alpha) {
            all_blocked = false;
        }
        all_blocked
    });
    Ok(all_blocked)
}

/// Does some coalition block clustering `cl` (every member improves beyond `alpha`)?
fn blocked(red: &Reduced, cl: &[Vec<usize>], coalitions: &[Vec<usize>], alpha: f64) -> bool {
    let g = red.sizes.len();
    // current losses of each group's members, largest first
    let mut current: Vec<Vec<f64>> = vec![Vec::new(); g];
    for x in cl {
        for a in 0..g {
            if x[a] > 0 {
                let l = red.loss(a, x);
                current[a].extend(std::iter::repeat_n(l, x[a]));
            }
        }
    }
    for c in &mut current {
        c.sort_by(|p, q| q.total_cmp(p));
    }
    coalitions.iter().any(|s| (0..g).all(|a| s[a] == 0 || improves_beyond(alpha, red.loss(a, s), current[a][s[a] - 1])))
}

/// Enumerates unordered collections of `slots` count vectors summing to
/// `remaining`, each listed in non-increasing mixed-radix order. `visit`
/// returns `false` to stop.
fn enumerate_clusterings(
    red: &Reduced,
    slots: usize,
    remaining: &[usize],
    clusters: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&[Vec<usize>]) -> bool,
) -> bool {
    let rank = |v: &[usize]| v.iter().zip(&red.sizes).fold(0usize, |acc, (&c, &m)| acc * (m + 1) + c);
    if slots == 1 {
        if clusters.last().is_some_and(|prev| rank(remaining) > rank(prev)) {
            return true;
        }
        clusters.push(remaining.to_vec());
        let go_on = visit(clusters);
        clusters.pop();
        return go_on;
    }
    for v in count_vectors(remaining) {
        if clusters.last().is_some_and(|prev| rank(&v) > rank(prev)) {
            continue;
        }
        let rest: Vec<usize> = remaining.iter().zip(&v).map(|(r, c)| r - c).collect();
        clusters.push(v);
        let go_on = enumerate_clusterings(red, slots - 1, &rest, clusters, visit);
        clusters.pop();
        if !go_on {
            return false;
        }
    }
    true
}
