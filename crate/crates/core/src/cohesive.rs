//! Cohesive-cluster subroutines and the greedy clustering loop built on them.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::LossModel;
use crate::metric::MetricInstance;
use crate::problem::{Clustering, ProblemSpec};
use crate::search::{for_each_coalition, loss_lower_bound, EXACT_MAX_AGENTS};
use crate::Agent;

/// A procedure that picks the next cohesive cluster out of the remaining agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CohesiveSubroutine {
    /// Smallest agent-centred ball holding `τ` agents.
    SmallestAgentBall,
    /// Narrowest window of `τ` consecutive agents on a line.
    SmallestDiameter,
    /// Exhaustive Most Cohesive Cluster search.
    ExactOracle,
}

impl CohesiveSubroutine {
    pub fn name(self) -> &'static str {
        match self {
            CohesiveSubroutine::SmallestAgentBall => "smallest-agent-ball",
            CohesiveSubroutine::SmallestDiameter => "smallest-diameter",
            CohesiveSubroutine::ExactOracle => "exact-oracle",
        }
    }

    /// Runs the subroutine on the remaining agents `remaining` with threshold `tau`.
    pub fn find(self, remaining: &[Agent], model: &LossModel, tau: usize) -> Result<Vec<Agent>> {
        match self {
            CohesiveSubroutine::SmallestAgentBall => {
                let metric = model.metric().ok_or(Error::NeedsMetric { what: "smallest agent ball" })?;
                smallest_agent_ball(remaining, metric, tau)
            }
            CohesiveSubroutine::SmallestDiameter => {
                let metric = model.metric().ok_or(Error::NeedsMetric { what: "smallest diameter" })?;
                smallest_diameter(remaining, metric, tau)
            }
            CohesiveSubroutine::ExactOracle => most_cohesive_cluster_exact(remaining, model, tau),
        }
    }
}

impl fmt::Display for CohesiveSubroutine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CohesiveSubroutine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smallest-agent-ball" | "ball" => Ok(CohesiveSubroutine::SmallestAgentBall),
            "smallest-diameter" | "diameter" => Ok(CohesiveSubroutine::SmallestDiameter),
            "exact-oracle" | "exact" => Ok(CohesiveSubroutine::ExactOracle),
            other => Err(format!("unknown subroutine {other:?}")),
        }
    }
}

fn sorted_checked(remaining: &[Agent], n: usize, tau: usize) -> Result<Vec<Agent>> {
    if remaining.is_empty() {
        return Err(Error::EmptySet);
    }
    if tau == 0 {
        return Err(Error::InvalidParameter("threshold must be at least 1".into()));
    }
    if let Some(&a) = remaining.iter().find(|&&a| a >= n) {
        return Err(Error::AgentOutOfRange { agent: a, n });
    }
    let mut v = remaining.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn by_distance(a: &(f64, Agent), b: &(f64, Agent)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// The `tau` agents of `remaining` closest to the centre that minimises the
/// radius needed to capture `tau` agents.
///
/// Each agent is its own closest agent. Ties in the radius and in the
/// distance order go to the lowest agent index. Returns all of `remaining`
/// when it has at most `tau` agents.
pub fn smallest_agent_ball(remaining: &[Agent], metric: &MetricInstance, tau: usize) -> Result<Vec<Agent>> {
    let pts = sorted_checked(remaining, metric.n(), tau)?;
    if pts.len() <= tau {
        return Ok(pts);
    }
    let mut buf: Vec<(f64, Agent)> = Vec::with_capacity(pts.len());
    let others = |i: Agent, buf: &mut Vec<(f64, Agent)>| {
        let row = metric.row(i);
        buf.clear();
        buf.extend(pts.iter().filter(|&&j| j != i).map(|&j| (row[j], j)));
    };

    let mut best: Option<(f64, Agent)> = None;
    for &i in &pts {
        let radius = if tau == 1 {
            0.0
        } else {
            others(i, &mut buf);
            let (_, nth, _) = buf.select_nth_unstable_by(tau - 2, by_distance);
            nth.0
        };
        if best.is_none_or(|(r, _)| radius < r) {
            best = Some((radius, i));
        }
    }

    let (_, center) = best.expect("nonempty");
    let mut ball = vec![center];
    if tau > 1 {
        others(center, &mut buf);
        buf.select_nth_unstable_by(tau - 2, by_distance);
        ball.extend(buf[..tau - 1].iter().map(|&(_, j)| j));
    }
    ball.sort_unstable();
    Ok(ball)
}

/// The narrowest window of exactly `tau` consecutive agents in left-to-right
/// order. Ties go to the leftmost window; agents at `±inf` make any window
/// containing them infinitely wide.
pub fn smallest_diameter(remaining: &[Agent], metric: &MetricInstance, tau: usize) -> Result<Vec<Agent>> {
    let pos = metric.positions().ok_or(Error::NeedsPositions { what: "smallest diameter" })?;
    let mut pts = sorted_checked(remaining, metric.n(), tau)?;
    if pts.len() <= tau {
        return Ok(pts);
    }
    pts.sort_by(|&a, &b| pos[a].total_cmp(&pos[b]).then(a.cmp(&b)));
    let width = |w: usize| {
        let (l, r) = (pos[pts[w]], pos[pts[w + tau - 1]]);
        if tau == 1 {
            0.0
        } else if l.is_infinite() || r.is_infinite() {
            f64::INFINITY
        } else {
            r - l
        }
    };
    let mut best = 0;
    let mut best_width = width(0);
    for w in 1..=pts.len() - tau {
        let cur = width(w);
        if cur < best_width {
            best = w;
            best_width = cur;
        }
    }
    let mut window = pts[best..best + tau].to_vec();
    window.sort_unstable();
    Ok(window)
}

/// `max_{i∈S} l_i(S)`: how loose the cluster is for its worst-off member.
pub fn cohesion(model: &LossModel, s: &[Agent]) -> Result<ExtReal> {
    let mut worst = ExtReal::ZERO;
    for &i in s {
        worst = worst.max(model.loss(i, s)?);
    }
    Ok(worst)
}

/// Exhaustive solution of Most Cohesive Cluster: the coalition of at least
/// `min(tau, |remaining|)` agents minimising [`cohesion`].
///
/// Maximum loss only enumerates coalitions of exactly that size, since adding
/// agents never lowers the objective. Ties go to the lexicographically least
/// member list.
pub fn most_cohesive_cluster_exact(remaining: &[Agent], model: &LossModel, tau: usize) -> Result<Vec<Agent>> {
    let pts = sorted_checked(remaining, model.n(), tau)?;
    if pts.len() > EXACT_MAX_AGENTS {
        return Err(Error::SizeCap { what: "exact cohesive cluster", cap: EXACT_MAX_AGENTS, n: pts.len() });
    }
    let min_size = tau.min(pts.len());
    let max_size = match model {
        LossModel::Maximum(_) => min_size,
        _ => pts.len(),
    };
    let best = Cell::new(None::<f64>);
    let mut best_set: Vec<Agent> = Vec::new();
    for_each_coalition(
        model,
        &pts,
        min_size,
        max_size,
        |c| {
            let obj = c.max_loss();
            if best.get().is_none_or(|b| obj < b) {
                best.set(Some(obj));
                best_set = c.members.to_vec();
            }
            false
        },
        |c, max_final| {
            let Some(b) = best.get() else { return false };
            let lb = (0..c.len()).map(|t| loss_lower_bound(model, c, t, max_final)).fold(0.0, f64::max);
            lb >= b
        },
    );
    Ok(best_set)
}

/// Repeatedly extracts `sub(N', ·, ⌈n/k⌉)` from the remaining agents `N'`
/// until none remain. Unused cluster slots stay empty.
pub fn greedy_cohesive_clustering(
    sub: CohesiveSubroutine,
    spec: &ProblemSpec,
    model: &LossModel,
) -> Result<Clustering> {
    if model.n() != spec.n() {
        return Err(Error::InvalidProblem(format!(
            "loss model has {} agents but the problem has {}",
            model.n(),
            spec.n()
        )));
    }
    let tau = spec.tau();
    let mut remaining: Vec<Agent> = (0..spec.n()).collect();
    let mut clusters = Vec::with_capacity(spec.k());
    while !remaining.is_empty() {
        let next = sub.find(&remaining, model, tau)?;
        debug_assert!(next.len() >= tau.min(remaining.len()));
        remaining.retain(|a| next.binary_search(a).is_err());
        clusters.push(next);
    }
    debug_assert!(clusters.len() <= spec.k());
    Clustering::new(spec.n(), spec.k(), clusters)
}

/// Greedy capture: the greedy loop driven by [`smallest_agent_ball`]. It only
/// reads distances, so one output serves every metric loss.
pub fn greedy_capture(spec: &ProblemSpec, metric: &MetricInstance) -> Result<Clustering> {
    let model = LossModel::Maximum(metric.clone());
    greedy_cohesive_clustering(CohesiveSubroutine::SmallestAgentBall, spec, &model)
}
