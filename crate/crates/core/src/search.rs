//! Depth-first enumeration of coalitions with incremental loss bookkeeping.
//!
//! Subsets of the candidate list are visited in lexicographic order of their
//! (position-sorted) member lists, so a visitor that only replaces its
//! incumbent on strict improvement ends up with the lexicographically least
//! optimum. A subtree may be pruned once the visitor knows no superset in it
//! can strictly improve.

use crate::loss::LossModel;
use crate::Agent;

/// Largest candidate count for exhaustive enumeration.
pub const EXACT_MAX_AGENTS: usize = 22;

pub(crate) struct Coalition<'s> {
    pub members: &'s [Agent],
    /// `losses[t]` is the loss of `members[t]` for the coalition itself.
    pub losses: &'s [f64],
}

impl Coalition<'_> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn max_loss(&self) -> f64 {
        self.losses.iter().copied().fold(0.0, f64::max)
    }
}

/// Monotone lower bound on member `t`'s loss in any superset with at most
/// `max_final` agents.
pub(crate) fn loss_lower_bound(model: &LossModel, c: &Coalition<'_>, t: usize, max_final: usize) -> f64 {
    match model {
        LossModel::Maximum(_) => c.losses[t],
        LossModel::Average(_) => c.losses[t] * c.len() as f64 / max_final as f64,
        LossModel::Arbitrary(_) => 0.0,
    }
}

struct State<'a> {
    model: &'a LossModel,
    candidates: &'a [Agent],
    min_size: usize,
    max_size: usize,
    // level-major accumulator rows, one per coalition size, indexed by candidate position
    acc: Vec<f64>,
    members: Vec<Agent>,
    positions: Vec<usize>,
    losses: Vec<f64>,
    mask: u32,
    stopped: bool,
}

/// Visits every coalition `S ⊆ candidates` with `min_size <= |S| <= max_size`.
///
/// `visit` returns `true` to stop the search. `prune(S, max_final)` returns
/// `true` to skip every strict superset of `S` reachable from it; such
/// supersets have at most `max_final` members.
pub(crate) fn for_each_coalition<V, P>(
    model: &LossModel,
    candidates: &[Agent],
    min_size: usize,
    max_size: usize,
    mut visit: V,
    mut prune: P,
) where
    V: FnMut(&Coalition<'_>) -> bool,
    P: FnMut(&Coalition<'_>, usize) -> bool,
{
    let m = candidates.len();
    let max_size = max_size.min(m);
    let min_size = min_size.max(1);
    if min_size > max_size {
        return;
    }
    let mut st = State {
        model,
        candidates,
        min_size,
        max_size,
        acc: vec![0.0; (max_size + 1) * m],
        members: Vec::with_capacity(max_size),
        positions: Vec::with_capacity(max_size),
        losses: Vec::with_capacity(max_size),
        mask: 0,
        stopped: false,
    };
    descend(&mut st, 0, &mut visit, &mut prune);
}

fn descend<V, P>(st: &mut State<'_>, start: usize, visit: &mut V, prune: &mut P)
where
    V: FnMut(&Coalition<'_>) -> bool,
    P: FnMut(&Coalition<'_>, usize) -> bool,
{
    let m = st.candidates.len();
    for p in start..m {
        let size = st.members.len() + 1;
        if size + (m - p - 1) < st.min_size {
            break;
        }
        let agent = st.candidates[p];
        include(st, p, agent, size);

        let coalition = Coalition { members: &st.members, losses: &st.losses };
        if size >= st.min_size && visit(&coalition) {
            st.stopped = true;
        }
        if !st.stopped && size < st.max_size && p + 1 < m {
            let max_final = st.max_size.min(size + m - p - 1);
            if !prune(&coalition, max_final) {
                descend(st, p + 1, visit, prune);
            }
        }

        st.members.pop();
        st.positions.pop();
        if let LossModel::Arbitrary(_) = st.model {
            st.mask &= !(1 << agent);
        }
        if st.stopped {
            return;
        }
    }
}

fn include(st: &mut State<'_>, p: usize, agent: Agent, size: usize) {
    let m = st.candidates.len();
    st.members.push(agent);
    st.positions.push(p);
    st.losses.clear();
    match st.model {
        LossModel::Average(metric) | LossModel::Maximum(metric) => {
            let is_max = matches!(st.model, LossModel::Maximum(_));
            let row = metric.row(agent);
            let (prev, next) = st.acc.split_at_mut(size * m);
            let prev = &prev[(size - 1) * m..];
            let next = &mut next[..m];
            for q in 0..m {
                let d = row[st.candidates[q]];
                next[q] = if is_max { prev[q].max(d) } else { prev[q] + d };
            }
            // divide rather than scale so values match `loss_raw` bit for bit
            let div = if is_max { 1.0 } else { size as f64 };
            st.losses.extend(st.positions.iter().map(|&q| next[q] / div));
        }
        LossModel::Arbitrary(table) => {
            st.mask |= 1 << agent;
            let mask = st.mask;
            st.losses.extend(st.members.iter().map(|&i| table.get(i, mask)));
        }
    }
}
