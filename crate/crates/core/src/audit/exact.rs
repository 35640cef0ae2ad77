use std::cell::Cell;

use super::{agent_factor, check_sizes, current_losses, fjr_factor, improves_beyond, DeviationKind, DeviationWitness};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::LossModel;
use crate::problem::{Clustering, ProblemSpec};
use crate::search::{for_each_coalition, loss_lower_bound, Coalition, EXACT_MAX_AGENTS};
use crate::Agent;

/// An exact fairness approximation: the largest violation factor over all
/// eligible coalitions, floored at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub value: ExtReal,
    /// Lexicographically least coalition attaining `value`, when `value > 1`.
    pub witness: Option<DeviationWitness>,
}

fn check(c: &Clustering, spec: &ProblemSpec, model: &LossModel, what: &'static str) -> Result<()> {
    check_sizes(c, model)?;
    if spec.n() != c.n() {
        return Err(Error::InvalidProblem(format!("spec has {} agents, clustering {}", spec.n(), c.n())));
    }
    if c.n() > EXACT_MAX_AGENTS {
        return Err(Error::SizeCap { what, cap: EXACT_MAX_AGENTS, n: c.n() });
    }
    Ok(())
}

/// Maximises `score` over coalitions with sizes in `[min_size, max_size]`,
/// starting from the floor value 1. `bound(S, max_final)` must bound the
/// score of every strict superset of `S` from above.
fn maximize<S, B>(
    model: &LossModel,
    n: usize,
    min_size: usize,
    max_size: usize,
    kind: DeviationKind,
    mut score: S,
    mut bound: B,
) -> Approximation
where
    S: FnMut(&Coalition<'_>) -> f64,
    B: FnMut(&Coalition<'_>, usize) -> f64,
{
    let agents: Vec<Agent> = (0..n).collect();
    let best = Cell::new(1.0);
    let mut witness: Option<Vec<Agent>> = None;
    for_each_coalition(
        model,
        &agents,
        min_size,
        max_size,
        |c| {
            let r = score(c);
            if r > best.get() {
                best.set(r);
                witness = Some(c.members.to_vec());
            }
            false
        },
        |c, max_final| bound(c, max_final) <= best.get(),
    );
    let value = ExtReal::from_f64_unchecked(best.get());
    Approximation { value, witness: witness.map(|coalition| DeviationWitness { coalition, ratio: value, kind }) }
}

/// Exact FJR approximation of `c`: the largest FJR factor over every
/// coalition of at least `⌈n/k⌉` agents.
///
/// Under maximum loss only coalitions of exactly `⌈n/k⌉` agents are scored:
/// shrinking a coalition can only lower its worst loss and raise its best
/// current loss.
pub fn exact_fjr_approximation(c: &Clustering, spec: &ProblemSpec, model: &LossModel) -> Result<Approximation> {
    check(c, spec, model, "exact FJR audit")?;
    let before = current_losses(c, model);
    let n = c.n();
    let max_size = match model {
        LossModel::Maximum(_) => spec.tau(),
        _ => n,
    };
    let min_before = |c: &Coalition<'_>| c.members.iter().map(|&j| before[j]).fold(f64::INFINITY, f64::min);
    Ok(maximize(
        model,
        n,
        spec.tau(),
        max_size,
        DeviationKind::Fjr,
        |c| fjr_factor(min_before(c), c.max_loss()),
        |c, max_final| {
            let den = (0..c.len()).map(|t| loss_lower_bound(model, c, t, max_final)).fold(0.0, f64::max);
            fjr_factor(min_before(c), den)
        },
    ))
}

/// Exact core approximation of `c`: the largest, over coalitions of at least
/// `⌈n/k⌉` agents, of the smallest per-member improvement factor.
pub fn exact_core_approximation(c: &Clustering, spec: &ProblemSpec, model: &LossModel) -> Result<Approximation> {
    check(c, spec, model, "exact core audit")?;
    let before = current_losses(c, model);
    let n = c.n();
    Ok(maximize(
        model,
        n,
        spec.tau(),
        n,
        DeviationKind::Core,
        |c| {
            c.members
                .iter()
                .zip(c.losses)
                .map(|(&i, &after)| agent_factor(before[i], after))
                .fold(f64::INFINITY, f64::min)
        },
        |c, max_final| {
            (0..c.len())
                .map(|t| agent_factor(before[c.members[t]], loss_lower_bound(model, c, t, max_final)))
                .fold(f64::INFINITY, f64::min)
        },
    ))
}

/// Smallest coalition size allowed by the `(α, δ)`-core: `⌈δ·n/k⌉`.
fn bicriteria_min_size(delta: f64, n: usize, k: usize) -> usize {
    let x = delta * n as f64 / k as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Searches for a coalition of at least `δ·n/k` agents in which every member
/// improves by a factor strictly greater than `alpha`. Returns the
/// lexicographically least one, or `None` when `c` is in the `(α, δ)`-core.
pub fn bicriteria_core_check(
    c: &Clustering,
    spec: &ProblemSpec,
    model: &LossModel,
    alpha: f64,
    delta: f64,
) -> Result<Option<DeviationWitness>> {
    if delta.is_nan() || delta < 1.0 {
        return Err(Error::InvalidParameter(format!("delta must be at least 1, got {delta}")));
    }
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::InvalidParameter(format!("alpha must be at least 1, got {alpha}")));
    }
    check(c, spec, model, "bicriteria core check")?;
    let n = c.n();
    let min_size = if delta.is_infinite() { usize::MAX } else { bicriteria_min_size(delta, n, spec.k()) };
    if min_size > n {
        return Ok(None);
    }
    let before = current_losses(c, model);
    let agents: Vec<Agent> = (0..n).collect();
    let mut found: Option<DeviationWitness> = None;
    for_each_coalition(
        model,
        &agents,
        min_size,
        n,
        |co| {
            let all = co.members.iter().zip(co.losses).all(|(&i, &after)| improves_beyond(alpha, after, before[i]));
            if all {
                let ratio = co
                    .members
                    .iter()
                    .zip(co.losses)
                    .map(|(&i, &after)| agent_factor(before[i], after))
                    .fold(f64::INFINITY, f64::min);
                found = Some(DeviationWitness {
                    coalition: co.members.to_vec(),
                    ratio: ExtReal::from_f64_unchecked(ratio),
                    kind: DeviationKind::Core,
                });
            }
            all
        },
        |co, max_final| {
            (0..co.len())
                .any(|t| !improves_beyond(alpha, loss_lower_bound(model, co, t, max_final), before[co.members[t]]))
        },
    );
    Ok(found)
}
