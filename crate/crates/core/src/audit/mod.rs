//! Fairness auditing: deviation ratios, the iterative FJR auditor, exhaustive
//! core/FJR auditors and the bicriteria and symmetry-reduced core checks.

mod exact;
mod iterative;
mod symmetry;

use std::fmt;

pub use exact::{bicriteria_core_check, exact_core_approximation, exact_fjr_approximation, Approximation};
pub use iterative::{audit_fjr, AuditReport, AuditStep};
pub use symmetry::{symmetry_reduced_core_emptiness, LocationGroups};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::LossModel;
use crate::problem::Clustering;
use crate::Agent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationKind {
    Core,
    Fjr,
}

impl fmt::Display for DeviationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviationKind::Core => "CORE",
            DeviationKind::Fjr => "FJR",
        })
    }
}

/// A coalition that would deviate, with the factor by which it improves.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationWitness {
    pub coalition: Vec<Agent>,
    pub ratio: ExtReal,
    pub kind: DeviationKind,
}

/// FJR improvement factor `min_{j∈S} before_j / max_{i∈S} after_i`.
/// A zero numerator violates no `α ≥ 1` and maps to 1, as does `INF / INF`.
pub(crate) fn fjr_factor(num: f64, den: f64) -> f64 {
    if num == 0.0 || (num.is_infinite() && den.is_infinite()) {
        1.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// One agent's improvement factor `before / after`, with `0/0 = INF/INF = 1`
/// and `x/0 = INF` for `x > 0`.
pub(crate) fn agent_factor(before: f64, after: f64) -> f64 {
    if (before == 0.0 && after == 0.0) || (before.is_infinite() && after.is_infinite()) {
        1.0
    } else if after == 0.0 {
        f64::INFINITY
    } else {
        before / after
    }
}

/// `α · after < before`, i.e. the agent improves by a factor strictly above `α`.
/// No finite improvement beats `α = INF`.
pub(crate) fn improves_beyond(alpha: f64, after: f64, before: f64) -> bool {
    if alpha.is_infinite() {
        return false;
    }
    alpha * after < before
}

fn check_coalition(n: usize, s: &[Agent]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    match s.iter().find(|&&a| a >= n) {
        Some(&a) => Err(Error::AgentOutOfRange { agent: a, n }),
        None => Ok(()),
    }
}

fn check_sizes(c: &Clustering, model: &LossModel) -> Result<()> {
    if c.n() != model.n() {
        return Err(Error::InvalidProblem(format!(
            "clustering covers {} agents but the loss model has {}",
            c.n(),
            model.n()
        )));
    }
    Ok(())
}

/// `l_i(C(i))` for every agent.
pub(crate) fn current_losses(c: &Clustering, model: &LossModel) -> Vec<f64> {
    (0..c.n()).map(|i| model.loss_raw(i, c.cluster_of(i))).collect()
}

/// FJR violation factor of coalition `s` under clustering `c` (not floored).
pub fn fjr_ratio(c: &Clustering, s: &[Agent], model: &LossModel) -> Result<ExtReal> {
    check_sizes(c, model)?;
    check_coalition(c.n(), s)?;
    let num = s.iter().map(|&j| model.loss_raw(j, c.cluster_of(j))).fold(f64::INFINITY, f64::min);
    let den = model.max_member_loss(s);
    Ok(ExtReal::from_f64_unchecked(fjr_factor(num, den)))
}

/// Core violation factor of coalition `s`: the smallest per-member improvement.
pub fn core_ratio(c: &Clustering, s: &[Agent], model: &LossModel) -> Result<ExtReal> {
    check_sizes(c, model)?;
    check_coalition(c.n(), s)?;
    let r = s
        .iter()
        .map(|&i| agent_factor(model.loss_raw(i, c.cluster_of(i)), model.loss_raw(i, s)))
        .fold(f64::INFINITY, f64::min);
    Ok(ExtReal::from_f64_unchecked(r))
}
