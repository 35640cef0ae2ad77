use super::{check_sizes, current_losses, fjr_factor, DeviationKind, DeviationWitness};
use crate::cohesive::CohesiveSubroutine;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::LossModel;
use crate::problem::{Clustering, ProblemSpec};
use crate::Agent;

/// One probe of the iterative auditor.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditStep {
    pub iteration: usize,
    pub coalition: Vec<Agent>,
    /// Raw FJR factor of the probed coalition (not floored).
    pub ratio: ExtReal,
    pub removed: Agent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Largest probed factor, floored at 1.
    pub theta: ExtReal,
    /// The first probe attaining `theta`, when `theta > 1`.
    pub best_witness: Option<DeviationWitness>,
    pub trace: Vec<AuditStep>,
}

impl AuditReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Estimates the FJR approximation of `c` by probing cohesive coalitions.
///
/// While at least `⌈n/k⌉` agents remain, asks `sub` for a cohesive coalition
/// among them, scores it, and removes its member with the smallest current
/// loss (lowest index on ties). If `sub` is a λ-approximation to Most
/// Cohesive Cluster, the true FJR approximation lies in `[θ, λθ]`.
pub fn audit_fjr(
    sub: CohesiveSubroutine,
    c: &Clustering,
    spec: &ProblemSpec,
    model: &LossModel,
) -> Result<AuditReport> {
    check_sizes(c, model)?;
    if spec.n() != c.n() {
        return Err(Error::InvalidProblem(format!("spec has {} agents, clustering {}", spec.n(), c.n())));
    }
    let tau = spec.tau();
    let before = current_losses(c, model);
    let mut remaining: Vec<Agent> = (0..c.n()).collect();
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize)> = None;

    while remaining.len() >= tau {
        let s = sub.find(&remaining, model, tau)?;
        let (removed, num) = s
            .iter()
            .map(|&i| (i, before[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .ok_or(Error::EmptySet)?;
        let ratio = fjr_factor(num, model.max_member_loss(&s));
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, trace.len()));
        }
        remaining.retain(|&a| a != removed);
        trace.push(AuditStep {
            iteration: trace.len(),
            coalition: s,
            ratio: ExtReal::from_f64_unchecked(ratio),
            removed,
        });
    }

    let theta = best.map_or(1.0, |(r, _)| r.max(1.0));
    let best_witness = best.filter(|&(r, _)| r > 1.0).map(|(r, step)| DeviationWitness {
        coalition: trace[step].coalition.clone(),
        ratio: ExtReal::from_f64_unchecked(r),
        kind: DeviationKind::Fjr,
    });
    Ok(AuditReport { theta: ExtReal::from_f64_unchecked(theta), best_witness, trace })
}
