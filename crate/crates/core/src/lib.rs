//! Proportionally fair clustering: cohesive greedy clustering, fairness
//! auditing (core and fully justified representation), classical baselines
//! and constructed instances.

pub mod audit;
pub mod baselines;
pub mod cohesive;
mod error;
mod ext;
pub mod fixtures;
pub mod io;
pub mod loss;
pub mod metric;
pub mod problem;
mod search;

/// Agents are identified by their index `0..n`.
pub type Agent = usize;

pub use audit::{
    audit_fjr, bicriteria_core_check, core_ratio, exact_core_approximation, exact_fjr_approximation, fjr_ratio,
    symmetry_reduced_core_emptiness, Approximation, AuditReport, AuditStep, DeviationKind, DeviationWitness,
    LocationGroups,
};
pub use cohesive::{greedy_capture, greedy_cohesive_clustering, most_cohesive_cluster_exact, CohesiveSubroutine};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use loss::{ArbitraryLosses, LossKind, LossModel};
pub use metric::{metric_from_points, validate_metric, MetricInstance, MetricViolation};
pub use problem::{Clustering, ProblemSpec};
pub use search::EXACT_MAX_AGENTS;
