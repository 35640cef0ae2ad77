use crate::error::{Error, Result};
use crate::Agent;

/// Agent count, cluster budget and the coalition threshold `⌈n/k⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSpec {
    n: usize,
    k: usize,
    tau: usize,
}

impl ProblemSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidProblem(format!("need 1 <= k <= n, got n={n}, k={k}")));
        }
        Ok(ProblemSpec { n, k, tau: n.div_ceil(k) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Smallest coalition entitled to its own cluster.
    pub fn tau(&self) -> usize {
        self.tau
    }
}

/// A partition of the agents into exactly `k` (possibly empty) clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    clusters: Vec<Vec<Agent>>,
    assignment: Vec<usize>,
}

impl Clustering {
    /// Validates that `clusters` partition `0..n` into at most `k` nonempty
    /// parts; the result is padded with empty clusters up to `k`.
    pub fn new(n: usize, k: usize, clusters: Vec<Vec<Agent>>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        let mut kept: Vec<Vec<Agent>> = Vec::with_capacity(k);
        for (t, mut c) in clusters.into_iter().enumerate() {
            for &i in &c {
                if i >= n {
                    return Err(Error::AgentOutOfRange { agent: i, n });
                }
                if assignment[i] != usize::MAX {
                    return Err(Error::InvalidClustering(format!("agent {i} appears twice")));
                }
                assignment[i] = t;
            }
            c.sort_unstable();
            kept.push(c);
        }
        if let Some(i) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidClustering(format!("agent {i} is not assigned")));
        }
        // Drop trailing empty slots beyond k; reject more than k nonempty clusters.
        while kept.len() > k && kept.last().is_some_and(Vec::is_empty) {
            kept.pop();
        }
        if kept.len() > k {
            let nonempty = kept.iter().filter(|c| !c.is_empty()).count();
            if nonempty > k {
                return Err(Error::InvalidClustering(format!("{nonempty} nonempty clusters exceed k={k}")));
            }
            kept.retain(|c| !c.is_empty());
            for (t, c) in kept.iter().enumerate() {
                for &i in c {
                    assignment[i] = t;
                }
            }
        }
        kept.resize(k, Vec::new());
        Ok(Clustering { clusters: kept, assignment })
    }

    /// Builds a clustering from per-agent cluster labels in `0..k`.
    pub fn from_labels(k: usize, labels: &[usize]) -> Result<Self> {
        let mut clusters = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidClustering(format!("label {l} of agent {i} >= k={k}")));
            }
            clusters[l].push(i);
        }
        Clustering::new(labels.len(), k, clusters)
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Vec<Agent>] {
        &self.clusters
    }

    pub fn nonempty_clusters(&self) -> impl Iterator<Item = &[Agent]> {
        self.clusters.iter().filter(|c| !c.is_empty()).map(Vec::as_slice)
    }

    /// Index of the cluster holding agent `i`.
    pub fn label(&self, i: Agent) -> usize {
        self.assignment[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.assignment
    }

    /// `C(i)`, the cluster containing agent `i`.
    pub fn cluster_of(&self, i: Agent) -> &[Agent] {
        &self.clusters[self.assignment[i]]
    }
}
