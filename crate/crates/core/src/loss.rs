//! Agent loss functions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::metric::MetricInstance;
use crate::Agent;

/// Largest agent count accepted by [`ArbitraryLosses`].
pub const ARBITRARY_MAX_AGENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LossKind {
    Average,
    Maximum,
    Arbitrary,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Average => "average",
            LossKind::Maximum => "maximum",
            LossKind::Arbitrary => "arbitrary",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "average" | "avg" => Ok(LossKind::Average),
            "maximum" | "max" => Ok(LossKind::Maximum),
            "arbitrary" => Ok(LossKind::Arbitrary),
            other => Err(format!("unknown loss {other:?} (expected average or maximum)")),
        }
    }
}

/// An explicit loss table `l_i(S)`, keyed by agent and coalition bitmask.
#[derive(Debug, Clone)]
pub struct ArbitraryLosses {
    n: usize,
    // table[mask * n + i]; NaN marks entries with i not in mask
    table: Vec<f64>,
}

impl ArbitraryLosses {
    /// Builds a total table by evaluating `f(i, S)` for every `i ∈ S ⊆ N`.
    /// `S` is passed as a sorted member list.
    pub fn from_fn(n: usize, mut f: impl FnMut(Agent, &[Agent]) -> ExtReal) -> Result<Self> {
        Self::check_size(n)?;
        let mut table = vec![f64::NAN; n << n];
        let mut members = Vec::with_capacity(n);
        for mask in 1u32..(1u32 << n) {
            members.clear();
            members.extend((0..n).filter(|&j| mask >> j & 1 == 1));
            for &i in &members {
                table[mask as usize * n + i] = f(i, &members).value();
            }
        }
        Ok(ArbitraryLosses { n, table })
    }

    /// Builds a table from explicit `(agent, coalition, loss)` entries and
    /// rejects it unless every `(i, S)` with `i ∈ S` is present.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Agent, Vec<Agent>, ExtReal)>,
    {
        Self::check_size(n)?;
        let mut table = vec![f64::NAN; n << n];
        for (i, s, v) in entries {
            let mask = coalition_mask(n, &s)?;
            if mask >> i & 1 == 0 {
                return Err(Error::NotAMember { agent: i });
            }
            table[mask as usize * n + i] = v.value();
        }
        for mask in 1u32..(1u32 << n) {
            for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
                if table[mask as usize * n + i].is_nan() {
                    let coalition = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
                    return Err(Error::ModelIncomplete { agent: i, coalition });
                }
            }
        }
        Ok(ArbitraryLosses { n, table })
    }

    fn check_size(n: usize) -> Result<()> {
        if n > ARBITRARY_MAX_AGENTS {
            return Err(Error::SizeCap { what: "arbitrary loss table", cap: ARBITRARY_MAX_AGENTS, n });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub(crate) fn get(&self, i: Agent, mask: u32) -> f64 {
        self.table[mask as usize * self.n + i]
    }
}

impl PartialEq for ArbitraryLosses {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table.iter().zip(&other.table).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn coalition_mask(n: usize, s: &[Agent]) -> Result<u32> {
    let mut mask = 0u32;
    for &j in s {
        if j >= n {
            return Err(Error::AgentOutOfRange { agent: j, n });
        }
        mask |= 1 << j;
    }
    Ok(mask)
}

/// The loss functions of all agents.
#[derive(Debug, Clone, PartialEq)]
pub enum LossModel {
    /// `l_i(S) = (1/|S|) Σ_{j∈S} d(i,j)`, self-distance included.
    Average(MetricInstance),
    /// `l_i(S) = max_{j∈S} d(i,j)`.
    Maximum(MetricInstance),
    Arbitrary(ArbitraryLosses),
}

impl LossModel {
    pub fn new(kind: LossKind, metric: MetricInstance) -> Result<Self> {
        match kind {
            LossKind::Average => Ok(LossModel::Average(metric)),
            LossKind::Maximum => Ok(LossModel::Maximum(metric)),
            LossKind::Arbitrary => {
                Err(Error::InvalidParameter("arbitrary losses are built from a table, not a metric".into()))
            }
        }
    }

    pub fn kind(&self) -> LossKind {
        match self {
            LossModel::Average(_) => LossKind::Average,
            LossModel::Maximum(_) => LossKind::Maximum,
            LossModel::Arbitrary(_) => LossKind::Arbitrary,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            LossModel::Average(m) | LossModel::Maximum(m) => m.n(),
            LossModel::Arbitrary(t) => t.n(),
        }
    }

    pub fn metric(&self) -> Option<&MetricInstance> {
        match self {
            LossModel::Average(m) | LossModel::Maximum(m) => Some(m),
            LossModel::Arbitrary(_) => None,
        }
    }

    /// Loss of agent `i` for coalition `s`.
    pub fn loss(&self, i: Agent, s: &[Agent]) -> Result<ExtReal> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let n = self.n();
        if let Some(&j) = s.iter().find(|&&j| j >= n) {
            return Err(Error::AgentOutOfRange { agent: j, n });
        }
        if !s.contains(&i) {
            return Err(Error::NotAMember { agent: i });
        }
        if let LossModel::Arbitrary(t) = self {
            let v = t.get(i, coalition_mask(n, s)?);
            if v.is_nan() {
                return Err(Error::ModelIncomplete { agent: i, coalition: s.to_vec() });
            }
        }
        Ok(ExtReal::from_f64_unchecked(self.loss_raw(i, s)))
    }

    /// Unchecked loss; `i ∈ s` and all indices in range.
    pub(crate) fn loss_raw(&self, i: Agent, s: &[Agent]) -> f64 {
        match self {
            LossModel::Average(m) => {
                let row = m.row(i);
                s.iter().map(|&j| row[j]).sum::<f64>() / s.len() as f64
            }
            LossModel::Maximum(m) => {
                let row = m.row(i);
                s.iter().map(|&j| row[j]).fold(0.0, f64::max)
            }
            LossModel::Arbitrary(t) => {
                let mask = s.iter().fold(0u32, |acc, &j| acc | 1 << j);
                t.get(i, mask)
            }
        }
    }

    /// `max_{i∈s} l_i(s)`, the cohesiveness objective of a cluster.
    pub(crate) fn max_member_loss(&self, s: &[Agent]) -> f64 {
        s.iter().map(|&i| self.loss_raw(i, s)).fold(0.0, f64::max)
    }
}
