//! Brute-force reference implementations written directly from the
//! definitions, sharing no code with the library's search engine.
#![allow(dead_code)]

use propfair::{Clustering, LossKind, LossModel, MetricInstance, ProblemSpec};
use proptest::prelude::*;

pub fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All nonempty subsets as sorted member lists, in lexicographic order.
pub fn subsets_lex(agents: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(agents: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for t in start..agents.len() {
            cur.push(agents[t]);
            out.push(cur.clone());
            rec(agents, t + 1, cur, out);
            cur.pop();
        }
    }
    rec(agents, 0, &mut Vec::new(), &mut out);
    out
}

pub fn loss(model: &LossModel, i: usize, s: &[usize]) -> f64 {
    model.loss(i, s).unwrap().value()
}

pub fn naive_loss(m: &MetricInstance, kind: LossKind, i: usize, s: &[usize]) -> f64 {
    let ds = s.iter().map(|&j| m.dist(i, j));
    match kind {
        LossKind::Average => ds.sum::<f64>() / s.len() as f64,
        LossKind::Maximum => ds.fold(0.0, f64::max),
        LossKind::Arbitrary => unreachable!(),
    }
}

/// `before / after` with the library's documented conventions.
pub fn improvement(before: f64, after: f64) -> f64 {
    if before == after && (before == 0.0 || before.is_infinite()) {
        1.0
    } else if after == 0.0 {
        f64::INFINITY
    } else {
        before / after
    }
}

pub fn fjr_value(c: &Clustering, model: &LossModel, s: &[usize]) -> f64 {
    let num = s.iter().map(|&j| loss(model, j, c.cluster_of(j))).fold(f64::INFINITY, f64::min);
    let den = s.iter().map(|&i| loss(model, i, s)).fold(0.0, f64::max);
    if num == 0.0 {
        1.0
    } else {
        improvement(num, den)
    }
}

pub fn core_value(c: &Clustering, model: &LossModel, s: &[usize]) -> f64 {
    s.iter().map(|&i| improvement(loss(model, i, c.cluster_of(i)), loss(model, i, s))).fold(f64::INFINITY, f64::min)
}

/// Largest value over every coalition of at least `tau` agents, floored at 1,
/// with the lexicographically least maximizer when the value exceeds 1.
pub fn naive_max(n: usize, tau: usize, mut f: impl FnMut(&[usize]) -> f64) -> (f64, Option<Vec<usize>>) {
    let mut best = (1.0, None);
    for s in subsets_lex(&(0..n).collect::<Vec<_>>()) {
        if s.len() >= tau {
            let v = f(&s);
            if v > best.0 {
                best = (v, Some(s));
            }
        }
    }
    best
}

pub fn naive_fjr(c: &Clustering, spec: &ProblemSpec, model: &LossModel) -> (f64, Option<Vec<usize>>) {
    naive_max(spec.n(), spec.tau(), |s| fjr_value(c, model, s))
}

pub fn naive_core(c: &Clustering, spec: &ProblemSpec, model: &LossModel) -> (f64, Option<Vec<usize>>) {
    naive_max(spec.n(), spec.tau(), |s| core_value(c, model, s))
}

pub fn cohesion(model: &LossModel, s: &[usize]) -> f64 {
    s.iter().map(|&i| loss(model, i, s)).fold(0.0, f64::max)
}

/// Smallest cohesion over subsets of `remaining` of at least `min(tau, |remaining|)` agents.
pub fn naive_most_cohesive(remaining: &[usize], model: &LossModel, tau: usize) -> (f64, Vec<usize>) {
    let need = tau.min(remaining.len());
    let mut best: Option<(f64, Vec<usize>)> = None;
    for s in subsets_lex(remaining) {
        if s.len() >= need {
            let v = cohesion(model, &s);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, s));
            }
        }
    }
    best.unwrap()
}

/// Every k-clustering of n agents, each listed once (restricted growth labels).
pub fn all_clusterings(n: usize, k: usize) -> Vec<Clustering> {
    let mut out = Vec::new();
    fn rec(n: usize, k: usize, labels: &mut Vec<usize>, used: usize, out: &mut Vec<Clustering>) {
        if labels.len() == n {
            out.push(Clustering::from_labels(k, labels).unwrap());
            return;
        }
        for l in 0..(used + 1).min(k) {
            labels.push(l);
            rec(n, k, labels, used.max(l + 1), out);
            labels.pop();
        }
    }
    rec(n, k, &mut Vec::new(), 0, &mut out);
    out
}

pub fn assert_close(a: f64, b: f64, what: &str) {
    let ok = a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    assert!(ok, "{what}: {a} vs {b}");
}

// ---- proptest strategies ----

pub fn points(n: std::ops::RangeInclusive<usize>, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    n.prop_flat_map(move |n| proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, dim), n))
}

/// Points snapped to a coarse grid, so ties and colocations are common.
pub fn grid_points(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    n.prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec((0..4i32).prop_map(f64::from), 2), n))
}

pub fn kind() -> impl Strategy<Value = LossKind> {
    prop_oneof![Just(LossKind::Average), Just(LossKind::Maximum)]
}

/// A random labelling into `k` clusters for `n` agents.
pub fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..k, n)
}

/// Instance plus a k and a random clustering.
pub fn instance_with_clustering(
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Vec<Vec<f64>>, usize, Vec<usize>, LossKind)> {
    prop_oneof![points(n.clone(), 2), grid_points(n)].prop_flat_map(|pts| {
        let n = pts.len();
        (1..=n.min(4)).prop_flat_map(move |k| (Just(pts.clone()), Just(k), labels(n, k), kind()))
    })
}
