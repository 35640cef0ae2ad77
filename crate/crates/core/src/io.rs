//! Plain-text formats for instances, clusterings and audit reports.
//!
//! Instance files start with either a `n k` header followed by `n` rows of
//! `n` whitespace-separated distances (`inf` for INF), or a `points` header
//! (optionally `points k`) followed by comma-separated coordinate rows.
//! Arbitrary loss tables use an `arbitrary n k` header followed by one
//! `i | members | loss` line per agent and coalition containing it.
//! Clustering files list one cluster per line as space-separated agent
//! indices. Lines starting with `#` and blank lines are ignored in both.

use std::fmt::Write as _;

use crate::audit::{Approximation, AuditReport, DeviationKind};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::loss::{ArbitraryLosses, LossModel};
use crate::metric::{metric_from_points, MetricInstance};
use crate::problem::Clustering;
use crate::Agent;

/// A parsed instance file.
#[derive(Debug, Clone)]
pub struct Instance {
    pub metric: MetricInstance,
    /// Number of clusters, when the file states it.
    pub k: Option<usize>,
    /// Coordinates, for `points` files.
    pub points: Option<Vec<Vec<f64>>>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("expected {what}, found {tok:?}") })
}

fn parse_distance(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = parse_num(line, tok, "a distance")?;
    if v.is_nan() || v < 0.0 {
        return Err(Error::Parse { line, msg: format!("distance {tok:?} is not a nonnegative number") });
    }
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty instance file".into() })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head[0] == "points" {
        let k = match head.get(1) {
            Some(t) => Some(parse_num(hline, t, "a cluster count")?),
            None => None,
        };
        let mut rows = Vec::new();
        for (line, l) in lines {
            let row =
                l.split(',').map(|t| parse_num::<f64>(line, t.trim(), "a coordinate")).collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let metric = metric_from_points(&rows)?;
        return Ok(Instance { metric, k, points: Some(rows) });
    }
    if head.len() != 2 {
        return Err(Error::Parse { line: hline, msg: "expected `n k` or `points` header".into() });
    }
    let n: usize = parse_num(hline, head[0], "an agent count")?;
    let k: usize = parse_num(hline, head[1], "a cluster count")?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        let row = l.split_whitespace().map(|t| parse_distance(line, t)).collect::<Result<Vec<f64>>>()?;
        if row.len() != n {
            return Err(Error::Parse { line, msg: format!("expected {n} distances, found {}", row.len()) });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse { line: 0, msg: format!("expected {n} distance rows, found {}", rows.len()) });
    }
    Ok(Instance { metric: MetricInstance::from_matrix(rows)?, k: Some(k), points: None })
}

/// Distance-matrix form of an instance. Values round-trip exactly.
pub fn write_instance(metric: &MetricInstance, k: usize) -> String {
    let mut out = format!("{} {}\n", metric.n(), k);
    for i in 0..metric.n() {
        let row: Vec<String> = metric.row(i).iter().map(|&d| fmt_value(d)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_loss_table(text: &str) -> Result<(ArbitraryLosses, usize)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty loss table".into() })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 || head[0] != "arbitrary" {
        return Err(Error::Parse { line: hline, msg: "expected `arbitrary n k` header".into() });
    }
    let n: usize = parse_num(hline, head[1], "an agent count")?;
    let k: usize = parse_num(hline, head[2], "a cluster count")?;
    let mut entries = Vec::new();
    for (line, l) in lines {
        let parts: Vec<&str> = l.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse { line, msg: "expected `agent | members | loss`".into() });
        }
        let i: Agent = parse_num(line, parts[0], "an agent index")?;
        let s = parts[1]
            .split_whitespace()
            .map(|t| parse_num(line, t, "an agent index"))
            .collect::<Result<Vec<Agent>>>()?;
        let v = ExtReal::new(parse_distance(line, parts[2])?).expect("checked nonnegative");
        entries.push((i, s, v));
    }
    Ok((ArbitraryLosses::from_entries(n, entries)?, k))
}

pub fn write_loss_table(model: &LossModel, k: usize) -> Result<String> {
    let n = model.n();
    let mut out = format!("arbitrary {n} {k}\n");
    for mask in 1u32..(1u32 << n) {
        let s: Vec<Agent> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        for &i in &s {
            let _ = writeln!(out, "{i} | {} | {}", join(&s, " "), fmt_value(model.loss(i, &s)?.value()));
        }
    }
    Ok(out)
}

/// Reads a clustering of `n` agents. The number of clusters is the larger of
/// `k` (when given) and the number of listed clusters.
pub fn parse_clustering(text: &str, n: usize, k: Option<usize>) -> Result<Clustering> {
    let mut clusters = Vec::new();
    for (line, l) in content_lines(text) {
        let cl =
            l.split_whitespace().map(|t| parse_num::<Agent>(line, t, "an agent index")).collect::<Result<Vec<_>>>()?;
        clusters.push(cl);
    }
    let k = k.unwrap_or(0).max(clusters.len()).max(1);
    Clustering::new(n, k, clusters)
}

/// One line per nonempty cluster.
pub fn write_clustering(c: &Clustering) -> String {
    c.nonempty_clusters().map(|cl| join(cl, " ") + "\n").collect()
}

pub const REPORT_HEADER: &str = "theta,witness_members,kind,iterations";
pub const TRACE_HEADER: &str = "iteration,coalition,ratio,removed";

/// Summary line plus one trace row per iteration of the iterative auditor.
pub fn write_audit_report(report: &AuditReport) -> String {
    let mut out = summary(
        report.theta.value(),
        report.best_witness.as_ref().map(|w| &w.coalition[..]),
        DeviationKind::Fjr,
        report.iterations(),
    );
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &report.trace {
        let _ =
            writeln!(out, "{},{},{},{}", s.iteration, join(&s.coalition, " "), fmt_value(s.ratio.value()), s.removed);
    }
    out
}

/// Summary line for an exhaustive audit, which has no trace.
pub fn write_approximation(a: &Approximation, kind: DeviationKind) -> String {
    let mut out = summary(a.value.value(), a.witness.as_ref().map(|w| &w.coalition[..]), kind, 0);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    out
}

fn summary(theta: f64, witness: Option<&[Agent]>, kind: DeviationKind, iterations: usize) -> String {
    format!(
        "{REPORT_HEADER}\n{},{},{kind},{iterations}\n",
        fmt_value(theta),
        witness.map_or(String::new(), |w| join(w, " "))
    )
}

fn join(xs: &[Agent], sep: &str) -> String {
    xs.iter().map(Agent::to_string).collect::<Vec<_>>().join(sep)
}

/// `inf` for INF, otherwise the shortest exact decimal form.
pub fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = MetricInstance::from_line(&[0.0, 0.1, f64::INFINITY, 2.5]).unwrap();
        let text = write_instance(&m, 2);
        assert!(text.starts_with("4 2\n0 0.1 inf 2.5\n"));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.k, Some(2));
        assert_eq!(back.metric.to_matrix(), m.to_matrix());
    }

    #[test]
    fn points_and_comments() {
        let inst = parse_instance("# two points\npoints 1\n0,0\n\n3,4\n").unwrap();
        assert_eq!(inst.k, Some(1));
        assert_eq!(inst.metric.dist(0, 1), 5.0);
        assert_eq!(inst.points.unwrap().len(), 2);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(
            parse_instance("2 1\n0 x\n1 0\n").unwrap_err(),
            Error::Parse { line: 2, msg: "expected a distance, found \"x\"".into() }
        );
        assert!(matches!(parse_instance("2 1\n0 1\n").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(parse_instance("2 1\n0 -1\n-1 0\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn loss_table_round_trip() {
        let model = LossModel::Arbitrary(
            ArbitraryLosses::from_fn(3, |i, s| {
                ExtReal::new(if s.len() == 3 { f64::INFINITY } else { (i + s.len()) as f64 }).unwrap()
            })
            .unwrap(),
        );
        let text = write_loss_table(&model, 2).unwrap();
        assert!(text.starts_with("arbitrary 3 2\n0 | 0 | 1\n"));
        let (back, k) = parse_loss_table(&text).unwrap();
        assert_eq!(k, 2);
        assert_eq!(LossModel::Arbitrary(back), model);
        let missing: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_loss_table(&missing), Err(Error::ModelIncomplete { .. })));
    }

    #[test]
    fn clustering_round_trip() {
        let c = parse_clustering("0 3\n1 2\n", 4, None).unwrap();
        assert_eq!(c.k(), 2);
        assert_eq!(write_clustering(&c), "0 3\n1 2\n");
        assert_eq!(parse_clustering("0 1 2 3\n", 4, Some(3)).unwrap().k(), 3);
        assert!(parse_clustering("0 1\n", 4, None).is_err());
    }
}
