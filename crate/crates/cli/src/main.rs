use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use propfair::fixtures::{self, FixtureInstance, TightLineVariant};
use propfair::io::{self, Instance};
use propfair::{
    audit_fjr, exact_core_approximation, exact_fjr_approximation, greedy_cohesive_clustering, CohesiveSubroutine,
    DeviationKind, LossKind, LossModel, ProblemSpec,
};
use propfair_cli::{
    load_csv, qualitative_check, read_csv, run_experiment, write_results, AuditMode, Dataset, ExperimentConfig,
    BUNDLED_DATASET, BUNDLED_WEIGHT,
};

#[derive(Parser)]
#[command(name = "propfair", version, about = "Proportionally fair clustering and fairness audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster an instance file or CSV and print one cluster per line.
    Cluster(ClusterArgs),
    /// Audit a clustering of an instance.
    Audit(AuditArgs),
    /// Run the sampling experiment and write a results CSV.
    Experiment(ExperimentArgs),
    /// Write a constructed instance to an instance file.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct ClusterArgs {
    /// greedy-capture, greedy-diameter, greedy-exact, kmeans-pp or kmedoids
    #[arg(long, default_value = "greedy-capture")]
    algo: String,
    #[arg(long)]
    k: Option<usize>,
    /// Loss used by greedy-exact
    #[arg(long, default_value = "average")]
    loss: LossKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    clustering: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "average")]
    loss: LossKind,
    /// exact (exhaustive), approximate or interval (iterative FJR auditor)
    #[arg(long, default_value = "approximate")]
    audit_mode: String,
    /// fjr or core; core needs the exact mode
    #[arg(long, default_value = "fjr")]
    measure: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset; defaults to the bundled synthetic census sample
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated feature columns (default: all but the weight column)
    #[arg(long)]
    features: Option<String>,
    /// Sampling weight column
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    audit_mode: Option<String>,
    #[arg(long)]
    sample_size: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    /// arb-core-empty, avg-core-lb, tight-line, line-avg-core-empty or incompatibility
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Distance of the far agent; `inf` detaches it
    #[arg(long, default_value_t = f64::INFINITY)]
    far: f64,
    #[arg(long, default_value = "core-tight")]
    variant: TightLineVariant,
    /// Write the Euclidean embedding as a `points` file instead of the metric
    #[arg(long)]
    embedded: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Cluster(a) => cluster(a),
        Command::Audit(a) => audit(a),
        Command::Experiment(a) => experiment(a),
        Command::Fixture(a) => fixture(a),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

/// Instance files, or CSV datasets (standardized, all columns as features).
fn read_instance(path: &Path) -> Result<Instance> {
    if path.extension().is_some_and(|e| e == "csv") {
        let ds = load_csv(path, None, None)?;
        let metric = propfair::metric_from_points(&ds.rows)?;
        return Ok(Instance { metric, k: None, points: Some(ds.rows) });
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let k = a.k.or(inst.k).context("the number of clusters is neither in the file nor given with --k")?;
    let n = inst.metric.n();
    let spec = ProblemSpec::new(n, k)?;
    let run = propfair::baselines::SeededRun::new(a.seed);
    let c = match a.algo.as_str() {
        "greedy-capture" => propfair::greedy_capture(&spec, &inst.metric)?,
        "greedy-diameter" => {
            greedy_cohesive_clustering(CohesiveSubroutine::SmallestDiameter, &spec, &LossModel::Maximum(inst.metric))?
        }
        "greedy-exact" => {
            greedy_cohesive_clustering(CohesiveSubroutine::ExactOracle, &spec, &LossModel::new(a.loss, inst.metric)?)?
        }
        "kmeans-pp" => {
            let rows = inst.points.context("kmeans-pp needs a points file or CSV input")?;
            propfair::baselines::kmeans_pp(&rows, k, &run)?
        }
        "kmedoids" => propfair::baselines::kmedoids(&inst.metric, k, &run)?,
        other => bail!("unknown algorithm {other:?}"),
    };
    write_out(a.output.as_deref(), &io::write_clustering(&c))
}

fn audit(a: AuditArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let (model, file_k) = if first.is_some_and(|l| l.starts_with("arbitrary")) {
        let (table, k) = io::parse_loss_table(&text)?;
        (LossModel::Arbitrary(table), Some(k))
    } else {
        let inst = read_instance(&a.input)?;
        (LossModel::new(a.loss, inst.metric)?, inst.k)
    };
    let clustering_text = fs::read_to_string(&a.clustering)?;
    let c = io::parse_clustering(&clustering_text, model.n(), a.k.or(file_k))?;
    let spec = ProblemSpec::new(model.n(), a.k.or(file_k).unwrap_or(c.k()))?;
    let mode: AuditMode = a.audit_mode.parse()?;
    let report = match (mode, a.measure.as_str()) {
        (AuditMode::Exact, "fjr") => {
            io::write_approximation(&exact_fjr_approximation(&c, &spec, &model)?, DeviationKind::Fjr)
        }
        (AuditMode::Exact, "core") => {
            io::write_approximation(&exact_core_approximation(&c, &spec, &model)?, DeviationKind::Core)
        }
        (_, "fjr") => {
            let rep = audit_fjr(CohesiveSubroutine::SmallestAgentBall, &c, &spec, &model)?;
            if mode == AuditMode::Interval {
                let lambda = propfair_cli::experiment::ball_lambda(model.kind());
                eprintln!("fjr interval: [{}, {}]", rep.theta, lambda * rep.theta.value());
            }
            io::write_audit_report(&rep)
        }
        (_, "core") => bail!("core audits need --audit-mode exact"),
        (_, other) => bail!("unknown measure {other:?} (expected fjr or core)"),
    };
    write_out(a.output.as_deref(), &report)
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let (mut cfg, extra) = match &a.config {
        Some(p) => {
            ExperimentConfig::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?
        }
        None => (ExperimentConfig::default(), Vec::new()),
    };
    let from_file = |key: &str| extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
    for (key, value) in [
        ("algorithms", a.algo.clone()),
        ("k", a.k.clone()),
        ("losses", a.loss.clone()),
        ("seed", a.seed.map(|s| s.to_string())),
        ("audit_mode", a.audit_mode.clone()),
        ("sample_size", a.sample_size.map(|s| s.to_string())),
        ("trials", a.trials.map(|s| s.to_string())),
    ] {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    let input = a.input.clone().or_else(|| from_file("input").map(PathBuf::from));
    let features: Option<Vec<String>> = a
        .features
        .clone()
        .or_else(|| from_file("features"))
        .map(|f| f.split(',').map(|s| s.trim().to_owned()).collect());
    let (ds, source): (Dataset, String) = match input {
        Some(p) => {
            let weight = a.weight.clone().or_else(|| from_file("weight"));
            (load_csv(&p, features.as_deref(), weight.as_deref())?, p.display().to_string())
        }
        None => {
            let weight = a.weight.clone().or_else(|| from_file("weight")).unwrap_or_else(|| BUNDLED_WEIGHT.to_owned());
            (read_csv(BUNDLED_DATASET.as_bytes(), features.as_deref(), Some(&weight))?, "bundled".to_owned())
        }
    };

    let rows = run_experiment(&cfg, &ds)?;
    let mut csv = Vec::new();
    write_results(&rows, &mut csv)?;
    write_out(a.output.as_deref(), std::str::from_utf8(&csv)?)?;

    let check = qualitative_check(&rows);
    let mut meta = format!(
        "# experiment metadata\ndataset = {source}\nfeatures = {}\nstandardization = z-score per feature, zero-variance features set to 0\n{}",
        ds.feature_names.join(","),
        cfg.to_text()
    );
    meta.push_str(&format!(
        "fairness_comparisons = {}\nfairness_violations = {}\ncap_violations = {}\nobjective_waivers = {}\n",
        check.comparisons,
        check.fairness_violations.len(),
        check.cap_violations.len(),
        check.waivers.len()
    ));
    for line in check.fairness_violations.iter().chain(&check.cap_violations).chain(&check.waivers) {
        meta.push_str(&format!("# {line}\n"));
    }
    match &a.output {
        Some(p) => {
            let mut name = p.clone().into_os_string();
            name.push(".meta");
            fs::write(&name, &meta)?;
        }
        None => eprint!("{meta}"),
    }
    Ok(())
}

fn fixture(a: FixtureArgs) -> Result<()> {
    let need = |v: Option<usize>, what: &str| v.with_context(|| format!("--{what} is required for {}", a.name));
    let f: FixtureInstance = match a.name.as_str() {
        "arb-core-empty" => fixtures::gen_arb_core_empty(),
        "avg-core-lb" => fixtures::gen_avg_core_lb(need(a.k, "k")?, a.alpha.context("--alpha is required")?)?,
        "tight-line" => fixtures::gen_tight_line(need(a.n, "n")?, a.eps, a.far, a.variant)?,
        "line-avg-core-empty" => fixtures::gen_line_avg_core_empty(need(a.n, "n")?)?,
        "incompatibility" => fixtures::gen_incompatibility(need(a.n, "n")?, need(a.k, "k")?)?,
        other => bail!("unknown fixture {other:?}"),
    };
    let text = if a.embedded {
        let rows = f.embedding.as_ref().with_context(|| format!("{} has no embedding", f.name))?;
        let mut t = format!("points {}\n", f.spec.k());
        for r in rows {
            t.push_str(&r.iter().map(|x| io::fmt_value(*x)).collect::<Vec<_>>().join(","));
            t.push('\n');
        }
        t
    } else {
        match &f.metric {
            Some(m) => format!("# {}: {}\n{}", f.name, f.provenance, io::write_instance(m, f.spec.k())),
            None => format!("# {}: {}\n{}", f.name, f.provenance, io::write_loss_table(&f.model, f.spec.k())?),
        }
    };
    write_out(a.output.as_deref(), &text)
}
