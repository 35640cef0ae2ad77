use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use propfair::baselines::{kmeans_pp, SeededRun};
use propfair::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect()
}

fn greedy(c: &mut Criterion) {
    let mut g = c.benchmark_group("greedy_capture");
    for n in [16, 64, 256] {
        let m = metric_from_points(&points(n, 1)).unwrap();
        let spec = ProblemSpec::new(n, 4).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| greedy_capture(black_box(&spec), &m).unwrap())
        });
    }
    g.finish();
}

fn audits(c: &mut Criterion) {
    let mut g = c.benchmark_group("audit");
    for n in [12, 16] {
        let pts = points(n, 2);
        let m = metric_from_points(&pts).unwrap();
        let spec = ProblemSpec::new(n, 3).unwrap();
        let clustering = kmeans_pp(&pts, 3, &SeededRun::new(0)).unwrap();
        for kind in [LossKind::Average, LossKind::Maximum] {
            let model = LossModel::new(kind, m.clone()).unwrap();
            g.bench_function(format!("ball/{kind}/{n}"), |b| {
                b.iter(|| audit_fjr(CohesiveSubroutine::SmallestAgentBall, &clustering, &spec, &model).unwrap())
            });
            g.bench_function(format!("exact_fjr/{kind}/{n}"), |b| {
                b.iter(|| exact_fjr_approximation(&clustering, &spec, &model).unwrap())
            });
            g.bench_function(format!("exact_core/{kind}/{n}"), |b| {
                b.iter(|| exact_core_approximation(&clustering, &spec, &model).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, greedy, audits);
criterion_main!(benches);
