mod common;

use common::*;
use propfair::baselines::*;
use propfair::*;
use proptest::prelude::*;

fn clustering(n: usize, k: usize, labels: &[usize]) -> Clustering {
    Clustering::from_labels(k, &labels[..n]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pairwise_kmeans_is_twice_the_centroid_form(
        pts in points(1..=20, 3),
        k in 1usize..=5,
        labels in labels(20, 5),
    ) {
        let n = pts.len();
        let labels: Vec<usize> = labels.iter().map(|l| l % k).collect();
        let c = clustering(n, k, &labels);
        let m = metric_from_points(&pts).unwrap();
        let pair = objective_kmeans(&c, &m);
        let cent = objective_kmeans_centroid(&c, &pts);
        prop_assert!((pair - 2.0 * cent).abs() <= 1e-9 * pair.abs().max(1e-300), "{} vs {}", pair, cent);
    }

    #[test]
    fn objectives_scale_and_permute(
        pts in points(1..=12, 2),
        k in 1usize..=4,
        labels in labels(12, 4),
        c in 0.01..100.0f64,
        shift in 0usize..12,
    ) {
        let n = pts.len();
        let labels: Vec<usize> = labels[..n].iter().map(|l| l % k).collect();
        let clu = clustering(n, k, &labels);
        let m = metric_from_points(&pts).unwrap();
        let s = m.scaled(c).unwrap();
        assert_close(objective_cost(&clu, &s), c * objective_cost(&clu, &m), "cost");
        assert_close(objective_kmeans(&clu, &s), c * c * objective_kmeans(&clu, &m), "kmeans");
        assert_close(objective_kmedoids(&clu, &s), c * objective_kmedoids(&clu, &m), "kmedoids");

        // relabel agents by a rotation: agent i of the permuted instance is agent perm[i]
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let pm = m.permuted(&perm);
        let plabels: Vec<usize> = perm.iter().map(|&j| labels[j]).collect();
        let pc = Clustering::from_labels(k, &plabels).unwrap();
        assert_close(objective_cost(&pc, &pm), objective_cost(&clu, &m), "cost perm");
        assert_close(objective_kmeans(&pc, &pm), objective_kmeans(&clu, &m), "kmeans perm");
        assert_close(objective_kmedoids(&pc, &pm), objective_kmedoids(&clu, &m), "kmedoids perm");
    }

    #[test]
    fn baselines_are_valid_and_seed_deterministic(pts in prop_oneof![points(1..=15, 2), grid_points(1..=15)], k in 1usize..=6, seed: u64) {
        let n = pts.len();
        let k = k.min(n);
        let run = SeededRun::new(seed);
        let m = metric_from_points(&pts).unwrap();
        let a = kmeans_pp(&pts, k, &run).unwrap();
        prop_assert_eq!(&a, &kmeans_pp(&pts, k, &run).unwrap());
        let b = kmedoids(&m, k, &run).unwrap();
        prop_assert_eq!(&b, &kmedoids(&m, k, &run).unwrap());
        for c in [&a, &b] {
            prop_assert_eq!(c.n(), n);
            prop_assert_eq!(c.k(), k);
            prop_assert_eq!(c.nonempty_clusters().count(), k);
        }
    }
}

#[test]
fn kmedoids_beats_a_fixed_bad_start() {
    // the alternating scan settles at each group's middle agent
    let m = MetricInstance::from_line(&[0.0, 1.0, 2.0, 100.0, 101.0, 102.0]).unwrap();
    for seed in 0..10 {
        let c = kmedoids(&m, 2, &SeededRun::new(seed)).unwrap();
        assert_eq!(objective_kmedoids(&c, &m), 4.0);
    }
}
