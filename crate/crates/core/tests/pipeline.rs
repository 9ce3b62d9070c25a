use hardsparse::io::{read_fd_csv, read_mv_csv, write_fd_csv, write_mv_csv};
use hardsparse::tuning::{tune_m_fd, GapOptions};
use hardsparse::*;

#[test]
fn multivariate_round_trip_then_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let (d, truth) = gen_mv(&MvScenario::new(40, 21)).unwrap();
    write_mv_csv(&path, &d, Some(&truth)).unwrap();
    let input = read_mv_csv(&path, Some("truth")).unwrap();

    let cfg = KMeansConfig::new(3).with_seed(2);
    let a = sparse_kmeans_mv(&d, 28, &cfg).unwrap();
    let b = sparse_kmeans_mv(&input.data, 28, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(b.weights.zeros(), 28);
    assert!(cer(input.truth.as_ref().unwrap(), &b.partition).unwrap() < 0.1);
    let informative = b.weights.support().iter().filter(|&&j| j < 10).count();
    assert!(informative >= 9, "{:?}", b.weights.support());
}

#[test]
fn weighted_kmeans_ignores_zero_weight_features() {
    let (d, truth) = gen_mv(&MvScenario::new(60, 4)).unwrap();
    let mut w = vec![0.0; 60];
    w[..10].iter_mut().for_each(|x| *x = 1.0 / 10f64.sqrt());
    let cfg = KMeansConfig::new(3).with_seed(1);
    let weighted = weighted_kmeans_mv(&d, &w, &cfg).unwrap();
    let plain = kmeans_mv(&d, &cfg).unwrap();
    assert!(cer(&truth, &weighted).unwrap() <= cer(&truth, &plain).unwrap());
}

#[test]
fn functional_round_trip_then_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let (d, truth) = gen_fd(&FdScenario::new(5)).unwrap();
    write_fd_csv(&path, &d).unwrap();
    let back = read_fd_csv(&path).unwrap();

    let cfg = KMeansConfig::new(2).with_seed(3);
    let fit = sparse_kmeans_fd(&back, 0.521, &cfg).unwrap();
    let std = kmeans_fd(&back, &cfg).unwrap();
    let (cs, cp) = (
        cer(&truth, &fit.partition).unwrap(),
        cer(&truth, &std).unwrap(),
    );
    assert!(cs < cp, "sparse {cs} std {cp}");
    assert!(fit.weights.zero_measure(back.quad_weights()) >= 0.521 - 1e-12);
    assert!((fit.weights.l2_norm(back.quad_weights()) - 1.0).abs() < 1e-9);
    assert!(*fit.weights.values.last().unwrap() > 0.0);
}

#[test]
fn functional_gap_on_whole_curve_permutation() {
    let (d, _) = gen_fd(&FdScenario {
        grid_size: 30,
        per_class: 15,
        seed: 8,
    })
    .unwrap();
    let opts = GapOptions {
        b_perms: 3,
        n_subdomains: 1,
        one_sd_rule: false,
    };
    let (m, curve) = tune_m_fd(&d, &[0.25, 0.5, 0.75], &opts, &KMeansConfig::new(2)).unwrap();
    assert!([0.25, 0.5, 0.75].contains(&m));
    assert!(curve.gap.iter().all(|g| g.is_finite()));
}
