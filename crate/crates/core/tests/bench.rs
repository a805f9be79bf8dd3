use std::time::{Duration, Instant};

use netshap::bench::{g5_study, run_comparison, run_scenario, ScenarioOptions, ScenarioReport};
use netshap::exact::{fringe_shapley, k_threshold_shapley};
use netshap::generate::{gen_gnp, gen_gnp_avg_degree};
use netshap::{GameSpec, Graph, NodeParam, RngSeed};

fn min_time(g: &Graph, f: impl Fn(&Graph)) -> Duration {
    (0..7)
        .map(|_| {
            let t = Instant::now();
            f(g);
            t.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn exact_runtime_scales_linearly() {
    let small = gen_gnp_avg_degree(200_000, 5.0, RngSeed(1), false).unwrap();
    let large = gen_gnp_avg_degree(400_000, 5.0, RngSeed(2), false).unwrap();
    let g1 = |g: &Graph| {
        std::hint::black_box(fringe_shapley(g));
    };
    let g2 = |g: &Graph| {
        std::hint::black_box(k_threshold_shapley(g, &NodeParam::Uniform(2)).unwrap());
    };
    for (name, ratio) in [
        ("g1", min_time(&large, g1).as_secs_f64() / min_time(&small, g1).as_secs_f64()),
        ("g2", min_time(&large, g2).as_secs_f64() / min_time(&small, g2).as_secs_f64()),
    ] {
        assert!((1.2..=4.0).contains(&ratio), "{name}: doubling n changed runtime by {ratio:.2}x");
    }
}

#[test]
fn exact_beats_sampling_on_small_er() {
    let g = gen_gnp(100, 0.05, RngSeed(3), false, false).unwrap();
    let r = run_comparison(&g, &GameSpec::Fringe, &[0.10], 30, 20_000, RngSeed(1)).unwrap();
    let t = &r.thresholds[0];
    assert_eq!(t.reached, 30);
    assert!(r.exact_runtime.as_secs_f64() * 1e3 < t.time_ms.mean);
    assert!(t.time_ms.half_width.is_some());
}

#[test]
fn reports_are_reproducible_without_wall_clock() {
    let opts = ScenarioOptions {
        runs: 2,
        max_iter: Some(200),
        seed: 9,
        nodes: Some(40),
    };
    for name in ["g1-er", "g2-er", "g3-er", "g4-er", "g5-large"] {
        let a: Vec<String> = run_scenario(name, &opts).unwrap().iter().map(|r| r.to_csv(false)).collect();
        let b: Vec<String> = run_scenario(name, &opts).unwrap().iter().map(|r| r.to_csv(false)).collect();
        assert_eq!(a, b, "{name}");
        assert!(a[0].starts_with("scenario,game,nodes"));
    }
}

#[test]
fn g5_study_shape() {
    let s = g5_study(&[6], &[0.25, 0.75], 4, 2, RngSeed(1)).unwrap();
    assert_eq!(s.rows.len(), 2);
    assert!(s.rows.iter().all(|r| r.error.mean >= 0.0 && r.max_error >= r.error.mean));
    assert_eq!(s.to_csv().lines().count(), 3);
    assert!(g5_study(&[20], &[0.5], 1, 2, RngSeed(1)).is_err());

    let opts = ScenarioOptions {
        runs: 2,
        nodes: Some(6),
        ..ScenarioOptions::default()
    };
    match &run_scenario("g5-small", &opts).unwrap()[0] {
        ScenarioReport::G5Study(s) => assert_eq!(s.rows[0].instances, 2),
        other => panic!("unexpected report {other:?}"),
    }
}
