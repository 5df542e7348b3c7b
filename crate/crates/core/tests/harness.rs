use std::fmt::Write as _;

use switchgraph::harness::{run_experiment, Algorithm, ExperimentConfig};

/// Four well separated clusters of eight-dimensional points, class id last.
fn clustered_csv(per_class: usize) -> String {
    let mut text = String::from("f0,f1,f2,f3,f4,f5,f6,f7,class\n");
    for class in 0..4u32 {
        for i in 0..per_class {
            let row: Vec<String> = (0..8)
                .map(|d| {
                    let centre = if d as u32 % 4 == class { 10.0 } else { 0.0 };
                    let jitter = ((i * 31 + d * 17 + class as usize * 7) % 13) as f64 / 13.0;
                    format!("{:.4}", centre + jitter)
                })
                .collect();
            writeln!(text, "{},{class}", row.join(",")).unwrap();
        }
    }
    text
}

#[test]
fn feature_experiment_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("points.csv"), clustered_csv(40)).unwrap();
    let cfg_path = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg_path,
        "features = points.csv\nvertices = 120\nk = 4\ntrials = 400\nswitch_period = 100\nensemble = 3\nalgorithms = scs-b,qbayes,sgp\nseed = 9\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::from_file(&cfg_path).unwrap();
    let result = run_experiment(&cfg).unwrap();
    assert_eq!(result.vertices, 120);
    assert_eq!(result.stream.len(), 400);
    assert_eq!(result.stream.segment_lengths(), vec![100; 4]);
    for a in [Algorithm::ScsB, Algorithm::QBayes, Algorithm::Sgp] {
        let r = result.report(a).unwrap();
        assert_eq!(r.cumulative.len(), 400);
        assert!(r.cumulative.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.majority_bound_holds());
        assert!(r.final_mistakes() < 200, "{a}: {} mistakes", r.final_mistakes());
    }
    assert!(result.report(Algorithm::ScsF).is_none());

    let out = dir.path().join("out");
    result.write_outputs(&out).unwrap();
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 401);
}

#[test]
fn config_text_round_trips() {
    let text = "graph = grid:6x7\nalgorithms = qbayes\nensemble = 5\ntrials = 300\nswitch_period = 60\nseed = 4\nqbayes_alpha = 0.02\nqbayes_theta = 0.1\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let again = ExperimentConfig::parse(&cfg.to_text()).unwrap();
    assert_eq!(cfg, again);
    let r = run_experiment(&cfg).unwrap();
    let q = r.report(Algorithm::QBayes).unwrap();
    assert_eq!(q.members.len(), 5);
    assert_eq!(r.vertices, 42);
}
