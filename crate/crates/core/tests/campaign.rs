use qdock::bench::{
    self, emit_report, load_report, recompute_p_true, verify_manifest, ExperimentConfig, ExperimentReport,
    SweepPoint,
};
use qdock::ligraph::BindingInteractionGraph;

const SIX: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");

fn small(out: Option<std::path::PathBuf>) -> ExperimentConfig {
    ExperimentConfig {
        graph: Some(SIX.into()),
        penalty: 6.0,
        layers: 2,
        restarts: 4,
        max_iters: Some(20),
        shots: 500,
        seed: 3,
        out,
        ..Default::default()
    }
}

#[test]
fn emitted_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(Some(dir.path().to_path_buf()));
    let report = bench::run_experiment(&cfg).unwrap();
    assert!(verify_manifest(dir.path()).unwrap().is_empty());

    let loaded = load_report(dir.path()).unwrap();
    assert_eq!(loaded.metrics, report.metrics);
    assert_eq!(loaded.config, report.config);
    let p = report.metrics.as_ref().unwrap().p_true;
    assert_eq!(recompute_p_true(dir.path()).unwrap(), p);

    let curves = std::fs::read_to_string(dir.path().join("loss_curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + cfg.restarts * (20 + 1));
    let samples = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    let shots: u64 = samples.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(shots, cfg.shots * cfg.restarts as u64);
    let cliques = std::fs::read_to_string(dir.path().join("cliques.csv")).unwrap();
    assert!(cliques.starts_with("rank,weight,members"));
}

#[test]
fn tampering_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    bench::run_experiment(&small(Some(dir.path().to_path_buf()))).unwrap();
    let path = dir.path().join("loss_curves.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("0,0,0\n");
    std::fs::write(&path, text).unwrap();
    assert_eq!(verify_manifest(dir.path()).unwrap(), vec!["loss_curves.csv".to_string()]);
}

#[test]
fn empty_report_is_a_valid_skeleton() {
    let dir = tempfile::tempdir().unwrap();
    let report = ExperimentReport::empty(small(None));
    let manifest = emit_report(&report, dir.path()).unwrap();
    assert_eq!(manifest.files.len(), bench::PAYLOADS.len());
    assert!(verify_manifest(dir.path()).unwrap().is_empty());
    let loaded = load_report(dir.path()).unwrap();
    assert!(loaded.restarts.is_empty());
    assert!(loaded.metrics.is_none());
    assert!(recompute_p_true(dir.path()).is_err());
}

#[test]
fn two_vertex_complete_graph_is_solved() {
    let big = BindingInteractionGraph::from_edges(vec!["a".into(), "b".into()], vec![0.4, 0.3], &[(0, 1)]).unwrap();
    let cfg = ExperimentConfig {
        layers: 1,
        restarts: 20,
        max_iters: Some(100),
        shots: 1000,
        seed: 5,
        ..Default::default()
    };
    let problem = bench::prepare_with(&cfg, big).unwrap();
    assert_eq!(problem.targets, vec![0b11]);
    let report = bench::run_prepared(&cfg, &problem).unwrap();
    assert!(report.metrics.unwrap().p_true >= 0.95);
}

#[test]
fn single_point_sweep_matches_run() {
    let cfg = small(None);
    let direct = bench::run_experiment(&cfg).unwrap();
    let (table, reports) = bench::sweep(&cfg, &[SweepPoint::Layers(2)]).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(reports[0].metrics, direct.metrics);
    let dir = tempfile::tempdir().unwrap();
    let with_out = ExperimentConfig {
        out: Some(dir.path().to_path_buf()),
        ..cfg
    };
    bench::sweep(&with_out, &SweepPoint::parse_list("layers", "1,2").unwrap()).unwrap();
    assert!(dir.path().join("sweep.csv").is_file());
    assert!(dir.path().join("point_1").join("manifest.json").is_file());
}

#[test]
fn qaoa_campaign_runs_with_noise() {
    let cfg = ExperimentConfig {
        ansatz: qdock::circuit::Flavor::Qaoa,
        noise_p1: 0.01,
        noise_p2: 0.02,
        trajectories: 5,
        restarts: 2,
        ..small(None)
    };
    let report = bench::run_experiment(&cfg).unwrap();
    for r in &report.restarts {
        assert_eq!(r.samples.as_ref().unwrap().total, cfg.shots);
    }
}
