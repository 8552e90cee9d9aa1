use clap::Parser;
use qdock::bench::{main_with_args, Cli, Command};
use qdock::circuit::Flavor;

const SIX: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");

fn code(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("qdock").chain(args.iter().copied()))
}

#[test]
fn build_graph_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["build-graph", "--graph", SIX, "--out", out]), 0);
    assert!(dir.path().join("big.json").is_file());
    assert!(dir.path().join("adjacency.txt").is_file());
}

#[test]
fn solve_exact_and_encode_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["solve-exact", "--graph", SIX, "--out", out]), 0);
    assert_eq!(code(&["encode", "--graph", SIX, "--layers", "2", "--out", out]), 0);
    for f in ["clique.json", "cliques.csv", "hamiltonian.json", "circuit.json", "circuit.txt"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&["run"]), 2);
    assert_eq!(code(&["run", "--graph", SIX, "--no-such-flag"]), 2);
    assert_eq!(code(&["encode", "--graph", SIX, "--ansatz", "vqe"]), 2);
    assert_eq!(code(&["encode", "--graph", SIX, "--normalize", "maybe"]), 2);
    assert_eq!(code(&["encode", "--graph", "/nonexistent/big.json"]), 2);
    assert_eq!(code(&["run", "--graph", SIX, "--restarts", "0"]), 2);
    assert_eq!(code(&["sweep", "--graph", SIX, "--axis", "depth", "--values", "1"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"layerz": 3}"#).unwrap();
    assert_eq!(code(&["encode", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn infeasible_instance_exits_3() {
    assert_eq!(code(&["solve-exact", "--synthetic", "8", "--gap", "50"]), 3);
}

#[test]
fn oversized_problem_exits_4() {
    assert_eq!(code(&["encode", "--synthetic", "24", "--density", "0.3"]), 4);
}

#[test]
fn report_subcommand_checks_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "run", "--graph", SIX, "--layers", "1", "--restarts", "2", "--max-iters", "5", "--shots", "100", "--out", out,
    ];
    assert_eq!(code(&args), 0);
    assert_eq!(code(&["report", out]), 0);
    std::fs::write(dir.path().join("samples.csv"), "restart,bitstring,index,count\n").unwrap();
    assert_eq!(code(&["report", out]), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"graph": "g.json", "layers": 7, "penalty": 3.0, "ansatz": "qaoa", "normalize": "off", "seed": 9}"#,
    )
    .unwrap();
    let cli = Cli::try_parse_from([
        "qdock",
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--layers",
        "2",
        "--normalize",
        "on",
    ])
    .unwrap();
    let Command::Run(flags) = cli.command else {
        panic!("expected run");
    };
    let c = flags.resolve().unwrap();
    assert_eq!(c.layers, 2);
    assert!(c.normalize);
    assert_eq!(c.penalty, 3.0);
    assert_eq!(c.ansatz, Flavor::Qaoa);
    assert_eq!(c.seed, 9);
    assert_eq!(c.graph.as_deref(), Some(std::path::Path::new("g.json")));
}
