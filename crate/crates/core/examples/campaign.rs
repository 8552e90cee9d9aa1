//! A small multi-restart campaign, written to disk and checked again.
use qdock::bench::{self, ExperimentConfig};

fn main() -> qdock::Result<()> {
    let out = std::env::temp_dir().join("qdock_campaign_example");
    let cfg = ExperimentConfig {
        graph: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json").into()),
        penalty: 6.0,
        layers: 2,
        restarts: 8,
        max_iters: Some(100),
        shots: 1000,
        seed: 1,
        out: Some(out.clone()),
        ..Default::default()
    };
    let report = bench::run_experiment(&cfg)?;
    let m = report.metrics.as_ref().expect("campaign has metrics");
    println!("p_true {:.3}  overlap {:.3}", m.p_true, m.mean_overlap);
    println!("written to {}", out.display());
    println!("manifest mismatches {:?}", bench::verify_manifest(&out)?);
    println!("p_true from samples {:.3}", bench::recompute_p_true(&out)?);
    Ok(())
}
