//! Sweeps the penalty and prints the resulting table.
use qdock::bench::{self, ExperimentConfig, SweepPoint};

fn main() -> qdock::Result<()> {
    let cfg = ExperimentConfig {
        graph: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json").into()),
        layers: 2,
        restarts: 6,
        max_iters: Some(80),
        shots: 1000,
        seed: 2,
        ..Default::default()
    };
    let points = SweepPoint::parse_list("penalty", "1,4,16")?;
    let (table, _) = bench::sweep(&cfg, &points)?;
    print!("{}", table.to_csv()?);
    Ok(())
}
