//! Depolarizing noise: trajectories against the exact density matrix.
use qdock::circuit::{build_dcqaoa, CdPool};
use qdock::ising::encode;
use qdock::ligraph::BindingInteractionGraph;
use qdock::oracle;
use qdock::sim::density::run_density;
use qdock::sim::noise::{estimate_noisy, NoiseModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qdock::Result<()> {
    let big = BindingInteractionGraph::from_edges(
        (0..4).map(|i| format!("v{i}")).collect(),
        vec![0.5, 0.3, 0.4, 0.2],
        &[(0, 1), (0, 2), (1, 2), (2, 3)],
    )?;
    let h = encode(&big, 2.0)?.normalized();
    let c = build_dcqaoa(&h, 2, &CdPool::y(), true)?;
    let params: Vec<f64> = (0..c.n_params).map(|k| 0.2 * ((k % 5) as f64 + 1.0)).collect();
    let target: Vec<usize> = oracle::exact_ground_states(&h)?.iter().map(|z| z.index()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p1, p2) in [(0.0, 0.0), (0.005, 0.01), (0.02, 0.05)] {
        let noise = NoiseModel::new(p1, p2)?;
        let exact = run_density(&c, &params, &noise)?.population(target[0]);
        let est = estimate_noisy(&c, &params, &noise, 500, 100, &target, &mut rng)?;
        println!(
            "p1={p1} p2={p2}: density {exact:.4}  trajectories {:.4} ± {:.4}",
            est.mean_overlap, est.overlap_stderr
        );
    }
    Ok(())
}
