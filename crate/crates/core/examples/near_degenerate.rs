//! Generates an instance whose two best cliques differ by a small gap.
use qdock::ligraph::PotentialTable;
use qdock::oracle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qdock::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for gap in [0.1, 0.01] {
        let big = oracle::make_near_degenerate_instance_with(12, gap, 0.8, &PotentialTable::default(), &mut rng)?;
        let sol = oracle::max_weight_clique(&big)?;
        let runner = sol.runner_up_weight.unwrap_or(f64::NAN);
        println!(
            "gap {gap}: best {:?} {:.4}, runner-up {runner:.4}, edges {}",
            sol.vertices,
            sol.total_weight,
            big.edges().len()
        );
    }
    Ok(())
}
