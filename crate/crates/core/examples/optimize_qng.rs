//! One QNG optimization run of DC-QAOA.
use qdock::circuit::{build_dcqaoa, CdPool};
use qdock::ising::encode;
use qdock::ligraph::BindingInteractionGraph;
use qdock::oracle;
use qdock::qng::{optimize, OptimizerConfig};
use qdock::sim;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let h = encode(&big, 6.0)?.normalized();
    let energy = h.energy_vector()?;
    let targets: Vec<usize> = oracle::exact_ground_states(&h)?.iter().map(|z| z.index()).collect();
    let c = build_dcqaoa(&h, 3, &CdPool::y(), true)?;
    let rec = optimize(&c, &energy, &OptimizerConfig::fixed_budget(200), 7)?;
    let curve = &rec.loss_curve;
    for t in [0, 10, 50, 100, curve.len() - 1] {
        println!("iter {t:>3} loss {:.6}", curve[t]);
    }
    let state = sim::run(&c, &rec.final_params)?;
    println!("ground {:.6}  overlap {:.4}", energy[targets[0]], state.overlap(&targets));
    Ok(())
}
