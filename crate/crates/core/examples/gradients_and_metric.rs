//! Analytic gradient against finite differences, and the quantum geometric tensor.
use qdock::circuit::{build_dcqaoa, CdPool};
use qdock::ising::encode;
use qdock::ligraph::BindingInteractionGraph;
use qdock::qng::{gradient, qgt};
use qdock::sim;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let h = encode(&big, 6.0)?.normalized();
    let energy = h.energy_vector()?;
    let c = build_dcqaoa(&h, 1, &CdPool::y(), true)?;
    let params: Vec<f64> = (0..c.n_params).map(|k| 0.1 + 0.05 * k as f64).collect();
    let g = gradient(&c, &params, &energy)?;
    let loss = |p: &[f64]| sim::expectation(&sim::run(&c, p).unwrap(), &energy).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..params.len() {
        let (mut a, mut b) = (params.clone(), params.clone());
        a[j] += 1e-5;
        b[j] -= 1e-5;
        worst = worst.max(((loss(&a) - loss(&b)) / 2e-5 - g[j]).abs());
    }
    println!("{} params, max |analytic - fd| = {worst:.2e}", params.len());
    let f = qgt(&c, &params)?;
    let eig = f.clone().symmetric_eigen().eigenvalues;
    println!("qgt min eigenvalue {:.3e}, max {:.3e}", eig.min(), eig.max());
    Ok(())
}
