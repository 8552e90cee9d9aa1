//! Statevector simulation and shot sampling.
use qdock::circuit::{build_qaoa};
use qdock::ising::encode;
use qdock::ligraph::BindingInteractionGraph;
use qdock::sim;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let h = encode(&big, 6.0)?.normalized();
    let c = build_qaoa(&h, 2, false)?;
    let params = vec![0.3, 0.7, 0.2, 0.5];
    assert_eq!(params.len(), c.n_params);
    let state = sim::run(&c, &params)?;
    println!("norm {:.12}", state.norm_sqr());
    println!("<H> {:.6}", sim::expectation(&state, &h.energy_vector()?)?);
    let counts = sim::sample(&state, 2000, &mut ChaCha8Rng::seed_from_u64(1))?;
    let mut top: Vec<_> = counts.counts.iter().collect();
    top.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    for (&z, &k) in top.iter().take(5) {
        println!("  {} {k}", counts.bitstring(z));
    }
    Ok(())
}
