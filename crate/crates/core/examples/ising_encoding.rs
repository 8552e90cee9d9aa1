//! Ising encoding of a graph; ground states decode to the best cliques.
use qdock::ising::{encode, objective_of, Bitstring};
use qdock::ligraph::BindingInteractionGraph;
use qdock::oracle;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let h = encode(&big, 6.0)?;
    println!("{} qubits, {} couplings, constant {:.4}", h.n_qubits, h.couplings.len(), h.constant);
    for z in oracle::exact_ground_states(&h)? {
        println!("ground {z} -> {:?} energy {:.4}", z.selected(), h.energy_of(&z)?);
    }
    let all = Bitstring::from_vertices(big.len(), &(0..big.len()).collect::<Vec<_>>());
    println!("all selected: energy {:.4} objective {:.4}", h.energy_of(&all)?, objective_of(&big, &all, 6.0)?);
    let n = h.normalized();
    println!("normalized scale {:.4}", n.scale);
    Ok(())
}
