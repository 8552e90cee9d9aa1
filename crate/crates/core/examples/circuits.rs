//! QAOA and DC-QAOA circuits for the same Hamiltonian.
use qdock::circuit::{build_dcqaoa, build_qaoa, gate_counts, select_cd_term, FieldForm};
use qdock::ising::encode;
use qdock::ligraph::BindingInteractionGraph;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/six_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let h = encode(&big, 6.0)?.normalized();
    let pool = select_cd_term(FieldForm::of(&h))?;
    println!("cd pool {:?}", pool.terms());
    for p in [1, 3] {
        let q = build_qaoa(&h, p, true)?;
        let d = build_dcqaoa(&h, p, &pool, true)?;
        println!("p={p} qaoa params {} gates {:?}", q.n_params, gate_counts(&q));
        println!("p={p} dc   params {} gates {:?}", d.n_params, gate_counts(&d));
    }
    print!("{}", build_dcqaoa(&h, 1, &pool, false)?.text_dump());
    Ok(())
}
